// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfe {

enum class ErrorCode {
  // Configuration.
  InvalidConfig,
  InvalidSchema,
  // Data / IO.
  Io,
  EmptyFile,
  DuplicateHeader,
  MissingColumn,
  UnknownCategory,
  MalformedNumeric,
  MalformedInput,
  UnknownVariable,
  NotCategorical,
  SchemaMismatch,
  EmptyTable,
  EmptySynth,
  EmptyCurve,
  EmptyScores,
  // Metric computation.
  MissingBinning,
  NegativeInput,
  DegenerateBaseline,
  ZeroWidthInterval,
  Separation,
  SingularInformation,
  RankDeficient,
};

enum class ErrorCategory { Config, Data, Metric };

std::string_view to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

// Process exit code for the CLI: 2 config, 3 data, 4 metric.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

  // Returns a copy with `context` prepended to the message, same code.
  Error annotated(std::string_view context) const;

 private:
  ErrorCode code_;
};

}  // namespace sfe
