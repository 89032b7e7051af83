// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sfe/evaluation.hpp"
#include "sfe/synth.hpp"
#include "sfe/table.hpp"

namespace sfe {

enum class SynthMethod { Cart, Independent };

struct SynthesisConfig {
  SynthMethod method = SynthMethod::Cart;
  CartSynthOptions cart;
  std::uint64_t seed = 0;
};

// Whole run configuration: one JSON document with a section per module.
// See configs/*.json and the README for the field reference.
struct RunConfig {
  Schema schema;
  EvaluationConfig eval;
  SynthesisConfig synthesis;
};

// Parses and validates against the schema it references ("schema", a path
// relative to the config file). Errors are InvalidConfig / InvalidSchema.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text,
                       const std::filesystem::path& base_dir);

std::string to_string(SynthMethod m);
SynthMethod parse_synth_method(const std::string& s);

}  // namespace sfe
