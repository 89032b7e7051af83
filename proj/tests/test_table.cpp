// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "sfe/binning.hpp"
#include "sfe/csv.hpp"
#include "sfe/error.hpp"
#include "sfe/table.hpp"

using namespace sfe;
using sfe::test::cat;
using sfe::test::from_csv;
using sfe::test::num;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidConfig;
}

const Schema kPeople({cat("sex", {"M", "F"}), num("age")});

}  // namespace

TEST_CASE("schema validation") {
  CHECK(code_of([] { Schema({cat("a", {"x"})}); }) == ErrorCode::InvalidSchema);
  CHECK(code_of([] { Schema({cat("a", {"x"}), cat("a", {"y"})}); }) == ErrorCode::InvalidSchema);
  CHECK(code_of([] { Schema({cat("a", {}), cat("b", {"y"})}); }) == ErrorCode::InvalidSchema);
  CHECK(code_of([] { Schema({cat("a", {"x", "x"}), cat("b", {"y"})}); }) == ErrorCode::InvalidSchema);
  CHECK(code_of([] { Schema({cat("a", {"x", "NA"}), cat("b", {"y"})}); }) == ErrorCode::InvalidSchema);
  CHECK_NOTHROW(Schema({cat("a", {}), cat("b", {})}, true));
  CHECK(kPeople.index_of("age") == 1);
  CHECK(code_of([] { kPeople.index_of("height"); }) == ErrorCode::UnknownVariable);
  CHECK(kPeople.categorical_count() == 1);
  CHECK(kPeople.numeric_count() == 1);
}

TEST_CASE("MicroTable invariants") {
  std::vector<Column> cols(2);
  cols[0].codes = {0, 2};
  cols[1].values = {1.0, 2.0};
  CHECK(code_of([&] { MicroTable(kPeople, cols); }) == ErrorCode::UnknownCategory);
  cols[0].codes = {0, 1};
  cols[1].values = {1.0, INFINITY};
  CHECK(code_of([&] { MicroTable(kPeople, cols); }) == ErrorCode::MalformedNumeric);
  cols[1].values = {1.0};
  CHECK(code_of([&] { MicroTable(kPeople, cols); }) == ErrorCode::InvalidSchema);
  cols[1].values = {1.0, missing_numeric()};
  const MicroTable t(kPeople, cols);
  CHECK(t.n_rows() == 2);
  CHECK(code_of([&] { t.codes(1); }) == ErrorCode::NotCategorical);
  CHECK(t.label(0, 0) == "M");
  CHECK_FALSE(t.label(1, 1).has_value());
}

TEST_CASE("load_csv") {
  SUBCASE("three rows, columns in any order") {
    const auto t = from_csv("age,sex\n34,M\n51,F\nNA,\n", kPeople);
    CHECK(t.n_rows() == 3);
    CHECK(t.codes(0)[1] == 1);
    CHECK(t.codes(0)[2] == kMissingCode);
    CHECK(is_missing(t.values(1)[2]));
    CHECK(t.values(1)[0] == 34.0);
  }
  SUBCASE("quoting, CRLF and a byte-order mark") {
    const Schema s({cat("name", {"a,b", "say \"hi\"", "multi\nline"}), num("v")});
    const auto t = from_csv("\xEF\xBB\xBFname,v\r\n\"a,b\",1\r\n\"say \"\"hi\"\"\",2\r\n\"multi\nline\",3\r\n", s);
    CHECK(t.n_rows() == 3);
    CHECK(t.codes(0)[0] == 0);
    CHECK(t.codes(0)[1] == 1);
    CHECK(t.codes(0)[2] == 2);
  }
  SUBCASE("errors") {
    CHECK(code_of([] { from_csv("sex,age\nX,3\n", kPeople); }) == ErrorCode::UnknownCategory);
    CHECK(code_of([] { from_csv("sex,age\nM,old\n", kPeople); }) == ErrorCode::MalformedNumeric);
    CHECK(code_of([] { from_csv("sex\nM\n", kPeople); }) == ErrorCode::MissingColumn);
    CHECK(code_of([] { from_csv("", kPeople); }) == ErrorCode::EmptyFile);
    CHECK(code_of([] { from_csv("sex,age\n", kPeople); }) == ErrorCode::EmptyFile);
    CHECK(code_of([] { from_csv("sex,age,sex\nM,1,M\n", kPeople); }) == ErrorCode::DuplicateHeader);
    CHECK(code_of([] { from_csv("sex,age\nM,1,extra\n", kPeople); }) == ErrorCode::MalformedInput);
    CHECK(code_of([] { from_csv("sex,age\n\"M,1\n", kPeople); }) == ErrorCode::MalformedInput);
  }
  SUBCASE("extend mode appends unseen labels in first-seen order") {
    const Schema open({cat("sex", {"M"}), num("age")}, true);
    const auto t = from_csv("sex,age\nF,1\nX,2\nF,3\n", open);
    CHECK(t.schema()[0].categories == std::vector<std::string>{"M", "F", "X"});
  }
}

TEST_CASE("csv round trip preserves every cell") {
  Rng rng(10);
  auto t = sfe::test::random_table(rng, 50, {3, 4}, 0.2);
  std::stringstream ss;
  write_csv(t, ss);
  CHECK(read_csv_table(ss, t.schema()) == t);

  const auto& fx = sfe::test::correlated_fixture();
  std::stringstream big;
  write_csv(fx, big);
  CHECK(read_csv_table(big, fx.schema()) == fx);
}

TEST_CASE("format_number round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -0.0, 2.5}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(missing_numeric()) == "NA");
}

TEST_CASE("infer_schema") {
  std::istringstream a("a,b\n1,2.5\n2,3\n1,\n");
  const auto s = infer_schema(a, {"b"});
  CHECK(s[0].kind == VariableKind::Categorical);
  CHECK(s[0].categories == std::vector<std::string>{"1", "2"});
  CHECK(s[1].kind == VariableKind::Numeric);
  std::istringstream dup("a,a\n1,2\n");
  CHECK(code_of([&] { infer_schema(dup, {}); }) == ErrorCode::DuplicateHeader);
  std::istringstream empty("");
  CHECK(code_of([&] { infer_schema(empty, {}); }) == ErrorCode::EmptyFile);
}

TEST_CASE("schema json round trip") {
  VariableSpec region = cat("region", {"N", "S"});
  region.missing_codes = {"-9"};
  const Schema s({region, num("age")}, true);
  CHECK(parse_schema(schema_to_json(s)) == s);
  CHECK(code_of([] { parse_schema("{\"variables\": [{\"name\": \"a\", \"kind\": \"text\"}]}"); }) ==
        ErrorCode::InvalidSchema);
  CHECK(code_of([] { parse_schema("not json"); }) == ErrorCode::InvalidSchema);
}

TEST_CASE("column_proportions") {
  const Schema s({cat("v", {"A", "B"}), cat("w", {"x"})});
  auto p = column_proportions(from_csv("v,w\nA,x\nA,x\nB,x\nB,x\n", s), "v", true);
  CHECK(p.at("A") == 0.5);
  CHECK(p.at("B") == 0.5);
  p = column_proportions(from_csv("v,w\nA,x\n,x\n", s), "v", true);
  CHECK(p.at("A") == 0.5);
  CHECK(p.at(kMissingLabel) == 0.5);
  p = column_proportions(from_csv("v,w\nA,x\nA,x\nA,x\nB,x\n", s), "v", true);
  CHECK(p.at("A") == 0.75);
  CHECK(p.at("B") == 0.25);
  CHECK(code_of([&] { column_proportions(from_csv("v,w\nA,x\n", s), "q", true); }) ==
        ErrorCode::UnknownVariable);
  CHECK(code_of([&] { column_proportions(from_csv("age,sex\n1,M\n", kPeople), "age", true); }) ==
        ErrorCode::NotCategorical);

  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const auto t = sfe::test::random_table(rng, 1 + rng.uniform_index(100), {5, 2}, 0.3);
    double sum = 0;
    for (const auto& [k, v] : column_proportions(t, "V0", true)) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("harmonize builds the union dictionary") {
  const Schema sa({cat("a", {"x", "y"}), num("n")});
  const Schema sb({num("n"), cat("a", {"z", "x"})});
  auto a = from_csv("a,n\nx,1\ny,2\n", sa);
  auto b = from_csv("n,a\n3,z\n4,x\n", sb);
  const auto novel = harmonize(a, b);
  CHECK(novel == std::vector<std::string>{"a=z"});
  CHECK(same_schema(a, b));
  CHECK(a.schema()[0].categories == std::vector<std::string>{"x", "y", "z"});
  CHECK(b.label(0, 0) == "z");
  CHECK(b.label(1, 0) == "x");
  CHECK(b.values(1)[0] == 3.0);
}

TEST_CASE("with_schema accepts only append-only extensions") {
  const auto t = from_csv("sex,age\nM,1\n", kPeople);
  const Schema wider({cat("sex", {"M", "F", "X"}), num("age")});
  CHECK(t.with_schema(wider).label(0, 0) == "M");
  const Schema reordered({cat("sex", {"F", "M"}), num("age")});
  CHECK(code_of([&] { t.with_schema(reordered); }) == ErrorCode::SchemaMismatch);
}

TEST_CASE("binning") {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  NumericBinning q;
  q.bins = 5;
  CHECK(cut_points(v, q) == std::vector<double>{2, 4, 6, 8});
  NumericBinning w{NumericBinning::Method::Width, 10, 5.0, 0.0, {}};
  CHECK(cut_points(v, w) == std::vector<double>{5, 10});
  NumericBinning e{NumericBinning::Method::Edges, 10, 1.0, 0.0, {3, 2}};
  CHECK(code_of([&] { cut_points(v, e); }) == ErrorCode::InvalidConfig);

  const Schema s({num("age"), cat("c", {"a"})});
  const auto t = from_csv("age,c\n1,a\n4,a\n5,a\n9,a\n,a\n", s);
  const auto enc = LevelEncoder::fit(t, 0, &w);
  // Cuts stay inside the observed range: [.., 5), [5, ..) and Missing.
  CHECK(enc.n_levels() == 3);
  CHECK(enc.encode(t) == std::vector<std::int32_t>{0, 0, 1, 1, 2});
  CHECK(code_of([&] { LevelEncoder::fit(t, 0, nullptr); }) == ErrorCode::MissingBinning);

  const auto qenc = LevelEncoder::fit(t, 0, &q);
  // Quantile bins are closed on the right: a value equal to a cut stays low.
  const auto cuts = cut_points(std::vector<double>{1, 4, 5, 9}, q);
  REQUIRE_FALSE(cuts.empty());
  CHECK(qenc.level_of_value(cuts.front()) == 0);
}
