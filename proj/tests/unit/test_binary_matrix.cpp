#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>
#include <set>

#include "generators.hpp"
#include "nbmf/binary_matrix.hpp"
#include "nbmf/errors.hpp"

using namespace nbmf;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "nbmf_test_binary_matrix";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("parse_csv") {
  SUBCASE("missing token") {
    const auto v = parse_csv("1,0\nNA,1");
    CHECK(v.rows() == 2);
    CHECK(v.cols() == 2);
    CHECK(v.at(1, 0) == CellState::Missing);
    REQUIRE(v.observed_count() == 3);
    CHECK(v.observed()[0].row == 0);
    CHECK(v.observed()[0].col == 0);
    CHECK(v.observed()[1].col == 1);
    CHECK(v.observed()[2].row == 1);
    CHECK(v.observed()[2].col == 1);
  }
  SUBCASE("single cell") {
    const auto v = parse_csv("1");
    CHECK(v.rows() == 1);
    CHECK(v.cols() == 1);
    CHECK(v.at(0, 0) == CellState::One);
  }
  SUBCASE("empty token is missing") {
    const auto v = parse_csv("1,,0\n");
    CHECK(v.at(0, 1) == CellState::Missing);
    CHECK(v.observed_count() == 2);
  }
  SUBCASE("ragged rows") { CHECK_THROWS_AS(parse_csv("1,0\n1"), DimensionError); }
  SUBCASE("empty input") { CHECK_THROWS_AS(parse_csv(""), DimensionError); }
  SUBCASE("bad token carries its location") {
    try {
      parse_csv("1,0\n0,x");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.row() == 1);
      CHECK(e.col() == 1);
    }
  }
  SUBCASE("header, delimiter and custom missing token") {
    CsvFormat fmt;
    fmt.header = true;
    fmt.delimiter = ';';
    fmt.missing_tokens = {"?"};
    const auto v = parse_csv("a;b\n1;?\n0;1\n", fmt);
    CHECK(v.rows() == 2);
    CHECK(v.at(0, 1) == CellState::Missing);
    CHECK_THROWS_AS(parse_csv("a;b\n1;NA", fmt), ParseError);
  }
  SUBCASE("CRLF line endings") {
    const auto v = parse_csv("1,0\r\n0,1\r\n");
    CHECK(v.rows() == 2);
    CHECK(v.at(1, 1) == CellState::One);
  }
}

TEST_CASE("matrix construction contracts") {
  CHECK_THROWS_AS(BinaryMatrix(0, 3, {}), DimensionError);
  CHECK_THROWS_AS(BinaryMatrix(2, 2, {CellState::One}), DimensionError);
  const auto v = BinaryMatrix::from_values(2, 3, {1, 0, 1, 0, 0, 1});
  CHECK(v.ones() == 3);
  CHECK(v.row_observed(0) == 3);
  CHECK(v.col_observed(2) == 2);
  const auto t = v.transposed();
  CHECK(t.rows() == 3);
  CHECK(t.at(2, 0) == CellState::One);
  CHECK(t.transposed() == v);
}

TEST_CASE("observed list invariant") {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = testgen::random_matrix(gen, 7, 7, 0.4);
    std::size_t expected = 0;
    for (std::size_t f = 0; f < v.rows(); ++f)
      for (std::size_t n = 0; n < v.cols(); ++n) expected += v.is_observed(f, n);
    REQUIRE(v.observed_count() == expected);
    for (std::size_t i = 0; i < v.observed_count(); ++i) {
      const auto c = v.observed()[i];
      CHECK(v.is_observed(c.row, c.col));
      CHECK(v.cell_id(c.row, c.col) == i);
      if (i > 0) {
        const auto p = v.observed()[i - 1];
        CHECK((p.row < c.row || (p.row == c.row && p.col < c.col)));
      }
    }
  }
}

TEST_CASE("CSV round trip") {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto v = testgen::random_matrix(gen, 6, 6, 0.3);
    CHECK(parse_csv(to_csv(v)) == v);
    CsvFormat fmt;
    fmt.header = true;
    CHECK(parse_csv(to_csv(v, fmt), fmt) == v);
  }
  const auto path = temp_file("round_trip.csv");
  const auto v = parse_csv("1,NA,0\n0,1,1\n");
  write_csv(path, v);
  CHECK(load_csv(path) == v);
  CHECK_THROWS_AS(load_csv(temp_file("does_not_exist.csv")), IoError);
}

TEST_CASE("density") {
  CHECK(density(parse_csv("1,0\n0,1")) == 0.5);
  CHECK(density(parse_csv("1,1,1\n1,1,1\n1,1,1")) == 1.0);
  CHECK(density(parse_csv("1,NA\nNA,0")) == 0.5);
  CHECK_THROWS_AS(density(parse_csv("NA,NA")), ArgumentError);
}

TEST_CASE("density is invariant under permutations") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = testgen::random_matrix(gen, 6, 5, 0.3);
    std::vector<std::size_t> rp(v.rows()), cp(v.cols());
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::shuffle(rp.begin(), rp.end(), gen);
    std::shuffle(cp.begin(), cp.end(), gen);
    std::vector<CellState> cells(v.rows() * v.cols());
    for (std::size_t f = 0; f < v.rows(); ++f)
      for (std::size_t n = 0; n < v.cols(); ++n) cells[f * v.cols() + n] = v.at(rp[f], cp[n]);
    CHECK(density(BinaryMatrix(v.rows(), v.cols(), cells)) == density(v));
  }
}

TEST_CASE("split_holdout") {
  std::vector<int> values(100);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<int>((i * 7) % 3 == 0);
  const auto v = BinaryMatrix::from_values(10, 10, values);

  SUBCASE("sizes") {
    const auto s = split_holdout(v, 0.25, 7);
    CHECK(s.test.size() == 25);
    CHECK(s.train.observed_count() == 75);
    CHECK(s.fraction == 0.25);
    CHECK(s.seed == 7);
  }
  SUBCASE("deterministic") {
    const auto a = split_holdout(v, 0.25, 7);
    const auto b = split_holdout(v, 0.25, 7);
    CHECK(a.test == b.test);
    CHECK(a.train == b.train);
    CHECK(split_holdout(v, 0.25, 8).test != a.test);
  }
  SUBCASE("disjoint, sorted, and reconstructs the source") {
    const auto s = split_holdout(v, 0.3, 11);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& t : s.test) {
      CHECK_FALSE(s.train.is_observed(t.row, t.col));
      CHECK(seen.insert({t.row, t.col}).second);
    }
    CHECK(std::is_sorted(s.test.begin(), s.test.end(), [](const TestCell& a, const TestCell& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    }));
    CHECK(merge_holdout(s.train, s.test) == v);
  }
  SUBCASE("argument errors") {
    CHECK_THROWS_AS(split_holdout(v, 0.0, 1), ArgumentError);
    CHECK_THROWS_AS(split_holdout(v, 1.0, 1), ArgumentError);
    CHECK_THROWS_AS(split_holdout(v, -0.5, 1), ArgumentError);
    CHECK_THROWS_AS(split_holdout(BinaryMatrix::from_values(1, 1, {1}), 0.5, 1), ArgumentError);
  }
}

TEST_CASE("split then merge reconstructs random sources") {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto v = testgen::random_matrix(gen, 8, 8, 0.3);
    if (v.observed_count() < 4) continue;
    const auto s = split_holdout(v, 0.5, static_cast<std::uint64_t>(trial));
    CHECK(s.train.observed_count() + s.test.size() == v.observed_count());
    CHECK(merge_holdout(s.train, s.test) == v);
  }
}

TEST_CASE("test-cell files") {
  const std::vector<TestCell> cells{{0, 1, true}, {2, 0, false}, {3, 3, true}};
  const auto path = temp_file("test_cells.csv");
  write_test_cells(path, cells);
  CHECK(load_test_cells(path) == cells);
  CHECK_THROWS_AS(parse_test_cells("row,col,value\n1,2,7\n"), ParseError);
}
