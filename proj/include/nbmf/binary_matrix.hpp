#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nbmf {

enum class CellState : std::uint8_t { Zero = 0, One = 1, Missing = 2 };

struct CellIndex {
  std::size_t row;
  std::size_t col;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// F x N matrix of binary observations with missing entries.
///
/// Cells are stored densely. The row-major list of observed cells is the
/// iteration order used by every inference engine; an observed cell is
/// identified by its position in that list ("cell id").
class BinaryMatrix {
 public:
  BinaryMatrix(std::size_t rows, std::size_t cols, std::vector<CellState> cells);

  /// Fully observed matrix from 0/1 values in row-major order.
  static BinaryMatrix from_values(std::size_t rows, std::size_t cols,
                                  const std::vector<int>& values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  CellState at(std::size_t row, std::size_t col) const { return cells_[row * cols_ + col]; }
  bool is_observed(std::size_t row, std::size_t col) const {
    return at(row, col) != CellState::Missing;
  }

  const std::vector<CellIndex>& observed() const { return observed_; }
  std::size_t observed_count() const { return observed_.size(); }

  /// Cell id of (row, col), or nullopt when the cell is missing.
  std::optional<std::size_t> cell_id(std::size_t row, std::size_t col) const;

  /// Value (0/1) of an observed cell, addressed by cell id.
  bool value(std::size_t cell) const {
    const auto& ix = observed_[cell];
    return at(ix.row, ix.col) == CellState::One;
  }

  std::size_t row_observed(std::size_t row) const { return row_observed_[row]; }
  std::size_t col_observed(std::size_t col) const { return col_observed_[col]; }
  std::size_t ones() const { return ones_; }

  const std::vector<CellState>& cells() const { return cells_; }

  BinaryMatrix transposed() const;

  friend bool operator==(const BinaryMatrix& a, const BinaryMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.cells_ == b.cells_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<CellState> cells_;
  std::vector<CellIndex> observed_;
  std::vector<std::int64_t> id_;  // dense map cell -> observed id, -1 if missing
  std::vector<std::size_t> row_observed_;
  std::vector<std::size_t> col_observed_;
  std::size_t ones_ = 0;
};

struct CsvFormat {
  bool header = false;
  char delimiter = ',';
  std::vector<std::string> missing_tokens{"", "NA"};
};

BinaryMatrix parse_csv(const std::string& text, const CsvFormat& format = {});
BinaryMatrix load_csv(const std::filesystem::path& path, const CsvFormat& format = {});

/// Missing cells are written as "NA". A header row (c0,c1,...) is emitted
/// when format.header is set so the output loads back with the same format.
std::string to_csv(const BinaryMatrix& v, const CsvFormat& format = {});
void write_csv(const std::filesystem::path& path, const BinaryMatrix& v,
               const CsvFormat& format = {});

/// Fraction of observed cells equal to one.
double density(const BinaryMatrix& v);

struct TestCell {
  std::size_t row;
  std::size_t col;
  bool value;

  friend bool operator==(const TestCell&, const TestCell&) = default;
};

struct HoldoutSplit {
  BinaryMatrix train;
  std::vector<TestCell> test;  // row-major order
  double fraction;
  std::uint64_t seed;
};

/// Moves a uniform random subset of round(fraction * |observed|) observed
/// cells to the test set. Deterministic in seed.
HoldoutSplit split_holdout(const BinaryMatrix& v, double fraction, std::uint64_t seed);

/// Re-inserts test cells into a copy of train.
BinaryMatrix merge_holdout(const BinaryMatrix& train, const std::vector<TestCell>& test);

/// "row,col,value" with a header line.
void write_test_cells(const std::filesystem::path& path, const std::vector<TestCell>& cells);
std::vector<TestCell> load_test_cells(const std::filesystem::path& path);
std::vector<TestCell> parse_test_cells(const std::string& text);

}  // namespace nbmf
