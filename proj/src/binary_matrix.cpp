#include "nbmf/binary_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nbmf/errors.hpp"
#include "nbmf/io.hpp"
#include "nbmf/random.hpp"

namespace nbmf {

BinaryMatrix::BinaryMatrix(std::size_t rows, std::size_t cols, std::vector<CellState> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("binary matrix must have at least one row and one column");
  if (cells_.size() != rows_ * cols_)
    throw DimensionError("binary matrix expects " + std::to_string(rows_ * cols_) + " cells, got " +
                         std::to_string(cells_.size()));
  id_.assign(cells_.size(), -1);
  row_observed_.assign(rows_, 0);
  col_observed_.assign(cols_, 0);
  for (std::size_t f = 0; f < rows_; ++f) {
    for (std::size_t n = 0; n < cols_; ++n) {
      const CellState s = cells_[f * cols_ + n];
      if (s == CellState::Missing) continue;
      if (s != CellState::Zero && s != CellState::One) throw ArgumentError("invalid cell state");
      id_[f * cols_ + n] = static_cast<std::int64_t>(observed_.size());
      observed_.push_back({f, n});
      ++row_observed_[f];
      ++col_observed_[n];
      if (s == CellState::One) ++ones_;
    }
  }
}

BinaryMatrix BinaryMatrix::from_values(std::size_t rows, std::size_t cols,
                                       const std::vector<int>& values) {
  std::vector<CellState> cells;
  cells.reserve(values.size());
  for (int x : values) {
    if (x != 0 && x != 1) throw ArgumentError("from_values expects 0/1 entries");
    cells.push_back(x == 1 ? CellState::One : CellState::Zero);
  }
  return BinaryMatrix(rows, cols, std::move(cells));
}

std::optional<std::size_t> BinaryMatrix::cell_id(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) return std::nullopt;
  const auto id = id_[row * cols_ + col];
  if (id < 0) return std::nullopt;
  return static_cast<std::size_t>(id);
}

BinaryMatrix BinaryMatrix::transposed() const {
  std::vector<CellState> cells(cells_.size());
  for (std::size_t f = 0; f < rows_; ++f)
    for (std::size_t n = 0; n < cols_; ++n) cells[n * rows_ + f] = cells_[f * cols_ + n];
  return BinaryMatrix(cols_, rows_, std::move(cells));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto end = line.find(delimiter, start);
    if (end == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, end - start)));
    start = end + 1;
  }
}

}  // namespace

BinaryMatrix parse_csv(const std::string& text, const CsvFormat& format) {
  auto lines = split_lines(text);
  std::size_t first = format.header ? 1 : 0;
  if (lines.size() <= first) throw DimensionError("CSV input has no data rows");

  std::vector<CellState> cells;
  std::size_t cols = 0;
  for (std::size_t r = first; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r], format.delimiter);
    const std::size_t row = r - first;
    if (row == 0) {
      cols = fields.size();
    } else if (fields.size() != cols) {
      throw DimensionError("ragged CSV: row " + std::to_string(row + 1) + " has " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(cols));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto tok = fields[c];
      if (tok == "1") {
        cells.push_back(CellState::One);
      } else if (tok == "0") {
        cells.push_back(CellState::Zero);
      } else if (std::find(format.missing_tokens.begin(), format.missing_tokens.end(), tok) !=
                 format.missing_tokens.end()) {
        cells.push_back(CellState::Missing);
      } else {
        throw ParseError("unexpected token '" + std::string(tok) + "'", row, c);
      }
    }
  }
  return BinaryMatrix(lines.size() - first, cols, std::move(cells));
}

BinaryMatrix load_csv(const std::filesystem::path& path, const CsvFormat& format) {
  return parse_csv(read_text_file(path), format);
}

std::string to_csv(const BinaryMatrix& v, const CsvFormat& format) {
  std::string out;
  out.reserve(v.rows() * v.cols() * 2 + 16);
  if (format.header) {
    for (std::size_t n = 0; n < v.cols(); ++n) {
      if (n) out += format.delimiter;
      out += "c" + std::to_string(n);
    }
    out += '\n';
  }
  for (std::size_t f = 0; f < v.rows(); ++f) {
    for (std::size_t n = 0; n < v.cols(); ++n) {
      if (n) out += format.delimiter;
      switch (v.at(f, n)) {
        case CellState::Zero: out += '0'; break;
        case CellState::One: out += '1'; break;
        case CellState::Missing: out += "NA"; break;
      }
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const BinaryMatrix& v, const CsvFormat& format) {
  write_text_file(path, to_csv(v, format));
}

double density(const BinaryMatrix& v) {
  if (v.observed_count() == 0) throw ArgumentError("density of a matrix without observed cells");
  return static_cast<double>(v.ones()) / static_cast<double>(v.observed_count());
}

HoldoutSplit split_holdout(const BinaryMatrix& v, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ArgumentError("holdout fraction must lie in (0, 1)");
  const std::size_t total = v.observed_count();
  if (total < 2) throw ArgumentError("holdout split needs at least two observed cells");
  const auto n_test = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  if (n_test == 0 || n_test == total)
    throw ArgumentError("holdout fraction leaves the train or test side empty");

  // partial Fisher-Yates over cell ids
  std::vector<std::size_t> ids(total);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(seed, streams::kSplit);
  for (std::size_t i = 0; i < n_test; ++i) std::swap(ids[i], ids[i + rng.index(total - i)]);
  std::vector<std::size_t> picked(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::sort(picked.begin(), picked.end());

  std::vector<CellState> cells = v.cells();
  std::vector<TestCell> test;
  test.reserve(n_test);
  for (std::size_t id : picked) {
    const auto [f, n] = v.observed()[id];
    test.push_back({f, n, v.value(id)});
    cells[f * v.cols() + n] = CellState::Missing;
  }
  return HoldoutSplit{BinaryMatrix(v.rows(), v.cols(), std::move(cells)), std::move(test), fraction,
                      seed};
}

BinaryMatrix merge_holdout(const BinaryMatrix& train, const std::vector<TestCell>& test) {
  std::vector<CellState> cells = train.cells();
  for (const auto& t : test) {
    if (t.row >= train.rows() || t.col >= train.cols())
      throw DimensionError("test cell outside the train matrix");
    auto& c = cells[t.row * train.cols() + t.col];
    if (c != CellState::Missing) throw ArgumentError("test cell overlaps an observed train cell");
    c = t.value ? CellState::One : CellState::Zero;
  }
  return BinaryMatrix(train.rows(), train.cols(), std::move(cells));
}

std::vector<TestCell> parse_test_cells(const std::string& text) {
  const auto lines = split_lines(text);
  std::vector<TestCell> cells;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r], ',');
    if (r == 0 && !fields.empty() && fields[0] == "row") continue;
    if (fields.size() != 3)
      throw DimensionError("test cell line " + std::to_string(r + 1) + " needs 3 fields");
    std::size_t idx[2];
    for (int i = 0; i < 2; ++i) {
      const std::string tok(fields[i]);
      if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("bad index '" + tok + "'", r, static_cast<std::size_t>(i));
      idx[i] = std::stoull(tok);
    }
    if (fields[2] != "0" && fields[2] != "1")
      throw ParseError("bad value '" + std::string(fields[2]) + "'", r, 2);
    cells.push_back({idx[0], idx[1], fields[2] == "1"});
  }
  return cells;
}

std::vector<TestCell> load_test_cells(const std::filesystem::path& path) {
  return parse_test_cells(read_text_file(path));
}

void write_test_cells(const std::filesystem::path& path, const std::vector<TestCell>& cells) {
  std::string out = "row,col,value\n";
  for (const auto& c : cells)
    out += std::to_string(c.row) + "," + std::to_string(c.col) + "," + (c.value ? "1" : "0") + "\n";
  write_text_file(path, out);
}

}  // namespace nbmf
