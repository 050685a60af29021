#include "nbmf/io.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nbmf/errors.hpp"

namespace nbmf {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& token) {
  double x = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last)
    throw ArgumentError("not a number: '" + token + "'");
  return x;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string to_labeled_csv(const Eigen::MatrixXd& m, const std::string& row_prefix,
                           const std::string& col_prefix) {
  std::string out;
  for (Eigen::Index j = 0; j < m.cols(); ++j) out += "," + col_prefix + std::to_string(j);
  out += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += row_prefix + std::to_string(i);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_labeled_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                       const std::string& row_prefix, const std::string& col_prefix) {
  write_text_file(path, to_labeled_csv(m, row_prefix, col_prefix));
}

Eigen::MatrixXd parse_real_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto end = line.find(',', start);
      fields.push_back(line.substr(start, end == std::string::npos ? std::string::npos : end - start));
      if (end == std::string::npos) break;
      start = end + 1;
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw DimensionError("real matrix CSV is empty");

  // A leading empty field marks the labeled layout.
  const bool labeled = rows[0][0].empty();
  const std::size_t skip_rows = labeled ? 1 : 0;
  const std::size_t skip_cols = labeled ? 1 : 0;
  if (rows.size() <= skip_rows) throw DimensionError("real matrix CSV has no data rows");
  const std::size_t cols = rows[skip_rows].size() - skip_cols;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size() - skip_rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = skip_rows; r < rows.size(); ++r) {
    if (rows[r].size() - skip_cols != cols)
      throw DimensionError("ragged real matrix CSV at row " + std::to_string(r + 1));
    for (std::size_t c = 0; c < cols; ++c) {
      try {
        m(static_cast<Eigen::Index>(r - skip_rows), static_cast<Eigen::Index>(c)) =
            parse_double(rows[r][c + skip_cols]);
      } catch (const ArgumentError&) {
        throw ParseError("bad number '" + rows[r][c + skip_cols] + "'", r - skip_rows, c);
      }
    }
  }
  return m;
}

Eigen::MatrixXd load_real_csv(const std::filesystem::path& path) {
  return parse_real_csv(read_text_file(path));
}

std::string file_checksum(const std::filesystem::path& path) {
  const std::string bytes = read_text_file(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nbmf
