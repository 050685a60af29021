#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace nbmf {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double x);

/// Parses a full token as a double; throws ArgumentError otherwise.
double parse_double(const std::string& token);

/// Real matrix as CSV with a header row of column labels and a leading
/// column of row labels, e.g. for W: ",k0,k1\nf0,0.25,0.75\n...".
std::string to_labeled_csv(const Eigen::MatrixXd& m, const std::string& row_prefix,
                           const std::string& col_prefix);
void write_labeled_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                       const std::string& row_prefix, const std::string& col_prefix);

/// Reads a real matrix written by write_labeled_csv. Plain numeric CSV
/// without labels is accepted as well.
Eigen::MatrixXd parse_real_csv(const std::string& text);
Eigen::MatrixXd load_real_csv(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace nbmf
