#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "nbmf/errors.hpp"
#include "nbmf/io.hpp"

using namespace nbmf;

TEST_CASE("format_double round-trips") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = d(gen);
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  CHECK(parse_double(format_double(std::numeric_limits<double>::denorm_min())) ==
        std::numeric_limits<double>::denorm_min());
  CHECK_THROWS_AS(parse_double("0.5x"), ArgumentError);
  CHECK_THROWS_AS(parse_double(""), ArgumentError);
}

TEST_CASE("labeled CSV round trip") {
  Eigen::MatrixXd m(2, 3);
  m << 0.1, 0.2, 0.7, 1.0 / 3.0, 0.0, 2.0 / 3.0;
  const auto text = to_labeled_csv(m, "f", "k");
  CHECK(text.rfind(",k0,k1,k2\nf0,", 0) == 0);
  CHECK(parse_real_csv(text) == m);
  CHECK(parse_real_csv("0.5,0.25\n1,0\n") == (Eigen::MatrixXd(2, 2) << 0.5, 0.25, 1, 0).finished());
  CHECK_THROWS(parse_real_csv("0.5,0.25\n1\n"));
}

TEST_CASE("files and checksums") {
  const auto dir = std::filesystem::temp_directory_path() / "nbmf_test_io";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "a.txt", "hello\n");
  write_text_file(dir / "b.txt", "hello\n");
  write_text_file(dir / "c.txt", "hellp\n");
  CHECK(read_text_file(dir / "a.txt") == "hello\n");
  CHECK(file_checksum(dir / "a.txt") == file_checksum(dir / "b.txt"));
  CHECK(file_checksum(dir / "a.txt") != file_checksum(dir / "c.txt"));
  CHECK(file_checksum(dir / "a.txt").size() == 16);
  // FNV-1a of the empty input is the offset basis
  write_text_file(dir / "empty.txt", "");
  CHECK(file_checksum(dir / "empty.txt") == "cbf29ce484222325");
  CHECK_THROWS_AS(read_text_file(dir / "missing.txt"), IoError);

  Eigen::MatrixXd m = Eigen::MatrixXd::Random(4, 3);
  write_labeled_csv(dir / "m.csv", m, "f", "n");
  CHECK(load_real_csv(dir / "m.csv") == m);
}
