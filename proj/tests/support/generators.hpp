#pragma once

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include "nbmf/binary_matrix.hpp"
#include "nbmf/config.hpp"

namespace nbmf::testgen {

// Small random instances for property tests. These use their own
// std::mt19937_64 so that instance generation never shares draws with the
// code under test.

inline BinaryMatrix random_matrix(std::mt19937_64& gen, std::size_t max_rows, std::size_t max_cols,
                                  double missing_prob) {
  std::uniform_int_distribution<std::size_t> rows_d(1, max_rows), cols_d(1, max_cols);
  std::bernoulli_distribution miss(missing_prob), one(0.5);
  const std::size_t rows = rows_d(gen), cols = cols_d(gen);
  for (;;) {
    std::vector<CellState> cells(rows * cols);
    std::size_t observed = 0;
    for (auto& c : cells) {
      if (miss(gen)) {
        c = CellState::Missing;
      } else {
        c = one(gen) ? CellState::One : CellState::Zero;
        ++observed;
      }
    }
    if (observed > 0) return BinaryMatrix(rows, cols, std::move(cells));
  }
}

inline BinaryMatrix random_matrix_with_cells(std::mt19937_64& gen, std::size_t rows, std::size_t cols,
                                             std::size_t observed) {
  std::vector<std::size_t> pos(rows * cols);
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
  std::shuffle(pos.begin(), pos.end(), gen);
  std::vector<CellState> cells(rows * cols, CellState::Missing);
  std::bernoulli_distribution one(0.5);
  for (std::size_t i = 0; i < observed; ++i) cells[pos[i]] = one(gen) ? CellState::One : CellState::Zero;
  return BinaryMatrix(rows, cols, std::move(cells));
}

inline std::vector<double> random_vector(std::mt19937_64& gen, std::size_t k, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(k);
  for (auto& x : v) x = d(gen);
  return v;
}

inline HyperParams random_betadir_hyper(std::mt19937_64& gen, std::size_t k, double lo, double hi) {
  HyperParams h;
  h.k = k;
  h.alpha = random_vector(gen, k, lo, hi);
  h.beta = random_vector(gen, k, lo, hi);
  h.gamma = random_vector(gen, k, lo, hi);
  return h;
}

inline HyperParams random_dirdir_hyper(std::mt19937_64& gen, std::size_t k, double lo, double hi) {
  HyperParams h;
  h.k = k;
  h.gamma = random_vector(gen, k, lo, hi);
  h.eta = random_vector(gen, k, lo, hi);
  return h;
}

inline std::vector<int> random_assignment(std::mt19937_64& gen, std::size_t n, std::size_t k) {
  std::uniform_int_distribution<int> d(0, static_cast<int>(k) - 1);
  std::vector<int> z(n);
  for (auto& x : z) x = d(gen);
  return z;
}

// Constraint-valid (z, c) for Dir-Dir: equal on ones, different on zeros.
inline void random_valid_pairs(std::mt19937_64& gen, const BinaryMatrix& v, std::size_t k,
                               std::vector<int>& z, std::vector<int>& c) {
  std::uniform_int_distribution<int> d(0, static_cast<int>(k) - 1);
  std::uniform_int_distribution<int> other(1, static_cast<int>(k) - 1);
  z.resize(v.observed_count());
  c.resize(v.observed_count());
  for (std::size_t i = 0; i < v.observed_count(); ++i) {
    z[i] = d(gen);
    c[i] = v.value(i) ? z[i] : (z[i] + other(gen)) % static_cast<int>(k);
  }
}

}  // namespace nbmf::testgen
