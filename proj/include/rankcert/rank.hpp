#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "rankcert/errors.hpp"
#include "rankcert/matrix.hpp"

namespace rankcert {

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& M) {
  Eigen::MatrixXcd E(M.m, M.n);
  for (int i = 0; i < M.m; ++i)
    for (int j = 0; j < M.n; ++j) E(i, j) = M.at(i, j);
  return E;
}

// Count of singular values exceeding rel_tol times the largest one.
inline int rank_numeric(const ComplexMatrix& M, double rel_tol = 1e-8) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw InvalidParams("rel_tol must lie in (0,1)");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(to_eigen(M));
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  double cut = rel_tol * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

// Exact rank over the Gaussian rationals: row elimination with zero pivots
// skipped, so sparse inputs stay cheap.
inline int rank_exact(const ComplexMatrix& M) {
  if (!M.exact) throw NotExact("rank_exact requires exact entries");
  const int m = M.m, n = M.n;
  std::vector<GaussianRational> w = M.ax;
  auto cell = [&](int i, int j) -> GaussianRational& {
    return w[static_cast<std::size_t>(i) * n + j];
  };
  int rank = 0;
  for (int c = 0; c < n && rank < m; ++c) {
    int p = -1;
    for (int i = rank; i < m; ++i)
      if (!cell(i, c).is_zero()) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != rank)
      std::swap_ranges(w.begin() + static_cast<std::size_t>(p) * n,
                       w.begin() + static_cast<std::size_t>(p + 1) * n,
                       w.begin() + static_cast<std::size_t>(rank) * n);
    const GaussianRational piv = cell(rank, c);
    for (int i = rank + 1; i < m; ++i) {
      if (cell(i, c).is_zero()) continue;
      GaussianRational f = cell(i, c) / piv;
      cell(i, c) = GaussianRational();
      for (int j = c + 1; j < n; ++j) {
        if (cell(rank, j).is_zero()) continue;
        cell(i, j) -= f * cell(rank, j);
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace rankcert
