#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankcert/errors.hpp"
#include "rankcert/rational.hpp"

namespace rankcert {

// Dense complex matrix, row-major. When `exact` is set, `ax` holds
// Gaussian-rational entries and `a` mirrors their rounded values.
struct ComplexMatrix {
  int m = 0, n = 0;
  std::vector<Complex> a;
  bool exact = false;
  std::vector<GaussianRational> ax;

  ComplexMatrix() = default;
  ComplexMatrix(int m_, int n_, bool exact_ = false)
      : m(m_), n(n_), a(static_cast<std::size_t>(m_) * n_), exact(exact_) {
    if (m_ <= 0 || n_ <= 0)
      throw InvalidParams("matrix dimensions must be positive, got " +
                          std::to_string(m_) + "x" + std::to_string(n_));
    if (exact) ax.resize(static_cast<std::size_t>(m_) * n_);
  }

  Complex& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const Complex& at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

  GaussianRational& xat(int i, int j) { return ax[static_cast<std::size_t>(i) * n + j]; }
  const GaussianRational& xat(int i, int j) const {
    return ax[static_cast<std::size_t>(i) * n + j];
  }

  void set(int i, int j, Complex v) {
    if (exact) throw InvalidParams("exact matrix requires set_exact");
    at(i, j) = v;
  }

  void set_exact(int i, int j, const GaussianRational& v) {
    if (!exact) throw NotExact("matrix has no exact storage");
    xat(i, j) = v;
    at(i, j) = v.to_complex();
  }

  void drop_exact() {
    exact = false;
    ax.clear();
  }

  static ComplexMatrix identity(int n, bool exact = false) {
    ComplexMatrix M(n, n, exact);
    for (int i = 0; i < n; ++i) {
      if (exact)
        M.set_exact(i, i, GaussianRational(1));
      else
        M.at(i, i) = 1.0;
    }
    return M;
  }
};

struct SupportPattern {
  int m = 0, n = 0;
  std::vector<std::uint8_t> mask;

  SupportPattern() = default;
  SupportPattern(int m_, int n_) : m(m_), n(n_), mask(static_cast<std::size_t>(m_) * n_, 0) {
    if (m_ <= 0 || n_ <= 0)
      throw InvalidParams("pattern dimensions must be positive");
  }

  bool at(int i, int j) const { return mask[static_cast<std::size_t>(i) * n + j] != 0; }
  void set(int i, int j, bool v) { mask[static_cast<std::size_t>(i) * n + j] = v ? 1 : 0; }

  int row_support(int i) const {
    int c = 0;
    for (int j = 0; j < n; ++j) c += at(i, j);
    return c;
  }
  int col_support(int j) const {
    int c = 0;
    for (int i = 0; i < m; ++i) c += at(i, j);
    return c;
  }
};

// Nonzero mask. Exact matrices use the exact zero test and ignore the
// threshold; otherwise a cell is kept iff its magnitude exceeds it.
inline SupportPattern support_pattern(const ComplexMatrix& M, double zero_threshold = 0.0) {
  if (zero_threshold < 0) throw InvalidParams("zero_threshold must be nonnegative");
  SupportPattern P(M.m, M.n);
  for (int i = 0; i < M.m; ++i)
    for (int j = 0; j < M.n; ++j) {
      bool nz = M.exact ? !M.xat(i, j).is_zero() : std::abs(M.at(i, j)) > zero_threshold;
      P.set(i, j, nz);
    }
  return P;
}

// Conjugate-transpose product A* A (n x n, Hermitian PSD). Exactness is
// preserved when the input carries exact entries.
inline ComplexMatrix gram(const ComplexMatrix& M) {
  ComplexMatrix G(M.n, M.n, M.exact);
  for (int u = 0; u < M.n; ++u)
    for (int v = 0; v < M.n; ++v) {
      if (M.exact) {
        GaussianRational s;
        for (int i = 0; i < M.m; ++i) s += M.xat(i, u).conj() * M.xat(i, v);
        G.set_exact(u, v, s);
      } else {
        Complex s = 0;
        for (int i = 0; i < M.m; ++i) s += std::conj(M.at(i, u)) * M.at(i, v);
        G.at(u, v) = s;
      }
    }
  return G;
}

}  // namespace rankcert
