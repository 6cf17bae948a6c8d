#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rankcert/errors.hpp"
#include "rankcert/matrix.hpp"
#include "rankcert/maxflow.hpp"

namespace rankcert {

struct ScalingResult {
  std::vector<double> rho, gamma;
  double max_row_sq_norm = 0.0;
  double min_col_sq_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string note;
};

inline ComplexMatrix apply_scaling(const ComplexMatrix& M, const std::vector<double>& rho,
                                   const std::vector<double>& gamma) {
  if (static_cast<int>(rho.size()) != M.m || static_cast<int>(gamma.size()) != M.n)
    throw DimensionMismatch("scaling vectors must have lengths m and n");
  for (double r : rho)
    if (r == 0.0) throw InvalidParams("zero row coefficient");
  for (double g : gamma)
    if (g == 0.0) throw InvalidParams("zero column coefficient");
  ComplexMatrix R(M.m, M.n);
  for (int i = 0; i < M.m; ++i)
    for (int j = 0; j < M.n; ++j) R.at(i, j) = rho[i] * gamma[j] * M.at(i, j);
  return R;
}

inline std::vector<double> row_sq_norms(const ComplexMatrix& M) {
  std::vector<double> r(M.m, 0.0);
  for (int i = 0; i < M.m; ++i)
    for (int j = 0; j < M.n; ++j) r[i] += std::norm(M.at(i, j));
  return r;
}

inline std::vector<double> col_sq_norms(const ComplexMatrix& M) {
  std::vector<double> c(M.n, 0.0);
  for (int i = 0; i < M.m; ++i)
    for (int j = 0; j < M.n; ++j) c[j] += std::norm(M.at(i, j));
  return c;
}

// Feasibility of row sums n / column sums m on the support, as an integer
// max-flow problem. Equivalent to: every all-zero a x b submatrix satisfies
// a/m + b/n <= 1. The equivalence is cross-checked against the brute-force
// oracle in the test suite.
inline bool check_property_s_flow(const SupportPattern& P) {
  const int m = P.m, n = P.n;
  const int src = 0, snk = m + n + 1;
  Dinic net(m + n + 2);
  for (int i = 0; i < m; ++i) net.add_edge(src, 1 + i, n);
  for (int j = 0; j < n; ++j) net.add_edge(1 + m + j, snk, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (P.at(i, j)) net.add_edge(1 + i, 1 + m + j, static_cast<std::int64_t>(m) * n);
  return net.max_flow(src, snk) == static_cast<std::int64_t>(m) * n;
}

// Direct enumeration of all row subsets; only usable for small patterns.
inline bool check_property_s_bruteforce(const SupportPattern& P) {
  const int m = P.m, n = P.n;
  if (m > 16) throw TooLarge("brute-force check limited to m <= 16 rows");
  if (n > 64) throw TooLarge("brute-force check limited to n <= 64 columns");
  std::vector<std::uint64_t> zero_mask(m, 0);
  const std::uint64_t all = n == 64 ? ~0ull : ((1ull << n) - 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (!P.at(i, j)) zero_mask[i] |= 1ull << j;
  for (std::uint32_t sub = 1; sub < (1u << m); ++sub) {
    std::uint64_t cols = all;
    int a = 0;
    for (int i = 0; i < m; ++i)
      if (sub & (1u << i)) {
        cols &= zero_mask[i];
        ++a;
      }
    int b = __builtin_popcountll(cols);
    if (static_cast<std::int64_t>(a) * n + static_cast<std::int64_t>(b) * m >
        static_cast<std::int64_t>(m) * n)
      return false;
  }
  return true;
}

namespace detail {

// Row-then-column alternation on a dense table of squared magnitudes, with
// the stopping check right after each row pass. Returns the number of row
// passes performed and folds the factors into racc/cacc.
inline int alternate(std::vector<double>& S, int m, int n, double col_target, double eps,
                     int budget, std::vector<double>& racc, std::vector<double>& cacc,
                     bool& converged) {
  converged = false;
  if (budget <= 0) return 0;
  int used = 0;
  while (true) {
    for (int i = 0; i < m; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += S[static_cast<std::size_t>(i) * n + j];
      double f = 1.0 / s;
      for (int j = 0; j < n; ++j) S[static_cast<std::size_t>(i) * n + j] *= f;
      racc[i] *= f;
    }
    ++used;

    bool ok = true;
    for (int i = 0; ok && i < m; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += S[static_cast<std::size_t>(i) * n + j];
      ok = s <= 1.0 + eps;
    }
    for (int j = 0; ok && j < n; ++j) {
      double s = 0;
      for (int i = 0; i < m; ++i) s += S[static_cast<std::size_t>(i) * n + j];
      ok = s >= col_target - eps;
    }
    if (ok) {
      converged = true;
      return used;
    }
    if (used >= budget) return used;

    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int i = 0; i < m; ++i) s += S[static_cast<std::size_t>(i) * n + j];
      double f = col_target / s;
      for (int i = 0; i < m; ++i) S[static_cast<std::size_t>(i) * n + j] *= f;
      cacc[j] *= f;
    }
  }
}

// A tight split of a feasible support: rows R supported entirely inside
// columns C with |R|*n == |C|*m and 0 < |R| < m. Every scaling limit then
// carries no mass on (rows outside R) x C, so the blocks R x C and
// (rows outside R) x (columns outside C) scale independently. Found as a
// nontrivial min cut of the feasibility network, forcing one row at a time
// onto the source side.
struct TightSplit {
  std::vector<char> row_in, col_in;
};

inline std::optional<TightSplit> find_tight_split(const SupportPattern& P) {
  const int m = P.m, n = P.n;
  const std::int64_t whole = static_cast<std::int64_t>(m) * n;
  for (int force = 0; force < m; ++force) {
    const int src = 0, snk = m + n + 1;
    Dinic net(m + n + 2);
    for (int i = 0; i < m; ++i) net.add_edge(src, 1 + i, i == force ? whole + 1 : n);
    for (int j = 0; j < n; ++j) net.add_edge(1 + m + j, snk, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        if (P.at(i, j)) net.add_edge(1 + i, 1 + m + j, whole);
    if (net.max_flow(src, snk) != whole) return std::nullopt;
    auto side = net.min_cut_side(src);
    TightSplit split;
    split.row_in.assign(m, 0);
    split.col_in.assign(n, 0);
    std::int64_t a = 0, b = 0;
    for (int i = 0; i < m; ++i)
      if (side[1 + i]) {
        split.row_in[i] = 1;
        ++a;
      }
    for (int j = 0; j < n; ++j)
      if (side[1 + m + j]) {
        split.col_in[j] = 1;
        ++b;
      }
    if (a == m || a * n != b * m) continue;
    return split;
  }
  return std::nullopt;
}

// Scales the squared magnitudes of M to row sums 1 and column sums m/n by
// recursing on tight splits; blocks without one are strictly feasible and
// alternate quickly. Factors are written to racc/cacc in the squared domain;
// the mass of each discarded cross block is pushed below dying_budget with a
// free scalar. iter_pool is decremented by the row passes spent in leaves.
inline bool scale_by_splits(const ComplexMatrix& M, double eps_leaf, double dying_budget,
                            int& iter_pool, std::vector<double>& racc,
                            std::vector<double>& cacc) {
  const int m = M.m, n = M.n;
  racc.assign(m, 1.0);
  cacc.assign(n, 1.0);
  auto split = find_tight_split(support_pattern(M, 0.0));
  if (!split) {
    std::vector<double> S(static_cast<std::size_t>(m) * n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) S[static_cast<std::size_t>(i) * n + j] = std::norm(M.at(i, j));
    bool converged = false;
    iter_pool -= alternate(S, m, n, static_cast<double>(m) / n, eps_leaf, iter_pool, racc, cacc,
                           converged);
    return converged;
  }

  std::vector<int> rows1, rows2, cols1, cols2;
  for (int i = 0; i < m; ++i) (split->row_in[i] ? rows1 : rows2).push_back(i);
  for (int j = 0; j < n; ++j) (split->col_in[j] ? cols1 : cols2).push_back(j);
  ComplexMatrix M1(static_cast<int>(rows1.size()), static_cast<int>(cols1.size()));
  ComplexMatrix M2(static_cast<int>(rows2.size()), static_cast<int>(cols2.size()));
  for (std::size_t i = 0; i < rows1.size(); ++i)
    for (std::size_t j = 0; j < cols1.size(); ++j)
      M1.at(static_cast<int>(i), static_cast<int>(j)) = M.at(rows1[i], cols1[j]);
  for (std::size_t i = 0; i < rows2.size(); ++i)
    for (std::size_t j = 0; j < cols2.size(); ++j)
      M2.at(static_cast<int>(i), static_cast<int>(j)) = M.at(rows2[i], cols2[j]);

  std::vector<double> r1, c1, r2, c2;
  if (!scale_by_splits(M1, eps_leaf, dying_budget, iter_pool, r1, c1)) return false;
  if (!scale_by_splits(M2, eps_leaf, dying_budget, iter_pool, r2, c2)) return false;
  for (std::size_t i = 0; i < rows1.size(); ++i) racc[rows1[i]] = r1[i];
  for (std::size_t j = 0; j < cols1.size(); ++j) cacc[cols1[j]] = c1[j];
  for (std::size_t i = 0; i < rows2.size(); ++i) racc[rows2[i]] = r2[i];
  for (std::size_t j = 0; j < cols2.size(); ++j) cacc[cols2[j]] = c2[j];

  double dying = 0;
  for (int i : rows2)
    for (int j : cols1) dying += std::norm(M.at(i, j)) * racc[i] * cacc[j];
  if (dying > dying_budget) {
    double s = dying_budget / dying;
    for (int i : rows2) racc[i] *= s;
    for (int j : cols2) cacc[j] /= s;
  }
  return true;
}

}  // namespace detail

// Alternating row/column normalization of the squared magnitudes.
// Row pass scales each row sum to 1; column pass scales each column sum to
// m/n; termination is checked right after a row pass, so at convergence the
// scaled matrix has squared row norms <= 1+eps and squared column norms
// >= m/n - eps. Supports whose zero-pattern inequality is tight make the
// plain alternation stall at a 1/k rate, so after a warm-up phase a feasible
// support is decomposed along tight splits and the recombined factors are
// accepted only if they pass the same stopping check. Non-convergence is a
// soft outcome: `converged` is false and `note` records the Property-S
// verdict of the support for diagnosis.
inline ScalingResult sinkhorn_scale(const ComplexMatrix& M, double eps = 1e-6,
                                    int max_iter = 100000) {
  if (!(eps > 0)) throw InvalidParams("eps must be positive");
  if (max_iter < 1) throw InvalidParams("max_iter must be positive");
  const int m = M.m, n = M.n;
  std::vector<double> S(static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) S[static_cast<std::size_t>(i) * n + j] = std::norm(M.at(i, j));

  for (int i = 0; i < m; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += S[static_cast<std::size_t>(i) * n + j];
    if (s == 0) throw ZeroLine("row " + std::to_string(i) + " is identically zero");
  }
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int i = 0; i < m; ++i) s += S[static_cast<std::size_t>(i) * n + j];
    if (s == 0) throw ZeroLine("column " + std::to_string(j) + " is identically zero");
  }

  const double col_target = static_cast<double>(m) / n;
  std::vector<double> racc(m, 1.0), cacc(n, 1.0);
  ScalingResult res;
  bool converged = false;
  res.iterations += detail::alternate(S, m, n, col_target, eps, std::min(max_iter, 1024), racc,
                                      cacc, converged);

  if (!converged && res.iterations < max_iter &&
      check_property_s_flow(support_pattern(M, 0.0))) {
    const int initial_pool = max_iter - res.iterations - 1;
    int pool = initial_pool;
    bool did_verify = false;
    try {
      std::vector<double> rs, cs;
      if (pool > 0 &&
          detail::scale_by_splits(M, eps / 16, eps / (16.0 * m), pool, rs, cs)) {
        std::vector<double> T(static_cast<std::size_t>(m) * n);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < n; ++j)
            T[static_cast<std::size_t>(i) * n + j] = std::norm(M.at(i, j)) * rs[i] * cs[j];
        for (int i = 0; i < m; ++i) {
          double s = 0;
          for (int j = 0; j < n; ++j) s += T[static_cast<std::size_t>(i) * n + j];
          double f = 1.0 / s;
          for (int j = 0; j < n; ++j) T[static_cast<std::size_t>(i) * n + j] *= f;
          rs[i] *= f;
        }
        did_verify = true;
        bool ok = true;
        for (int j = 0; ok && j < n; ++j) {
          double s = 0;
          for (int i = 0; i < m; ++i) s += T[static_cast<std::size_t>(i) * n + j];
          ok = s >= col_target - eps;
        }
        if (ok) {
          racc = std::move(rs);
          cacc = std::move(cs);
          converged = true;
        }
      }
    } catch (const Error&) {
    }
    res.iterations += (initial_pool - pool) + (did_verify ? 1 : 0);
  }

  if (!converged && res.iterations < max_iter) {
    bool late = false;
    res.iterations += detail::alternate(S, m, n, col_target, eps, max_iter - res.iterations,
                                        racc, cacc, late);
    converged = late;
  }
  res.converged = converged;

  res.rho.resize(m);
  res.gamma.resize(n);
  for (int i = 0; i < m; ++i) res.rho[i] = std::sqrt(racc[i]);
  for (int j = 0; j < n; ++j) res.gamma[j] = std::sqrt(cacc[j]);

  ComplexMatrix scaled = apply_scaling(M, res.rho, res.gamma);
  auto rs = row_sq_norms(scaled);
  auto cs = col_sq_norms(scaled);
  res.max_row_sq_norm = *std::max_element(rs.begin(), rs.end());
  res.min_col_sq_norm = *std::min_element(cs.begin(), cs.end());
  if (!res.converged) {
    bool prop_s = check_property_s_flow(support_pattern(M, 0.0));
    res.note = std::string("iteration cap reached; support satisfies the zero-submatrix "
                           "feasibility condition: ") +
               (prop_s ? "true" : "false");
  }
  return res;
}

}  // namespace rankcert
