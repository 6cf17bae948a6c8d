#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rankcert/errors.hpp"
#include "rankcert/matrix.hpp"
#include "rankcert/rank.hpp"
#include "rankcert/rational.hpp"
#include "rankcert/scaling.hpp"

namespace rankcert {

// q: max row support, k: min column support, t: max pairwise column
// support intersection.
struct DesignParams {
  int q = 0, k = 0, t = 0;
  int m = 0, n = 0;
  bool uniform_q = false;
};

inline DesignParams design_params(const SupportPattern& P) {
  DesignParams d;
  d.m = P.m;
  d.n = P.n;
  int qmax = 0, qmin = P.n + 1;
  std::vector<std::vector<int>> row_cols(P.m);
  for (int i = 0; i < P.m; ++i) {
    for (int j = 0; j < P.n; ++j)
      if (P.at(i, j)) row_cols[i].push_back(j);
    int s = static_cast<int>(row_cols[i].size());
    qmax = std::max(qmax, s);
    qmin = std::min(qmin, s);
  }
  d.q = qmax;
  d.uniform_q = qmin == qmax;
  int kmin = P.m;
  for (int j = 0; j < P.n; ++j) kmin = std::min(kmin, P.col_support(j));
  d.k = kmin;
  std::unordered_map<std::uint64_t, int> pair_count;
  int t = 0;
  for (int i = 0; i < P.m; ++i)
    for (std::size_t a = 0; a < row_cols[i].size(); ++a)
      for (std::size_t b = a + 1; b < row_cols[i].size(); ++b) {
        std::uint64_t key =
            static_cast<std::uint64_t>(row_cols[i][a]) * P.n + row_cols[i][b];
        t = std::max(t, ++pair_count[key]);
      }
  d.t = t;
  return d;
}

// n / (1 + q(q-1)mt / (nk^2)), exact.
inline Rational rank_bound_main(long long q, long long k, long long t, long long m,
                                long long n) {
  if (k < 1) throw InvalidParams("rank bound requires k >= 1");
  if (q < 0 || t < 0 || m < 0 || n < 1) throw InvalidParams("negative design parameter");
  Int base = Int(n) * k * k;
  return Rational(Int(n) * base, base + Int(q) * (q - 1) * m * t);
}

// The weaker linear form n - mtq(q-1)/k^2.
inline Rational rank_bound_main_linear(long long q, long long k, long long t, long long m,
                                       long long n) {
  if (k < 1) throw InvalidParams("rank bound requires k >= 1");
  return Rational(n) - Rational(Int(m) * t * q * (q - 1), Int(k) * k);
}

// n / (1 + q(q-1)t/k); equals rank_bound_main at m = nk.
inline Rational rank_bound_cor_no_m(long long q, long long k, long long t, long long n) {
  if (k < 1) throw InvalidParams("rank bound requires k >= 1");
  return Rational(Int(n) * k, Int(k) + Int(q) * (q - 1) * t);
}

// Same corollary with a fractional intersection parameter; used to probe
// what happens when the worst-case t is replaced by an average.
inline Rational rank_bound_cor_no_m(long long q, long long k, const Rational& t,
                                    long long n) {
  if (k < 1) throw InvalidParams("rank bound requires k >= 1");
  return Rational(Int(n) * k) / (Rational(k) + Rational(Int(q) * (q - 1)) * t);
}

// n - 6mn^2 t^3 / k^4; only valid when k <= nt, absent otherwise.
inline std::optional<Rational> rank_bound_avgq(long long k, long long t, long long m,
                                               long long n) {
  if (k < 1 || t < 1 || k > n * t) return std::nullopt;
  return Rational(n) - Rational(Int(6) * m * n * n * t * t * t, Int(k) * k * k * k);
}

// Max over retained column counts n' and cover multiplicities c of
// n' / (1 + c^2 m t (1 - 1/q') / (n' k^2)), with c = q (keeping the 1-1/q
// factor) or c = 2*ceil(2n't/k) (dropping it; needs t >= 1 and k <= n't).
// Deleting columns preserves the design parameters, so every candidate is a
// valid rank floor.
inline Rational rank_bound_unified(long long q, long long k, long long t, long long m,
                                   long long n) {
  if (k < 1) throw InvalidParams("rank bound requires k >= 1");
  if (q < 0 || t < 0 || m < 0 || n < 1) throw InvalidParams("negative design parameter");
  Rational best(0);
  for (long long np = 1; np <= n; ++np) {
    Int base = Int(np) * k * k;
    if (q >= 1) {
      Rational cand(Int(np) * base, base + Int(q) * (q - 1) * m * t);
      best = std::max(best, cand);
    }
    if (t >= 1 && k <= np * t) {
      Int c = 2 * ceil_div(Int(2) * np * t, Int(k));
      Rational cand(Int(np) * base, base + c * c * m * t);
      best = std::max(best, cand);
    }
  }
  return best;
}

// Square specialization (m = n) of the unified bound.
inline Rational rank_bound_square(long long q, long long k, long long t, long long n) {
  return rank_bound_unified(q, k, t, n, n);
}

// B is built from rows of A; origin[r] names the A-row copied into row r.
struct CoverMatrix {
  ComplexMatrix B;
  std::vector<int> origin;
  int multiplicity = 0;
  long long c_target = 0;
};

namespace detail {

inline void copy_row(const ComplexMatrix& src, int si, ComplexMatrix& dst, int di) {
  for (int j = 0; j < src.n; ++j) {
    if (dst.exact)
      dst.set_exact(di, j, src.xat(si, j));
    else
      dst.at(di, j) = src.at(si, j);
  }
}

inline int measure_multiplicity(const std::vector<int>& origin, int m) {
  std::vector<int> cnt(m, 0);
  int best = 0;
  for (int i : origin) best = std::max(best, ++cnt[i]);
  return best;
}

}  // namespace detail

// For each column, stack its k lowest-index supporting rows; every A-row is
// reused at most q times and the result keeps a nonzero generalized diagonal
// in each of the k layers.
inline CoverMatrix build_q_cover(const ComplexMatrix& M) {
  SupportPattern P = support_pattern(M, 0.0);
  DesignParams d = design_params(P);
  if (d.k < 1) throw InsufficientSupport("a column has empty support");
  CoverMatrix cov;
  cov.B = ComplexMatrix(d.n * d.k, d.n, M.exact);
  cov.origin.resize(static_cast<std::size_t>(d.n) * d.k);
  int r = 0;
  for (int j = 0; j < d.n; ++j) {
    int taken = 0;
    for (int i = 0; i < d.m && taken < d.k; ++i) {
      if (!P.at(i, j)) continue;
      detail::copy_row(M, i, cov.B, r);
      cov.origin[r] = i;
      ++r;
      ++taken;
    }
    if (taken < d.k)
      throw InsufficientSupport("column " + std::to_string(j) + " has support below k");
  }
  cov.multiplicity = detail::measure_multiplicity(cov.origin, d.m);
  cov.c_target = d.q;
  return cov;
}

// Partition the columns into ceil(2nt/k) balanced groups; each column then
// keeps at least ceil(k/2) rows hitting no other column of its group, which
// are duplicated to contribute exactly k rows. Row reuse stays below
// 2*ceil(2nt/k) <= 6nt/k.
inline CoverMatrix build_group_cover(const ComplexMatrix& M) {
  SupportPattern P = support_pattern(M, 0.0);
  DesignParams d = design_params(P);
  if (d.k < 1) throw InsufficientSupport("a column has empty support");
  if (d.t < 1) throw InvalidParams("group cover requires t >= 1");
  if (static_cast<long long>(d.k) > static_cast<long long>(d.n) * d.t)
    throw InvalidParams("group cover requires k <= n*t");
  const int ell = static_cast<int>(
      ceil_div(Int(2) * d.n * d.t, Int(d.k)).convert_to<long long>());
  const int half = (d.k + 1) / 2;
  CoverMatrix cov;
  cov.B = ComplexMatrix(d.n * d.k, d.n, M.exact);
  cov.origin.resize(static_cast<std::size_t>(d.n) * d.k);
  int r = 0;
  for (int g = 0; g < ell; ++g) {
    const int lo = static_cast<int>(static_cast<long long>(g) * d.n / ell);
    const int hi = static_cast<int>(static_cast<long long>(g + 1) * d.n / ell);
    for (int j = lo; j < hi; ++j) {
      std::vector<int> priv;
      for (int i = 0; i < d.m && static_cast<int>(priv.size()) < half; ++i) {
        if (!P.at(i, j)) continue;
        bool shared = false;
        for (int j2 = lo; j2 < hi && !shared; ++j2)
          if (j2 != j && P.at(i, j2)) shared = true;
        if (!shared) priv.push_back(i);
      }
      if (static_cast<int>(priv.size()) < half)
        throw GroupConstructionFailed("column " + std::to_string(j) +
                                      " has fewer than ceil(k/2) private rows");
      for (int idx = 0; idx < half; ++idx) {
        int copies = (idx == half - 1 && d.k % 2 == 1) ? 1 : 2;
        for (int cpy = 0; cpy < copies; ++cpy) {
          detail::copy_row(M, priv[idx], cov.B, r);
          cov.origin[r] = priv[idx];
          ++r;
        }
      }
    }
  }
  cov.multiplicity = detail::measure_multiplicity(cov.origin, d.m);
  cov.c_target = 2LL * ell;
  return cov;
}

// Transfer a scaling of the cover back to A: columns keep the cover's
// coefficients, each covered row takes the max over its copies, and rows
// absent from the cover are normalized to unit length. Guarantees squared
// row norms <= 1+eps and squared column norms >= (k-eps)/c.
inline ScalingResult cover_to_scaling(const ComplexMatrix& M, const CoverMatrix& cover,
                                      double eps = 1e-6) {
  if (cover.B.n != M.n) throw DimensionMismatch("cover has a different column count");
  ScalingResult sb = sinkhorn_scale(cover.B, eps);
  if (!sb.converged)
    throw NonConvergence("cover scaling hit the iteration cap; " + sb.note);
  ScalingResult res;
  res.gamma = sb.gamma;
  res.rho.assign(M.m, 0.0);
  for (std::size_t p = 0; p < cover.origin.size(); ++p)
    res.rho[cover.origin[p]] = std::max(res.rho[cover.origin[p]], sb.rho[p]);
  auto rn = row_sq_norms(M);
  for (int i = 0; i < M.m; ++i)
    if (res.rho[i] == 0.0) res.rho[i] = rn[i] > 0 ? 1.0 / std::sqrt(rn[i]) : 1.0;
  ComplexMatrix scaled = apply_scaling(M, res.rho, res.gamma);
  auto rs = row_sq_norms(scaled);
  auto cs = col_sq_norms(scaled);
  res.max_row_sq_norm = *std::max_element(rs.begin(), rs.end());
  res.min_col_sq_norm = *std::min_element(cs.begin(), cs.end());
  res.iterations = sb.iterations;
  res.converged = true;
  return res;
}

namespace detail {

inline void require_hermitian(const ComplexMatrix& G) {
  if (G.m != G.n) throw NotHermitian("matrix is not square");
  if (G.exact) {
    for (int i = 0; i < G.m; ++i)
      for (int j = i; j < G.n; ++j)
        if (!(G.xat(i, j) == G.xat(j, i).conj()))
          throw NotHermitian("exact entries are not conjugate-symmetric");
    return;
  }
  double scale = 0;
  for (const Complex& z : G.a) scale = std::max(scale, std::abs(z));
  double tol = 1e-9 * (1 + scale);
  for (int i = 0; i < G.m; ++i)
    for (int j = i; j < G.n; ++j)
      if (std::abs(G.at(i, j) - std::conj(G.at(j, i))) > tol)
        throw NotHermitian("entries are not conjugate-symmetric");
}

}  // namespace detail

inline double offdiag_sq_sum(const ComplexMatrix& G) {
  detail::require_hermitian(G);
  double s = 0;
  for (int i = 0; i < G.m; ++i)
    for (int j = 0; j < G.n; ++j)
      if (i != j) s += std::norm(G.at(i, j));
  return s;
}

// Off-diagonal mass bound (1 - 1/q) t m alpha^4 for the Gram matrix of an
// m-row matrix with row norms < alpha, row supports <= q and pairwise column
// support intersections <= t.
inline bool offdiag_within_bound(const ComplexMatrix& G, long long t, long long m,
                                 double alpha, long long q) {
  if (q < 1) throw InvalidParams("q must be at least 1");
  if (t < 0 || m < 0 || alpha < 0) throw InvalidParams("negative parameter");
  double sum = offdiag_sq_sum(G);
  double bound = (1.0 - 1.0 / static_cast<double>(q)) * static_cast<double>(t) *
                 static_cast<double>(m) * alpha * alpha * alpha * alpha;
  return sum <= bound * (1 + 1e-9) + 1e-12;
}

// n^2 L^2 / (nL^2 + sum_{i != j} |G_ij|^2) for Hermitian G with diagonal
// entries at least L.
inline Rational diag_dominant_rank_bound(const ComplexMatrix& G, double L) {
  if (!(L > 0)) throw InvalidParams("L must be positive");
  detail::require_hermitian(G);
  const int n = G.n;
  double tol = 1e-9 * (1 + std::abs(L));
  for (int i = 0; i < n; ++i)
    if (G.at(i, i).real() < L - tol)
      throw DiagonalTooSmall("diagonal entry " + std::to_string(i) + " is below L");
  Rational Lr = rational_from_double(L);
  Rational off(0);
  if (G.exact) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) off += G.xat(i, j).norm_sq();
  } else {
    off = rational_from_double(offdiag_sq_sum(G));
  }
  Rational nl2 = Rational(n) * Lr * Lr;
  return Rational(n) * nl2 / (nl2 + off);
}

// m * C(q,2) <= C(n,2) * t, for patterns whose rows all have support
// exactly q.
inline bool triple_count_check(const SupportPattern& P) {
  DesignParams d = design_params(P);
  for (int i = 0; i < P.m; ++i)
    if (P.row_support(i) != d.q)
      throw NonUniformRows("row " + std::to_string(i) + " has support != q");
  Int lhs = Int(d.m) * d.q * (d.q - 1) / 2;
  Int rhs = Int(d.n) * (d.n - 1) / 2 * d.t;
  return lhs <= rhs;
}

struct RankBoundReport {
  DesignParams params;
  Rational bound_main{0};
  Rational bound_main_linear{0};
  Rational bound_cor_no_m{0};
  std::optional<Rational> bound_avgq;
  std::optional<Rational> bound_square;
  Rational bound_unified{0};
  long long certified = 0;
  std::optional<long long> actual_rank;
  std::vector<std::string> notes;
};

namespace detail {

inline RankBoundReport bound_report(const DesignParams& d) {
  RankBoundReport rep;
  rep.params = d;
  if (d.k < 1) {
    rep.notes.push_back("a column has empty support; closed-form bounds need k >= 1");
    return rep;
  }
  rep.bound_main = rank_bound_main(d.q, d.k, d.t, d.m, d.n);
  rep.bound_main_linear = rank_bound_main_linear(d.q, d.k, d.t, d.m, d.n);
  rep.bound_cor_no_m = rank_bound_cor_no_m(d.q, d.k, d.t, d.n);
  rep.bound_avgq = rank_bound_avgq(d.k, d.t, d.m, d.n);
  if (!rep.bound_avgq)
    rep.notes.push_back("average-degree bound skipped: needs t >= 1 and k <= n*t");
  rep.bound_unified = rank_bound_unified(d.q, d.k, d.t, d.m, d.n);
  if (d.m == d.n) rep.bound_square = rep.bound_unified;
  Rational best = std::max({rep.bound_main, rep.bound_cor_no_m, rep.bound_unified});
  if (rep.bound_avgq) best = std::max(best, *rep.bound_avgq);
  if (rep.bound_square) best = std::max(best, *rep.bound_square);
  Int c = ceil_rational(best);
  if (c < 0) c = 0;
  Int cap = std::min(d.m, d.n);
  if (c > cap) c = cap;
  rep.certified = c.convert_to<long long>();
  if (rep.certified == 0)
    rep.notes.push_back("best bound is vacuous (certifies rank 0)");
  return rep;
}

}  // namespace detail

// Evaluate every applicable closed-form bound on the measured parameters.
inline RankBoundReport analyze(const ComplexMatrix& M, bool compute_actual = false) {
  DesignParams d = design_params(support_pattern(M, 0.0));
  RankBoundReport rep = detail::bound_report(d);
  if (compute_actual)
    rep.actual_rank = M.exact ? rank_exact(M) : rank_numeric(M);
  return rep;
}

// A rank floor that survives every perturbation supported inside the
// pattern with at most s changes per column: any such perturbed matrix is
// still a (q, k-s, t) design, so the bounds apply with k lowered to k-s.
inline RankBoundReport monotone_rigidity_certificate(const ComplexMatrix& M, long long s) {
  if (M.m != M.n) throw DimensionMismatch("rigidity certificate needs a square matrix");
  if (s < 0) throw InvalidParams("s must be nonnegative");
  DesignParams d = design_params(support_pattern(M, 0.0));
  DesignParams eff = d;
  eff.k = static_cast<int>(std::max(0LL, static_cast<long long>(d.k) - s));
  RankBoundReport rep = detail::bound_report(eff);
  rep.notes.push_back("floor holds for every perturbation supported on the pattern with at most " +
                      std::to_string(s) + " changes per column");
  return rep;
}

}  // namespace rankcert
