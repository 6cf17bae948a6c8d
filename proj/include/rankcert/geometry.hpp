#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rankcert/design.hpp"
#include "rankcert/errors.hpp"
#include "rankcert/matrix.hpp"
#include "rankcert/rank.hpp"
#include "rankcert/rational.hpp"

namespace rankcert {

// n points in C^d, optionally with exact Gaussian-rational coordinates.
struct PointConfiguration {
  int n = 0, d = 0;
  std::vector<Complex> pts;
  bool exact = false;
  std::vector<GaussianRational> ptsx;
  std::vector<std::string> labels;

  PointConfiguration() = default;
  PointConfiguration(int n_, int d_, bool exact_ = false)
      : n(n_), d(d_), pts(static_cast<std::size_t>(n_) * d_), exact(exact_) {
    if (n_ <= 0 || d_ <= 0)
      throw InvalidParams("point configuration dimensions must be positive");
    if (exact) ptsx.resize(static_cast<std::size_t>(n_) * d_);
  }

  Complex& at(int i, int j) { return pts[static_cast<std::size_t>(i) * d + j]; }
  const Complex& at(int i, int j) const { return pts[static_cast<std::size_t>(i) * d + j]; }
  GaussianRational& xat(int i, int j) { return ptsx[static_cast<std::size_t>(i) * d + j]; }
  const GaussianRational& xat(int i, int j) const {
    return ptsx[static_cast<std::size_t>(i) * d + j];
  }

  void set(int i, int j, Complex v) {
    if (exact) throw InvalidParams("exact configuration requires set_exact");
    at(i, j) = v;
  }
  void set_exact(int i, int j, const GaussianRational& v) {
    if (!exact) throw NotExact("configuration has no exact storage");
    xat(i, j) = v;
    at(i, j) = v.to_complex();
  }

  PointConfiguration subset(const std::vector<int>& idx) const {
    PointConfiguration S(static_cast<int>(idx.size()), d, exact);
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (int j = 0; j < d; ++j) {
        if (exact)
          S.set_exact(static_cast<int>(r), j, xat(idx[r], j));
        else
          S.at(static_cast<int>(r), j) = at(idx[r], j);
      }
    if (!labels.empty()) {
      S.labels.resize(idx.size());
      for (std::size_t r = 0; r < idx.size(); ++r) S.labels[r] = labels[idx[r]];
    }
    return S;
  }
};

// Every unordered point pair lies on exactly one line; lines with at least
// three members are the special ones.
struct LineIncidence {
  std::vector<std::vector<int>> lines;

  int special_count() const {
    int c = 0;
    for (const auto& l : lines) c += l.size() >= 3;
    return c;
  }
  int ordinary_count() const {
    int c = 0;
    for (const auto& l : lines) c += l.size() == 2;
    return c;
  }
};

namespace detail {

inline void require_distinct(const PointConfiguration& C) {
  for (int a = 0; a < C.n; ++a)
    for (int b = a + 1; b < C.n; ++b) {
      if (C.exact) {
        bool same = true;
        for (int j = 0; j < C.d && same; ++j) same = C.xat(a, j) == C.xat(b, j);
        if (same) throw DegenerateInput("points " + std::to_string(a) + " and " +
                                        std::to_string(b) + " coincide");
      } else {
        double dist = 0;
        for (int j = 0; j < C.d; ++j) dist += std::norm(C.at(a, j) - C.at(b, j));
        if (std::sqrt(dist) <= 1e-9)
          throw DegenerateInput("points " + std::to_string(a) + " and " +
                                std::to_string(b) + " coincide");
      }
    }
}

// Collinearity of (a,b,c) by the orthogonal residual of the shorter leg
// against the longer one. Forming the residual vector componentwise keeps
// the error floor near machine epsilon; the Gram determinant uu*ww-|uw|^2
// cancels catastrophically for near-parallel legs and bottoms out around
// sqrt(epsilon), above the default tolerance.
inline bool collinear_float(const PointConfiguration& C, int a, int b, int c, double tol) {
  double uu = 0, ww = 0;
  for (int j = 0; j < C.d; ++j) {
    uu += std::norm(C.at(b, j) - C.at(a, j));
    ww += std::norm(C.at(c, j) - C.at(a, j));
  }
  const int tip = uu >= ww ? b : c;  // the longer leg spans the line
  const int toe = uu >= ww ? c : b;
  const double dd = std::max(uu, ww);
  if (dd == 0) return true;
  Complex dot = 0;
  for (int j = 0; j < C.d; ++j)
    dot += std::conj(C.at(tip, j) - C.at(a, j)) * (C.at(toe, j) - C.at(a, j));
  const Complex coef = dot / dd;
  double rr = 0;
  for (int j = 0; j < C.d; ++j)
    rr += std::norm(C.at(toe, j) - C.at(a, j) - coef * (C.at(tip, j) - C.at(a, j)));
  return std::sqrt(rr) <= tol * std::sqrt(dd);
}

inline bool collinear_exact(const PointConfiguration& C, int a, int b, int c) {
  int p = -1;
  std::vector<GaussianRational> u(C.d), w(C.d);
  for (int j = 0; j < C.d; ++j) {
    u[j] = C.xat(b, j) - C.xat(a, j);
    w[j] = C.xat(c, j) - C.xat(a, j);
    if (p < 0 && !u[j].is_zero()) p = j;
  }
  if (p < 0) return true;
  for (int j = 0; j < C.d; ++j)
    if (!(w[j] * u[p] == w[p] * u[j])) return false;
  return true;
}

inline bool collinear(const PointConfiguration& C, int a, int b, int c, double tol) {
  return C.exact ? collinear_exact(C, a, b, c) : collinear_float(C, a, b, c, tol);
}

}  // namespace detail

// Partition of all point pairs into maximal collinear classes.
inline LineIncidence special_lines(const PointConfiguration& C, double tol = 1e-9) {
  detail::require_distinct(C);
  LineIncidence L;
  if (C.n < 2) return L;
  std::vector<std::vector<char>> covered(C.n, std::vector<char>(C.n, 0));
  for (int a = 0; a < C.n; ++a)
    for (int b = a + 1; b < C.n; ++b) {
      if (covered[a][b]) continue;
      std::vector<int> line = {a, b};
      for (int c = 0; c < C.n; ++c) {
        if (c == a || c == b) continue;
        if (detail::collinear(C, a, b, c, tol)) line.push_back(c);
      }
      std::sort(line.begin(), line.end());
      for (std::size_t x = 0; x < line.size(); ++x)
        for (std::size_t y = x + 1; y < line.size(); ++y)
          covered[line[x]][line[y]] = 1;
      L.lines.push_back(std::move(line));
    }
  return L;
}

// Largest delta such that every point sees at least delta*(n-1) others on
// special lines through it.
inline Rational sg_delta(const PointConfiguration& C, double tol = 1e-9) {
  if (C.n < 2) throw InvalidParams("delta needs at least two points");
  LineIncidence L = special_lines(C, tol);
  std::vector<long long> seen(C.n, 0);
  for (const auto& line : L.lines) {
    if (line.size() < 3) continue;
    for (int i : line) seen[i] += static_cast<long long>(line.size()) - 1;
  }
  long long mn = seen[0];
  for (long long s : seen) mn = std::min(mn, s);
  return Rational(mn, C.n - 1);
}

// Rank of the (n-1) x d matrix of differences from the first point.
inline long long affine_dim(const PointConfiguration& C, double tol = 1e-8) {
  if (C.n < 1) throw InvalidParams("empty configuration");
  if (C.n == 1) return 0;
  ComplexMatrix D(C.n - 1, C.d, C.exact);
  for (int i = 1; i < C.n; ++i)
    for (int j = 0; j < C.d; ++j) {
      if (C.exact)
        D.set_exact(i - 1, j, C.xat(i, j) - C.xat(0, j));
      else
        D.at(i - 1, j) = C.at(i, j) - C.at(0, j);
    }
  return C.exact ? rank_exact(D) : rank_numeric(D, tol);
}

namespace detail {

// Lexicographic first-fit with backtracking over the off-diagonal cells.
// Returns an empty square if the node budget runs out.
inline std::vector<std::vector<int>> idempotent_square_backtrack(int r,
                                                                 std::uint64_t budget) {
  std::vector<std::vector<int>> L(r, std::vector<int>(r, -1));
  std::vector<std::uint64_t> row_used(r, 0), col_used(r, 0);
  for (int i = 0; i < r; ++i) {
    L[i][i] = i;
    row_used[i] |= 1ull << i;
    col_used[i] |= 1ull << i;
  }
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      if (i != j) cells.emplace_back(i, j);
  const std::uint64_t full = r == 64 ? ~0ull : ((1ull << r) - 1);
  std::uint64_t nodes = 0;
  std::vector<int> choice(cells.size(), -1);
  std::size_t idx = 0;
  while (true) {
    if (idx == cells.size()) return L;
    auto [i, j] = cells[idx];
    std::uint64_t avail = ~(row_used[i] | col_used[j]) & full;
    int from = choice[idx] + 1;
    if (from < r) avail &= ~((1ull << from) - 1);
    else avail = 0;
    if (choice[idx] >= 0) {
      row_used[i] &= ~(1ull << choice[idx]);
      col_used[j] &= ~(1ull << choice[idx]);
      L[i][j] = -1;
      choice[idx] = -1;
    }
    if (avail) {
      int v = __builtin_ctzll(avail);
      choice[idx] = v;
      L[i][j] = v;
      row_used[i] |= 1ull << v;
      col_used[j] |= 1ull << v;
      ++idx;
      if (++nodes > budget) return {};
    } else {
      if (idx == 0) return {};
      --idx;
    }
  }
}

// Deterministic fallback for even orders: prolong the odd-order formula
// square of order r-1 along an off-diagonal transversal.
inline std::vector<std::vector<int>> idempotent_square_prolongation(int r) {
  const int m = r - 1, h = (m + 1) / 2;
  std::vector<std::vector<int>> L(r, std::vector<int>(r, -1));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) L[i][j] = static_cast<int>((static_cast<long long>(i + j) * h) % m);
  for (int i = 0; i < m; ++i) {
    int j = (i + 1) % m;
    int v = L[i][j];
    L[i][j] = m;
    L[i][m] = v;
    L[m][j] = v;
  }
  L[m][m] = m;
  return L;
}

}  // namespace detail

// Latin square with L(i,i) = i. Odd orders use the closed formula
// L(i,j) = (i+j)(r+1)/2 mod r; even orders use first-fit backtracking
// (memoized), which stays fast at the orders the triple systems need.
inline std::vector<std::vector<int>> idempotent_latin_square(int r) {
  if (r < 3) throw InvalidParams("idempotent Latin squares need order >= 3");
  if (r > 64) throw TooLarge("Latin square construction guarded to order <= 64");
  if (r % 2 == 1) {
    const int h = (r + 1) / 2;
    std::vector<std::vector<int>> L(r, std::vector<int>(r));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        L[i][j] = static_cast<int>((static_cast<long long>(i + j) * h) % r);
    return L;
  }
  static std::map<int, std::vector<std::vector<int>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(r);
  if (it != cache.end()) return it->second;
  auto L = detail::idempotent_square_backtrack(r, 50'000'000);
  if (L.empty()) L = detail::idempotent_square_prolongation(r);
  cache[r] = L;
  return L;
}

// r^2 - r ordered triples (i, j, L(i,j)) over i != j: three distinct
// elements each, every element in exactly 3(r-1) triples, every unordered
// pair in at most 6.
struct TripleSystem {
  int r = 0;
  std::vector<std::array<int, 3>> triples;
};

inline TripleSystem triple_system(int r) {
  auto L = idempotent_latin_square(r);
  TripleSystem T;
  T.r = r;
  T.triples.reserve(static_cast<std::size_t>(r) * (r - 1));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      if (i != j) T.triples.push_back({i, j, L[i][j]});
  return T;
}

// The configuration-to-design-matrix reduction. V is the homogeneous n x
// (d+1) point matrix with rows (v_i, 1), so rank(V) = affine dimension + 1.
// For every special line and every triple (i,j,k) of its triple system, A
// gains a row (lambda, 1-lambda, -1) on columns (i,j,k), where
// v_k = lambda*v_i + (1-lambda)*v_j. By construction A*V = 0, every row has
// support 3, every column support >= 3*ceil(delta*(n-1)), and two columns
// meet in at most 6 rows.
struct SGMatrix {
  ComplexMatrix A, V;
  LineIncidence lines;
  Rational delta{0};
};

inline SGMatrix sg_design_matrix(const PointConfiguration& C, double tol = 1e-9) {
  if (C.n < 3) throw NoSpecialLines("fewer than three points");
  LineIncidence L = special_lines(C, tol);
  long long m = 0;
  for (const auto& line : L.lines)
    if (line.size() >= 3) {
      long long r = static_cast<long long>(line.size());
      m += r * r - r;
    }
  if (m == 0) throw NoSpecialLines("no line passes through three points");

  std::vector<long long> seen(C.n, 0);
  for (const auto& line : L.lines)
    if (line.size() >= 3)
      for (int i : line) seen[i] += static_cast<long long>(line.size()) - 1;
  long long mn = seen[0];
  for (long long s : seen) mn = std::min(mn, s);

  SGMatrix out;
  out.lines = L;
  out.delta = Rational(mn, C.n - 1);
  out.V = ComplexMatrix(C.n, C.d + 1, C.exact);
  for (int i = 0; i < C.n; ++i) {
    for (int j = 0; j < C.d; ++j) {
      if (C.exact)
        out.V.set_exact(i, j, C.xat(i, j));
      else
        out.V.at(i, j) = C.at(i, j);
    }
    if (C.exact)
      out.V.set_exact(i, C.d, GaussianRational(1));
    else
      out.V.at(i, C.d) = 1.0;
  }

  out.A = ComplexMatrix(static_cast<int>(m), C.n, C.exact);
  int row = 0;
  for (const auto& line : L.lines) {
    if (line.size() < 3) continue;
    TripleSystem T = triple_system(static_cast<int>(line.size()));
    for (const auto& tr : T.triples) {
      const int gi = line[tr[0]], gj = line[tr[1]], gk = line[tr[2]];
      if (C.exact) {
        int p = -1;
        for (int j = 0; j < C.d && p < 0; ++j)
          if (!(C.xat(gi, j) - C.xat(gj, j)).is_zero()) p = j;
        GaussianRational lam =
            (C.xat(gk, p) - C.xat(gj, p)) / (C.xat(gi, p) - C.xat(gj, p));
        out.A.set_exact(row, gi, lam);
        out.A.set_exact(row, gj, GaussianRational(1) - lam);
        out.A.set_exact(row, gk, GaussianRational(-1));
      } else {
        Complex num = 0;
        double den = 0;
        for (int j = 0; j < C.d; ++j) {
          Complex u = C.at(gi, j) - C.at(gj, j);
          num += std::conj(u) * (C.at(gk, j) - C.at(gj, j));
          den += std::norm(u);
        }
        Complex lam = num / den;
        out.A.at(row, gi) = lam;
        out.A.at(row, gj) = 1.0 - lam;
        out.A.at(row, gk) = -1.0;
      }
      ++row;
    }
  }
  return out;
}

struct SGReport {
  int n = 0;
  long long m_rows = 0;
  Rational delta{0};
  Rational bound{0};
  long long certified_rank = 0;
  long long rank_measured = 0;
  long long affine_dimension = 0;
  Rational dim_bound{0};
  bool kelly_route = false;
  bool pass = false;
  std::vector<std::string> notes;
};

// Certify a floor on rank(A) from the measured delta and read off the
// dimension bound: affine dim <= 12/delta in general; for delta = 1 the
// matrix has exactly n(n-1) rows, the main bound gives rank(A) >= n-3, so
// rank(V) <= 3 and the affine dimension is at most 2.
inline SGReport sg_bound_check(const PointConfiguration& C, double tol = 1e-9) {
  SGMatrix SG = sg_design_matrix(C, tol);
  SGReport rep;
  rep.n = C.n;
  rep.m_rows = SG.A.m;
  rep.delta = SG.delta;
  const long long n = C.n;
  const long long k_geom =
      ceil_rational(SG.delta * Rational(n - 1)).convert_to<long long>();
  if (SG.delta == 1) {
    rep.kelly_route = true;
    if (rep.m_rows != n * (n - 1))
      rep.notes.push_back("unexpected row count for a fully special configuration");
    rep.bound = rank_bound_main(3, 3 * (n - 1), 6, n * (n - 1), n);
    rep.dim_bound = Rational(2);
  } else {
    if (k_geom < 1) {
      rep.notes.push_back("no special structure: delta = 0");
      return rep;
    }
    rep.bound = rank_bound_cor_no_m(3, 3 * k_geom, 6, n);
    rep.dim_bound = Rational(12) / SG.delta;
  }
  Int c = ceil_rational(rep.bound);
  if (c < 0) c = 0;
  if (c > n) c = n;
  rep.certified_rank = c.convert_to<long long>();
  rep.rank_measured = SG.A.exact ? rank_exact(SG.A) : rank_numeric(SG.A, 1e-8);
  rep.affine_dimension = affine_dim(C, 1e-8);
  rep.pass = Rational(rep.affine_dimension) <= rep.dim_bound &&
             rep.certified_rank <= rep.rank_measured;
  if (rep.kelly_route)
    rep.pass = rep.pass && rep.certified_rank >= n - 3;
  return rep;
}

struct ExtractReport {
  std::vector<int> survivors;
  Rational measured_delta{0};
  long long affine_dimension = 0;
  Rational dim_bound{0};
  bool hypothesis_met = false;
  bool size_ok = false;
  bool dim_ok = false;
  bool empty = false;
  std::vector<std::string> notes;
};

// Greedy peeling: repeatedly drop a point whose special-pair degree within
// the survivors falls below target*|survivors|. The >= target*n^2
// special-pair hypothesis is reported, not enforced.
inline ExtractReport avg_case_extract(const PointConfiguration& C, const Rational& target,
                                      double tol = 1e-9) {
  if (target < 0 || target > 1) throw InvalidParams("target delta must lie in [0,1]");
  LineIncidence L = special_lines(C, tol);
  const int n = C.n;
  std::vector<std::vector<char>> special(n, std::vector<char>(n, 0));
  long long pairs = 0;
  for (const auto& line : L.lines) {
    if (line.size() < 3) continue;
    pairs += static_cast<long long>(line.size()) * (line.size() - 1) / 2;
    for (std::size_t x = 0; x < line.size(); ++x)
      for (std::size_t y = x + 1; y < line.size(); ++y)
        special[line[x]][line[y]] = special[line[y]][line[x]] = 1;
  }
  ExtractReport rep;
  rep.hypothesis_met = Rational(pairs) >= target * n * n;

  std::vector<char> alive(n, 1);
  std::vector<int> deg(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i && special[i][j]) ++deg[i];
  int count = n;
  while (count > 0) {
    int victim = -1;
    for (int i = 0; i < n && victim < 0; ++i)
      if (alive[i] && Rational(deg[i]) < target * count) victim = i;
    if (victim < 0) break;
    alive[victim] = 0;
    --count;
    for (int j = 0; j < n; ++j)
      if (alive[j] && special[victim][j]) --deg[j];
  }
  if (count == 0) {
    rep.empty = true;
    rep.notes.push_back("peeling removed every point");
    return rep;
  }
  for (int i = 0; i < n; ++i)
    if (alive[i]) rep.survivors.push_back(i);
  PointConfiguration sub = C.subset(rep.survivors);
  rep.affine_dimension = affine_dim(sub, 1e-8);
  if (sub.n >= 2) rep.measured_delta = sg_delta(sub, tol);
  rep.size_ok = Rational(count) * 6 >= target * n;
  if (rep.measured_delta > 0) {
    rep.dim_bound = Rational(12) / rep.measured_delta;
    rep.dim_ok = Rational(rep.affine_dimension) <= rep.dim_bound;
  } else {
    rep.notes.push_back("survivors carry no special lines; dimension bound not applicable");
  }
  return rep;
}

enum class FlatVariant { plain, star };

namespace detail {

// Affine span with incremental extension; floating version keeps an
// orthonormal direction basis, exact version a row-echelon one.
class AffineSpanF {
public:
  AffineSpanF(const PointConfiguration& C, int base, double tol) : C_(&C), base_(base), tol_(tol) {}

  bool add(int point) {
    std::vector<Complex> v = reduce(point);
    double nn = 0;
    for (const Complex& z : v) nn += std::norm(z);
    if (std::sqrt(nn) <= tol_ * scale(point)) return false;
    double inv = 1.0 / std::sqrt(nn);
    for (Complex& z : v) z *= inv;
    basis_.push_back(std::move(v));
    return true;
  }

  bool contains(int point) const {
    std::vector<Complex> v = reduce(point);
    double nn = 0;
    for (const Complex& z : v) nn += std::norm(z);
    return std::sqrt(nn) <= tol_ * scale(point);
  }

private:
  double scale(int point) const {
    double s = 0;
    for (int j = 0; j < C_->d; ++j) s += std::norm(C_->at(point, j) - C_->at(base_, j));
    return 1.0 + std::sqrt(s);
  }

  std::vector<Complex> reduce(int point) const {
    std::vector<Complex> v(C_->d);
    for (int j = 0; j < C_->d; ++j) v[j] = C_->at(point, j) - C_->at(base_, j);
    for (const auto& b : basis_) {
      Complex proj = 0;
      for (int j = 0; j < C_->d; ++j) proj += std::conj(b[j]) * v[j];
      for (int j = 0; j < C_->d; ++j) v[j] -= proj * b[j];
    }
    return v;
  }

  const PointConfiguration* C_;
  int base_;
  double tol_;
  std::vector<std::vector<Complex>> basis_;
};

class AffineSpanX {
public:
  AffineSpanX(const PointConfiguration& C, int base, double) : C_(&C), base_(base) {}

  bool add(int point) {
    auto [v, pivot] = reduce(point);
    if (pivot < 0) return false;
    basis_.push_back(std::move(v));
    pivots_.push_back(pivot);
    return true;
  }

  bool contains(int point) const { return reduce(point).second < 0; }

private:
  std::pair<std::vector<GaussianRational>, int> reduce(int point) const {
    std::vector<GaussianRational> v(C_->d);
    for (int j = 0; j < C_->d; ++j) v[j] = C_->xat(point, j) - C_->xat(base_, j);
    for (std::size_t b = 0; b < basis_.size(); ++b) {
      int p = pivots_[b];
      if (v[p].is_zero()) continue;
      GaussianRational f = v[p] / basis_[b][p];
      for (int j = 0; j < C_->d; ++j) v[j] -= f * basis_[b][j];
    }
    for (int j = 0; j < C_->d; ++j)
      if (!v[j].is_zero()) return {std::move(v), j};
    return {std::move(v), -1};
  }

  const PointConfiguration* C_;
  int base_;
  std::vector<std::vector<GaussianRational>> basis_;
  std::vector<int> pivots_;
};

template <typename Span>
Rational flat_delta_impl(const PointConfiguration& C, int k, FlatVariant variant,
                         double tol) {
  const int n = C.n;
  std::optional<Rational> best;
  std::vector<int> idx(k);
  auto run_tuple = [&](const std::vector<int>& tuple) {
    Span span(C, tuple[0], tol);
    for (int x = 1; x < k; ++x)
      if (!span.add(tuple[x])) return;  // dependent tuple
    long long count = 0;
    for (int u = 0; u < n; ++u) {
      if (span.contains(u)) {
        ++count;
        continue;
      }
      Span ext = span;
      ext.add(u);
      if (variant == FlatVariant::plain) {
        int members = 0;
        for (int w = 0; w < n; ++w) members += ext.contains(w);
        if (members >= k + 2) ++count;
      } else {
        for (int w = 0; w < n; ++w)
          if (w != u && !span.contains(w) && ext.contains(w)) {
            ++count;
            break;
          }
      }
    }
    Rational val(count, n);
    if (!best || val < *best) best = val;
  };
  // enumerate ascending k-subsets
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return Rational(1);
  while (true) {
    run_tuple(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int x = pos + 1; x < k; ++x) idx[x] = idx[x - 1] + 1;
  }
  return best ? *best : Rational(1);
}

}  // namespace detail

// Largest delta for which C is a delta-SG_k (plain) or delta-SG_k* (star)
// configuration: min over independent k-tuples of the fraction of points u
// that either lie on the tuple's span or extend it to a k-flat that is not
// elementary (plain) / contains a witness point outside span and u (star).
inline Rational flat_sg_delta(const PointConfiguration& C, int k, FlatVariant variant,
                              double tol = 1e-9) {
  if (k < 1) throw InvalidParams("k must be at least 1");
  if (k > C.d) throw InvalidParams("k exceeds the ambient dimension");
  if (C.n > 40 || k > 3) throw TooLarge("flat enumeration guarded to n <= 40, k <= 3");
  detail::require_distinct(C);
  return C.exact ? detail::flat_delta_impl<detail::AffineSpanX>(C, k, variant, tol)
                 : detail::flat_delta_impl<detail::AffineSpanF>(C, k, variant, tol);
}

struct FlatReport {
  int k = 1;
  FlatVariant variant = FlatVariant::plain;
  Rational delta{0};
  long long affine_dimension = 0;
  std::optional<Rational> k_over_delta;
  bool asserted = false;
  bool pass = true;
  std::vector<std::string> notes;
};

// Report-only for k >= 2 (the bounds O(k/delta) and C^k/delta carry
// unspecified constants); k = 1 additionally runs the line-level check and
// asserts the 12/delta bound.
inline FlatReport flat_bound_check(const PointConfiguration& C, int k, FlatVariant variant,
                                   double tol = 1e-9) {
  FlatReport rep;
  rep.k = k;
  rep.variant = variant;
  rep.delta = flat_sg_delta(C, k, variant, tol);
  rep.affine_dimension = affine_dim(C, 1e-8);
  if (rep.delta > 0)
    rep.k_over_delta = Rational(k) / rep.delta;
  rep.notes.push_back(variant == FlatVariant::star
                          ? "dimension scale k/delta is report-only (unspecified constant)"
                          : "dimension scale C^k/delta is report-only (unspecified constant)");
  if (k == 1) {
    try {
      SGReport line = sg_bound_check(C, tol);
      rep.asserted = true;
      rep.pass = line.pass;
      rep.notes.push_back("k = 1: asserted the line-level bound 12/delta");
    } catch (const NoSpecialLines&) {
      rep.notes.push_back("k = 1 but no special lines; nothing to assert");
    }
  }
  return rep;
}

struct FreimanReport {
  long long set_size = 0;
  long long image_size = 0;
  Rational K{0};
  long long dim_linear = 0;
  long long dim_affine = 0;
  Rational K_squared{0};
  std::vector<std::string> notes;
};

namespace detail {

inline void require_valid_alpha(Complex alpha) {
  if (std::abs(alpha) <= 1e-12 || std::abs(alpha - Complex(1.0)) <= 1e-12)
    throw InvalidAlpha("coefficient must avoid 0 and 1");
}

}  // namespace detail

// Doubling report for f(a1,a2) = alpha*a1 + (1-alpha)*a2 over ordered pairs
// a1 != a2: K = |image| / |A|, with dim(A) as the linear-span rank (the
// affine dimension is reported alongside). The dim <= O(K^2) conclusion has
// an unspecified constant and is report-only.
inline FreimanReport freiman_report(
    const PointConfiguration& A, Complex alpha = Complex(0.5, 0.0),
    const std::map<std::pair<int, int>, Complex>* table = nullptr, double tol = 1e-9) {
  detail::require_distinct(A);
  detail::require_valid_alpha(alpha);
  if (table)
    for (const auto& [key, a] : table[0]) {
      (void)key;
      detail::require_valid_alpha(a);
    }
  const int n = A.n, d = A.d;
  std::vector<std::vector<Complex>> images;
  images.reserve(static_cast<std::size_t>(n) * (n - 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Complex a = alpha;
      if (table) {
        auto it = table->find({i, j});
        if (it != table->end()) a = it->second;
      }
      std::vector<Complex> img(d);
      for (int c = 0; c < d; ++c) img[c] = a * A.at(i, c) + (1.0 - a) * A.at(j, c);
      images.push_back(std::move(img));
    }
  double scale = 0;
  for (const auto& img : images)
    for (const Complex& z : img) scale = std::max(scale, std::abs(z));
  const double eq_tol = tol * (1 + scale);
  std::vector<const std::vector<Complex>*> distinct;
  for (const auto& img : images) {
    bool fresh = true;
    for (const auto* seen : distinct) {
      double dist = 0;
      for (int c = 0; c < d; ++c) dist += std::norm(img[c] - (*seen)[c]);
      if (std::sqrt(dist) <= eq_tol) {
        fresh = false;
        break;
      }
    }
    if (fresh) distinct.push_back(&img);
  }
  FreimanReport rep;
  rep.set_size = n;
  rep.image_size = static_cast<long long>(distinct.size());
  rep.K = Rational(rep.image_size, rep.set_size);
  rep.K_squared = rep.K * rep.K;
  ComplexMatrix P(n, d, A.exact);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) {
      if (A.exact)
        P.set_exact(i, c, A.xat(i, c));
      else
        P.at(i, c) = A.at(i, c);
    }
  rep.dim_linear = A.exact ? rank_exact(P) : rank_numeric(P, 1e-8);
  rep.dim_affine = affine_dim(A, 1e-8);
  rep.notes.push_back("dim <= O(K^2) carries an unspecified constant; values are reported");
  return rep;
}

}  // namespace rankcert
