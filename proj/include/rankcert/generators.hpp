#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rankcert/design.hpp"
#include "rankcert/errors.hpp"
#include "rankcert/geometry.hpp"
#include "rankcert/matrix.hpp"
#include "rankcert/rational.hpp"

namespace rankcert {

namespace detail {

inline bool is_prime(long long p) {
  if (p < 2) return false;
  for (long long f = 2; f * f <= p; ++f)
    if (p % f == 0) return false;
  return true;
}

// Canonical representatives of the projective plane over F_p:
// (0,0,1), (0,1,c), (1,a,b).
inline std::vector<std::array<int, 3>> projective_triples(int p) {
  std::vector<std::array<int, 3>> v;
  v.reserve(static_cast<std::size_t>(p) * p + p + 1);
  v.push_back({0, 0, 1});
  for (int c = 0; c < p; ++c) v.push_back({0, 1, c});
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) v.push_back({1, a, b});
  return v;
}

}  // namespace detail

// Point-line incidence matrix of the projective plane of prime order p:
// (p^2+p+1) x (p^2+p+1), exact 0/1 entries, row i column j set when the
// i-th point lies on the j-th line (dot product 0 mod p). Measured design
// parameters are (p+1, p+1, 1).
inline ComplexMatrix gen_projective_plane(int p) {
  if (!detail::is_prime(p)) throw NotPrime("plane order must be prime");
  auto pts = detail::projective_triples(p);
  const int N = static_cast<int>(pts.size());
  ComplexMatrix M(N, N, true);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      int dot = 0;
      for (int c = 0; c < 3; ++c) dot += pts[i][c] * pts[j][c];
      if (dot % p == 0) M.set_exact(i, j, GaussianRational(1));
    }
  return M;
}

// n x n block-diagonal all-ones matrix with n/s blocks of size s; exact
// rank n/s, measured design parameters (s, s, s).
inline ComplexMatrix gen_block_diagonal(int n, int s) {
  if (n < 1 || s < 1) throw InvalidParams("dimensions must be positive");
  if (n % s != 0) throw NotDivisible("block size must divide the matrix size");
  ComplexMatrix M(n, n, true);
  for (int b = 0; b < n / s; ++b)
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) M.set_exact(b * s + i, b * s + j, GaussianRational(1));
  return M;
}

// num_lines disjoint lines with pts_per_line integer-lattice points each,
// in general position: the special lines of the output are exactly the
// generated ones. Deterministic in the seed; retries fresh coordinates up
// to 64 times before giving up.
inline PointConfiguration gen_lines_general_position(int num_lines, int pts_per_line, int d,
                                                     std::uint64_t seed) {
  if (num_lines < 1) throw InvalidParams("need at least one line");
  if (pts_per_line < 3) throw InvalidParams("a special line needs at least three points");
  if (d < 2) throw InvalidParams("ambient dimension must be at least 2");
  std::mt19937_64 rng;
  for (int attempt = 0; attempt < 64; ++attempt) {
    rng.seed(seed + 1000003ull * static_cast<std::uint64_t>(attempt));
    auto rnd = [&](int lo, int hi) {
      return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    PointConfiguration C(num_lines * pts_per_line, d, true);
    for (int l = 0; l < num_lines; ++l) {
      std::vector<int> dir(d), off(d);
      bool zero = true;
      for (int c = 0; c < d; ++c) {
        dir[c] = rnd(-9, 9);
        off[c] = rnd(-1000, 1000);
        zero = zero && dir[c] == 0;
      }
      if (zero) dir[0] = 1;
      for (int j = 0; j < pts_per_line; ++j)
        for (int c = 0; c < d; ++c)
          C.set_exact(l * pts_per_line + j, c,
                      GaussianRational(Rational(off[c] + static_cast<long long>(j + 1) * dir[c])));
    }
    try {
      LineIncidence L = special_lines(C);
      bool good = L.special_count() == num_lines;
      for (const auto& line : L.lines)
        if (line.size() >= 3 && static_cast<int>(line.size()) != pts_per_line) good = false;
      if (good) return C;
    } catch (const DegenerateInput&) {
      // coincident points: retry
    }
  }
  throw GeneralPositionFailed("could not reach general position within 64 attempts");
}

// The nine inflection points of the Hesse configuration, taken in
// homogeneous coordinates (0,1,-w^j), (1,0,-w^j), (1,-w^j,0) for the cube
// roots of unity w^j and mapped to C^2 by the chart (x,y,z) -> (x,y)/(3x+5y+z),
// whose denominator vanishes on none of the nine. Every point lies on four
// of the twelve special lines; delta = 1.
inline PointConfiguration gen_hesse() {
  PointConfiguration C(9, 2);
  const double two_pi = 2.0 * std::numbers::pi;
  int row = 0;
  for (int j = 0; j < 3; ++j) {
    Complex w = std::polar(1.0, two_pi * j / 3.0);
    const Complex h[3][3] = {{0.0, 1.0, -w}, {1.0, 0.0, -w}, {1.0, -w, 0.0}};
    for (int f = 0; f < 3; ++f) {
      Complex den = 3.0 * h[f][0] + 5.0 * h[f][1] + h[f][2];
      C.at(row, 0) = h[f][0] / den;
      C.at(row, 1) = h[f][1] / den;
      ++row;
    }
  }
  return C;
}

struct RandomDesignResult {
  bool feasible = false;
  std::optional<ComplexMatrix> matrix;
  DesignParams reached;
  int attempts = 0;
};

// Random m x n matrix whose support is a (q,k,t)-design, by incremental
// row placement with pair-count rejection and restarts. Infeasibility
// (including the counting obstruction q*m < k*n) is a result, not an error.
// Entries are seeded uniform complex with magnitude bounded away from zero.
inline RandomDesignResult gen_random_design(int m, int n, int q, int k, int t,
                                            std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidParams("dimensions must be positive");
  if (q < 1 || k < 0 || t < 0) throw InvalidParams("invalid design parameters");
  RandomDesignResult res;
  if (static_cast<long long>(q) * m < static_cast<long long>(k) * n) return res;

  std::mt19937_64 rng(seed);
  auto rnd = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  auto shuffle = [&](std::vector<int>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) std::swap(v[i], v[rnd(0, i)]);
  };
  auto unit = [&] { return (rng() >> 11) * 0x1.0p-53; };

  std::vector<std::vector<int>> rows(m);
  std::vector<int> col_supp(n);
  std::vector<int> pair_cnt(static_cast<std::size_t>(n) * n);

  const int restarts = 200;
  for (int attempt = 1; attempt <= restarts; ++attempt) {
    res.attempts = attempt;
    for (auto& r : rows) r.clear();
    std::fill(col_supp.begin(), col_supp.end(), 0);
    std::fill(pair_cnt.begin(), pair_cnt.end(), 0);
    for (int i = 0; i < m; ++i) {
      std::vector<int> deficient, rest;
      for (int j = 0; j < n; ++j) (col_supp[j] < k ? deficient : rest).push_back(j);
      shuffle(deficient);
      shuffle(rest);
      deficient.insert(deficient.end(), rest.begin(), rest.end());
      for (int cand : deficient) {
        if (static_cast<int>(rows[i].size()) == q) break;
        bool ok = true;
        for (int c : rows[i])
          if (pair_cnt[static_cast<std::size_t>(std::min(c, cand)) * n + std::max(c, cand)] >= t) {
            ok = false;
            break;
          }
        if (!ok) continue;
        for (int c : rows[i])
          ++pair_cnt[static_cast<std::size_t>(std::min(c, cand)) * n + std::max(c, cand)];
        rows[i].push_back(cand);
        ++col_supp[cand];
      }
    }
    int kmin = n > 0 ? col_supp[0] : 0;
    for (int j = 0; j < n; ++j) kmin = std::min(kmin, col_supp[j]);
    if (kmin >= k) {
      ComplexMatrix M(m, n);
      for (int i = 0; i < m; ++i)
        for (int c : rows[i]) {
          Complex z;
          do {
            z = Complex(2 * unit() - 1, 2 * unit() - 1);
          } while (std::abs(z) < 0.3);
          M.at(i, c) = z;
        }
      res.feasible = true;
      res.matrix = std::move(M);
      res.reached = design_params(support_pattern(*res.matrix));
      return res;
    }
  }
  // report the parameters the last attempt reached
  SupportPattern P(m, n);
  for (int i = 0; i < m; ++i)
    for (int c : rows[i]) P.set(i, c, true);
  res.reached = design_params(P);
  return res;
}

}  // namespace rankcert
