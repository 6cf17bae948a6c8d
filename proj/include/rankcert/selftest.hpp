#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rankcert/design.hpp"
#include "rankcert/generators.hpp"
#include "rankcert/geometry.hpp"
#include "rankcert/io.hpp"
#include "rankcert/matrix.hpp"
#include "rankcert/rank.hpp"
#include "rankcert/rational.hpp"
#include "rankcert/scaling.hpp"

namespace rankcert {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  long long ms = 0;
};

inline json json_of(const CriterionResult& c) {
  return {{"id", c.id}, {"name", c.name}, {"pass", c.pass},
          {"detail", c.detail}, {"ms", c.ms}};
}

namespace detail {

struct CorpusItem {
  std::string name;
  ComplexMatrix M;
};

// Shared test corpus: prime-order planes, block-diagonals, configuration-
// derived matrices, and 1000 seeded random designs.
inline std::vector<CorpusItem> acceptance_corpus() {
  std::vector<CorpusItem> v;
  for (int p : {2, 3, 5})
    v.push_back({"plane" + std::to_string(p), gen_projective_plane(p)});
  const int blocks[4][2] = {{6, 2}, {9, 3}, {20, 4}, {100, 5}};
  for (const auto& b : blocks)
    v.push_back({"block" + std::to_string(b[0]) + "x" + std::to_string(b[1]),
                 gen_block_diagonal(b[0], b[1])});

  v.push_back({"sg_hesse", sg_design_matrix(gen_hesse()).A});

  PointConfiguration grid(9, 2, true);
  for (int i = 0; i < 9; ++i) {
    grid.set_exact(i, 0, GaussianRational(i % 3));
    grid.set_exact(i, 1, GaussianRational(i / 3));
  }
  v.push_back({"sg_grid3", sg_design_matrix(grid).A});

  PointConfiguration line5(5, 2, true);
  for (int i = 0; i < 5; ++i) {
    line5.set_exact(i, 0, GaussianRational(i));
    line5.set_exact(i, 1, GaussianRational(2 * i));
  }
  v.push_back({"sg_line5", sg_design_matrix(line5).A});

  v.push_back({"sg_lines2x4", sg_design_matrix(gen_lines_general_position(2, 4, 3, 11)).A});
  v.push_back({"sg_lines3x4", sg_design_matrix(gen_lines_general_position(3, 4, 3, 12)).A});

  std::mt19937_64 meta(987654321ull);
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(meta() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  int made = 0;
  for (std::uint64_t s = 1; made < 1000 && s <= 100000; ++s) {
    int m = pick(4, 16), n = pick(3, 12), q = pick(2, 4), k = pick(2, 4), t = pick(1, 3);
    if (static_cast<long long>(q) * m < static_cast<long long>(k) * n) continue;
    RandomDesignResult r = gen_random_design(m, n, q, k, t, s);
    if (!r.feasible) continue;
    v.push_back({"random" + std::to_string(made), std::move(*r.matrix)});
    ++made;
  }
  return v;
}

inline bool crit_kelly(std::string& detail) {
  SGReport r = sg_bound_check(gen_hesse());
  std::ostringstream d;
  d << "delta=" << rat_str(r.delta) << " m=" << r.m_rows << " bound=" << rat_str(r.bound)
    << " certified=" << r.certified_rank << " rank=" << r.rank_measured
    << " affine_dim=" << r.affine_dimension;
  detail = d.str();
  return r.kelly_route && r.delta == 1 && r.m_rows == 72 && r.bound == Rational(6) &&
         r.certified_rank == 6 && r.certified_rank > 9 - 4 && r.affine_dimension == 2 &&
         r.dim_bound == Rational(2) && r.pass;
}

inline bool crit_lines_dim_bound(std::string& detail) {
  int runs = 0;
  for (int L : {2, 3, 4})
    for (int P : {4, 10})
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        PointConfiguration C = gen_lines_general_position(L, P, 3, seed);
        Rational delta = sg_delta(C);
        if (delta != Rational(P - 1, L * P - 1)) {
          detail = "unexpected delta for L=" + std::to_string(L) + " P=" + std::to_string(P);
          return false;
        }
        long long dim = affine_dim(C);
        if (Rational(dim) * delta > 12) {
          detail = "dimension bound violated at L=" + std::to_string(L) +
                   " P=" + std::to_string(P) + " seed=" + std::to_string(seed);
          return false;
        }
        ++runs;
      }
  detail = std::to_string(runs) + " configurations, affine_dim <= 12/delta in each";
  return runs == 30;
}

inline bool crit_soundness(std::string& detail) {
  auto corpus = acceptance_corpus();
  int checked = 0;
  for (const auto& item : corpus) {
    RankBoundReport rep = analyze(item.M, true);
    if (!rep.actual_rank || rep.certified > *rep.actual_rank) {
      detail = "violation on " + item.name + ": certified " + std::to_string(rep.certified) +
               " vs actual " + (rep.actual_rank ? std::to_string(*rep.actual_rank) : "?");
      return false;
    }
    ++checked;
  }
  detail = std::to_string(checked) + " matrices, certified <= actual in each";
  return checked >= 1000 + 9;
}

inline SupportPattern pattern_from_bits(int m, int n, std::uint32_t bits) {
  SupportPattern P(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (bits >> (i * n + j) & 1u) P.set(i, j, true);
  return P;
}

inline bool crit_property_s(std::string& detail) {
  long long checked = 0;
  for (std::uint32_t bits = 0; bits < 512; ++bits) {
    SupportPattern P = pattern_from_bits(3, 3, bits);
    if (check_property_s_flow(P) != check_property_s_bruteforce(P)) {
      detail = "3x3 disagreement at mask " + std::to_string(bits);
      return false;
    }
    ++checked;
  }
  for (std::uint64_t bits = 0; bits < 65536; ++bits) {
    SupportPattern P = pattern_from_bits(4, 4, static_cast<std::uint32_t>(bits));
    if (check_property_s_flow(P) != check_property_s_bruteforce(P)) {
      detail = "4x4 disagreement at mask " + std::to_string(bits);
      return false;
    }
    ++checked;
  }
  std::mt19937_64 rng(424242);
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  for (int rep = 0; rep < 1000; ++rep) {
    int m = pick(1, 12), n = pick(1, 16), density = pick(1, 9);
    SupportPattern P(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        if (pick(1, 10) <= density) P.set(i, j, true);
    if (check_property_s_flow(P) != check_property_s_bruteforce(P)) {
      detail = "random disagreement at rep " + std::to_string(rep);
      return false;
    }
    ++checked;
  }
  detail = std::to_string(checked) + " patterns, flow == brute force in each";
  return true;
}

inline bool crit_scaling(std::string& detail) {
  auto corpus = acceptance_corpus();
  int scaled = 0, skipped = 0;
  for (const auto& item : corpus) {
    if (!check_property_s_flow(support_pattern(item.M))) {
      ++skipped;
      continue;
    }
    ScalingResult res = sinkhorn_scale(item.M, 1e-6);
    double col_target = static_cast<double>(item.M.m) / item.M.n;
    if (!res.converged || res.max_row_sq_norm > 1.0 + 1e-6 ||
        res.min_col_sq_norm < col_target - 1e-6) {
      detail = "scaling guarantee failed on " + item.name + " (converged=" +
               (res.converged ? "true" : "false") + ")";
      return false;
    }
    ++scaled;
  }
  detail = std::to_string(scaled) + " matrices scaled, " + std::to_string(skipped) +
           " without the zero-submatrix feasibility condition skipped";
  return scaled > 0;
}

inline bool crit_covers(std::string& detail) {
  auto corpus = acceptance_corpus();
  int qc = 0, gc = 0;
  for (const auto& item : corpus) {
    DesignParams d = design_params(support_pattern(item.M));
    if (d.k < 1) continue;
    {
      CoverMatrix cov = build_q_cover(item.M);
      if (cov.B.m != d.n * d.k || cov.multiplicity > d.q ||
          !check_property_s_flow(support_pattern(cov.B))) {
        detail = "q-cover contract failed on " + item.name;
        return false;
      }
      ScalingResult sc = cover_to_scaling(item.M, cov);
      if (sc.min_col_sq_norm < (d.k - 1e-6) / static_cast<double>(cov.c_target)) {
        detail = "q-cover scaling transfer failed on " + item.name;
        return false;
      }
      ++qc;
    }
    if (d.t >= 1 && static_cast<long long>(d.k) <= static_cast<long long>(d.n) * d.t) {
      CoverMatrix cov = build_group_cover(item.M);
      if (cov.B.m != d.n * d.k || cov.multiplicity > cov.c_target ||
          !check_property_s_flow(support_pattern(cov.B))) {
        detail = "group cover contract failed on " + item.name;
        return false;
      }
      ScalingResult sc = cover_to_scaling(item.M, cov);
      if (sc.min_col_sq_norm < (d.k - 1e-6) / static_cast<double>(cov.c_target)) {
        detail = "group cover scaling transfer failed on " + item.name;
        return false;
      }
      ++gc;
    }
  }
  detail = std::to_string(qc) + " q-covers and " + std::to_string(gc) +
           " group covers satisfied their contracts";
  return qc > 0 && gc > 0;
}

inline bool crit_lemmas(std::string& detail) {
  auto corpus = acceptance_corpus();
  int offdiag_checked = 0;
  for (const auto& item : corpus) {
    if (!check_property_s_flow(support_pattern(item.M))) continue;
    ScalingResult res = sinkhorn_scale(item.M, 1e-6);
    if (!res.converged) continue;
    ComplexMatrix scaled = apply_scaling(item.M, res.rho, res.gamma);
    ComplexMatrix G = gram(scaled);
    DesignParams d = design_params(support_pattern(item.M));
    double alpha = std::sqrt(res.max_row_sq_norm);
    if (!offdiag_within_bound(G, d.t, d.m, alpha, std::max(d.q, 1))) {
      detail = "off-diagonal mass bound failed on " + item.name;
      return false;
    }
    ++offdiag_checked;
  }

  std::mt19937_64 rng(13579);
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  auto unit = [&] { return (rng() >> 11) * 0x1.0p-53; };
  int psd_checked = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    int nn = pick(2, 8);
    int r = pick(1, nn - 1);
    ComplexMatrix B(r, nn);
    double L = 0;
    do {
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < nn; ++j) B.at(i, j) = Complex(2 * unit() - 1, 2 * unit() - 1);
      ComplexMatrix G = gram(B);
      L = G.at(0, 0).real();
      for (int j = 1; j < nn; ++j) L = std::min(L, G.at(j, j).real());
    } while (L < 1e-6);
    ComplexMatrix G = gram(B);
    Rational bound = diag_dominant_rank_bound(G, L);
    int rk = rank_numeric(G);
    if (bound > Rational(rk)) {
      detail = "diagonal dominance bound exceeded the numeric rank at rep " +
               std::to_string(rep);
      return false;
    }
    ++psd_checked;
  }
  detail = std::to_string(offdiag_checked) + " off-diagonal checks, " +
           std::to_string(psd_checked) + " PSD rank-floor checks";
  return offdiag_checked > 0 && psd_checked == 1000;
}

inline bool crit_triples(std::string& detail) {
  for (int r = 3; r <= 50; ++r) {
    TripleSystem T = triple_system(r);
    if (static_cast<long long>(T.triples.size()) != static_cast<long long>(r) * r - r) {
      detail = "triple count wrong at r=" + std::to_string(r);
      return false;
    }
    std::vector<int> degree(r, 0);
    std::vector<int> pair_mult(static_cast<std::size_t>(r) * r, 0);
    for (const auto& tr : T.triples) {
      if (tr[0] == tr[1] || tr[0] == tr[2] || tr[1] == tr[2]) {
        detail = "repeated element in a triple at r=" + std::to_string(r);
        return false;
      }
      for (int e : tr) ++degree[e];
      const int p[3][2] = {{tr[0], tr[1]}, {tr[0], tr[2]}, {tr[1], tr[2]}};
      for (const auto& pr : p) {
        int a = std::min(pr[0], pr[1]), b = std::max(pr[0], pr[1]);
        ++pair_mult[static_cast<std::size_t>(a) * r + b];
      }
    }
    for (int e = 0; e < r; ++e)
      if (degree[e] != 3 * (r - 1)) {
        detail = "element degree wrong at r=" + std::to_string(r);
        return false;
      }
    for (int c : pair_mult)
      if (c > 6) {
        detail = "pair multiplicity above 6 at r=" + std::to_string(r);
        return false;
      }
  }
  detail = "orders 3..50: counts, distinctness, degrees 3(r-1), pair multiplicity <= 6";
  return true;
}

inline bool crit_tight_example(std::string& detail) {
  ComplexMatrix M = gen_block_diagonal(1000, 5);
  SupportPattern P = support_pattern(M);
  DesignParams d = design_params(P);
  Int cooc = 0;
  for (int i = 0; i < P.m; ++i) {
    Int s = P.row_support(i);
    cooc += s * (s - 1) / 2;
  }
  Rational avg_t(cooc, Int(P.n) * (P.n - 1) / 2);
  Rational substituted = rank_bound_cor_no_m(d.q, d.k, avg_t, d.n);
  int actual = rank_exact(M);
  std::ostringstream ds;
  ds << "avg_t=" << rat_str(avg_t) << " substituted_bound=" << rat_str(substituted)
     << " actual_rank=" << actual;
  detail = ds.str();
  return avg_t == Rational(20, 999) && avg_t < 1 && actual == 200 &&
         substituted > Rational(actual);
}

inline bool crit_rigidity(std::string& detail) {
  ComplexMatrix M = gen_projective_plane(5);
  RankBoundReport rep = monotone_rigidity_certificate(M, 2);
  if (rep.certified < 11) {
    detail = "certified " + std::to_string(rep.certified) + " below 11";
    return false;
  }
  SupportPattern P = support_pattern(M);
  std::mt19937_64 rng(246810);
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  auto unit = [&] { return (rng() >> 11) * 0x1.0p-53; };
  int min_rank = M.n;
  for (int rep_i = 0; rep_i < 100; ++rep_i) {
    ComplexMatrix Pert(M.m, M.n);
    for (int i = 0; i < M.m; ++i)
      for (int j = 0; j < M.n; ++j) Pert.at(i, j) = M.at(i, j);
    for (int j = 0; j < M.n; ++j) {
      int changes = pick(0, 2);
      std::vector<int> rows;
      for (int i = 0; i < M.m; ++i)
        if (P.at(i, j)) rows.push_back(i);
      for (int c = 0; c < changes; ++c) {
        int i = rows[pick(0, static_cast<int>(rows.size()) - 1)];
        double ang = 2 * 3.14159265358979323846 * unit();
        double mag = 0.1 + 0.8 * unit();
        Pert.at(i, j) -= Complex(mag * std::cos(ang), mag * std::sin(ang));
      }
    }
    min_rank = std::min(min_rank, rank_numeric(Pert));
  }
  detail = "certified=" + std::to_string(rep.certified) +
           " min_perturbed_rank=" + std::to_string(min_rank) + " over 100 perturbations";
  return min_rank >= 11;
}

inline bool crit_freiman(std::string& detail) {
  PointConfiguration ap(4, 1, true);
  for (int i = 0; i < 4; ++i) ap.set_exact(i, 0, GaussianRational(i));
  FreimanReport fr = freiman_report(ap, Complex(0.5, 0.0));
  std::set<Rational> mids;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) mids.insert(Rational(i + j, 2));
  if (fr.image_size != static_cast<long long>(mids.size()) || fr.K != Rational(5, 4) ||
      fr.dim_linear != 1) {
    detail = "progression case: K=" + rat_str(fr.K) + " image=" + std::to_string(fr.image_size);
    return false;
  }

  std::mt19937_64 rng(777);
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  PointConfiguration gen(10, 5, true);
  for (int i = 0; i < 10; ++i)
    for (int c = 0; c < 5; ++c) gen.set_exact(i, c, GaussianRational(pick(0, 97)));
  FreimanReport fg = freiman_report(gen, Complex(0.3, 0.0));
  std::set<std::vector<Rational>> images;
  const Rational a(3, 10), b(7, 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      if (i == j) continue;
      std::vector<Rational> img(5);
      for (int c = 0; c < 5; ++c) img[c] = a * gen.xat(i, c).re + b * gen.xat(j, c).re;
      images.insert(std::move(img));
    }
  std::ostringstream ds;
  ds << "progression K=" << rat_str(fr.K) << ", generic K=" << rat_str(fg.K)
     << " oracle_image=" << images.size() << " dim=" << fg.dim_linear;
  detail = ds.str();
  return fg.image_size == static_cast<long long>(images.size()) && images.size() == 90 &&
         fg.K == Rational(9) && fg.dim_linear == 5;
}

}  // namespace detail

inline constexpr int kCriteriaCount = 11;

inline CriterionResult run_criterion(int id) {
  struct Entry {
    const char* name;
    bool (*fn)(std::string&);
  };
  static const Entry table[kCriteriaCount] = {
      {"kelly-end-to-end", detail::crit_kelly},
      {"delta-sg-dimension-bound", detail::crit_lines_dim_bound},
      {"soundness-sweep", detail::crit_soundness},
      {"property-s-equivalence", detail::crit_property_s},
      {"scaling-guarantee", detail::crit_scaling},
      {"cover-contracts", detail::crit_covers},
      {"lemma-inequalities", detail::crit_lemmas},
      {"triple-systems", detail::crit_triples},
      {"tight-example-guard", detail::crit_tight_example},
      {"monotone-rigidity", detail::crit_rigidity},
      {"freiman-checker", detail::crit_freiman},
  };
  if (id < 1 || id > kCriteriaCount) throw InvalidParams("criterion id out of range");
  CriterionResult r;
  r.id = id;
  r.name = table[id - 1].name;
  auto t0 = std::chrono::steady_clock::now();
  try {
    r.pass = table[id - 1].fn(r.detail);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
             .count();
  return r;
}

inline std::vector<CriterionResult> run_all_criteria() {
  std::vector<CriterionResult> v;
  for (int id = 1; id <= kCriteriaCount; ++id) v.push_back(run_criterion(id));
  return v;
}

}  // namespace rankcert
