#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "corpus.hpp"
#include "rankcert/scaling.hpp"

using namespace rankcert;

namespace {

ComplexMatrix from_pattern(const SupportPattern& P) {
  ComplexMatrix M(P.m, P.n);
  for (int i = 0; i < P.m; ++i)
    for (int j = 0; j < P.n; ++j)
      if (P.at(i, j)) M.set(i, j, Complex(1, 0));
  return M;
}

bool guarantees_hold(const ScalingResult& r, int m, int n, double eps) {
  return r.max_row_sq_norm <= 1.0 + eps &&
         r.min_col_sq_norm >= static_cast<double>(m) / n - eps;
}

}  // namespace

TEST_CASE("row and column norms") {
  ComplexMatrix M(2, 2);
  M.set(0, 0, Complex(3, 4));
  M.set(1, 1, Complex(0, 2));
  auto r = row_sq_norms(M);
  auto c = col_sq_norms(M);
  CHECK(r[0] == Catch::Approx(25.0));
  CHECK(r[1] == Catch::Approx(4.0));
  CHECK(c[0] == Catch::Approx(25.0));
  CHECK(c[1] == Catch::Approx(4.0));
}

TEST_CASE("apply_scaling guards") {
  ComplexMatrix M(2, 2);
  M.set(0, 0, Complex(1, 0));
  M.set(1, 1, Complex(1, 0));
  CHECK_THROWS_AS(apply_scaling(M, {1.0}, {1.0, 1.0}), DimensionMismatch);
  CHECK_THROWS_AS(apply_scaling(M, {1.0, 0.0}, {1.0, 1.0}), InvalidParams);
  ComplexMatrix S = apply_scaling(M, {2.0, 2.0}, {0.5, 3.0});
  CHECK(S.at(0, 0) == Complex(1, 0));
  CHECK(S.at(1, 1) == Complex(6, 0));
}

TEST_CASE("uniform matrices converge immediately") {
  for (auto [m, n] : {std::pair{3, 3}, std::pair{6, 2}, std::pair{2, 5}}) {
    ComplexMatrix M(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) M.set(i, j, Complex(1, 0));
    ScalingResult r = sinkhorn_scale(M);
    CHECK(r.converged);
    CHECK(r.iterations <= 2);
    CHECK(r.max_row_sq_norm == Catch::Approx(1.0));
    CHECK(r.min_col_sq_norm == Catch::Approx(static_cast<double>(m) / n));
  }
  ScalingResult id = sinkhorn_scale(ComplexMatrix::identity(4));
  CHECK(id.converged);
  CHECK(id.iterations <= 2);
}

TEST_CASE("scaled norms match the returned coefficients") {
  ComplexMatrix F = testutil::fano();
  ScalingResult r = sinkhorn_scale(F);
  REQUIRE(r.converged);
  CHECK(guarantees_hold(r, 7, 7, 1e-6));
  ComplexMatrix S = apply_scaling(F, r.rho, r.gamma);
  auto rs = row_sq_norms(S);
  auto cs = col_sq_norms(S);
  CHECK(*std::max_element(rs.begin(), rs.end()) == Catch::Approx(r.max_row_sq_norm));
  CHECK(*std::min_element(cs.begin(), cs.end()) == Catch::Approx(r.min_col_sq_norm));
  for (double v : r.rho) CHECK(v > 0);
  for (double v : r.gamma) CHECK(v > 0);
}

TEST_CASE("infeasible support is a soft failure with a diagnostic") {
  SupportPattern P(3, 3);
  P.set(0, 0, true);
  P.set(0, 1, true);
  P.set(0, 2, true);
  P.set(1, 0, true);
  P.set(2, 0, true);
  // rows {1,2} x cols {1,2} is an all-zero block: 2/3 + 2/3 > 1
  REQUIRE(!check_property_s_flow(P));
  ScalingResult r = sinkhorn_scale(from_pattern(P), 1e-6, 500);
  CHECK(!r.converged);
  CHECK(r.iterations == 500);
  CHECK(r.note.find("false") != std::string::npos);
}

TEST_CASE("tight feasible support still converges within the default cap") {
  // zero block {row 0} x {col 1}: 1/2 + 1/2 = 1, tight
  ComplexMatrix M(2, 2);
  M.set(0, 0, Complex(1, 0));
  M.set(1, 0, Complex(1, 0));
  M.set(1, 1, Complex(1, 0));
  REQUIRE(check_property_s_flow(support_pattern(M, 0.0)));
  ScalingResult r = sinkhorn_scale(M);
  CHECK(r.converged);
  CHECK(r.iterations < 100000);
  CHECK(guarantees_hold(r, 2, 2, 1e-6));
  CHECK(r.note.empty());

  // nested tight structure
  ComplexMatrix T(4, 4);
  T.set(0, 0, Complex(1, 0));
  T.set(1, 0, Complex(1, 0));
  T.set(1, 1, Complex(1, 0));
  T.set(2, 1, Complex(0, 1));
  T.set(2, 2, Complex(1, 0));
  T.set(3, 2, Complex(2, 0));
  T.set(3, 3, Complex(1, 1));
  REQUIRE(check_property_s_flow(support_pattern(T, 0.0)));
  ScalingResult rt = sinkhorn_scale(T);
  CHECK(rt.converged);
  CHECK(guarantees_hold(rt, 4, 4, 1e-6));
}

TEST_CASE("zero lines are rejected") {
  ComplexMatrix Z(2, 2);
  Z.set(0, 0, Complex(1, 0));
  Z.set(0, 1, Complex(1, 0));
  CHECK_THROWS_AS(sinkhorn_scale(Z), ZeroLine);
  ComplexMatrix C(2, 2);
  C.set(0, 0, Complex(1, 0));
  C.set(1, 0, Complex(1, 0));
  CHECK_THROWS_AS(sinkhorn_scale(C), ZeroLine);
  ComplexMatrix M(1, 1);
  M.set(0, 0, Complex(1, 0));
  CHECK_THROWS_AS(sinkhorn_scale(M, 0.0), InvalidParams);
  CHECK_THROWS_AS(sinkhorn_scale(M, 1e-6, 0), InvalidParams);
}

TEST_CASE("flow check matches the brute-force oracle") {
  // all 3x3 patterns with no empty row or column
  for (std::uint32_t bits = 0; bits < (1u << 9); ++bits) {
    SupportPattern P(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) P.set(i, j, bits & (1u << (3 * i + j)));
    CHECK(check_property_s_flow(P) == check_property_s_bruteforce(P));
  }
  std::mt19937_64 rng(424242);
  for (int rep = 0; rep < 2000; ++rep) {
    int m = 1 + static_cast<int>(rng() % 8);
    int n = 1 + static_cast<int>(rng() % 8);
    SupportPattern P = testutil::random_pattern(rng, m, n, 10 + static_cast<int>(rng() % 81));
    CHECK(check_property_s_flow(P) == check_property_s_bruteforce(P));
  }
  SupportPattern big(17, 4);
  CHECK_THROWS_AS(check_property_s_bruteforce(big), TooLarge);
}

TEST_CASE("property-s certifies scalability on random supports") {
  std::mt19937_64 rng(987);
  int scaled = 0;
  for (int rep = 0; rep < 200; ++rep) {
    int m = 2 + static_cast<int>(rng() % 7);
    int n = 2 + static_cast<int>(rng() % 7);
    SupportPattern P = testutil::random_pattern(rng, m, n, 30 + static_cast<int>(rng() % 60));
    bool empty_line = false;
    for (int i = 0; i < m; ++i) empty_line |= P.row_support(i) == 0;
    for (int j = 0; j < n; ++j) empty_line |= P.col_support(j) == 0;
    if (empty_line || !check_property_s_flow(P)) continue;
    ScalingResult r = sinkhorn_scale(from_pattern(P));
    CHECK(r.converged);
    CHECK(guarantees_hold(r, m, n, 1e-6));
    ++scaled;
  }
  CHECK(scaled > 50);
}
