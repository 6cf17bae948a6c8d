#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "corpus.hpp"
#include "rankcert/geometry.hpp"

using namespace rankcert;

namespace {

PointConfiguration generic4() {
  PointConfiguration C(4, 2, true);
  const long long xs[4] = {0, 1, 0, 1};
  const long long ys[4] = {0, 0, 1, 2};
  for (int i = 0; i < 4; ++i) {
    C.set_exact(i, 0, GaussianRational(xs[i]));
    C.set_exact(i, 1, GaussianRational(ys[i]));
  }
  return C;
}

// three collinear points on the x-axis plus one apex off the line
PointConfiguration pencil4() {
  PointConfiguration C(4, 3, true);
  const long long coords[4][3] = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) C.set_exact(i, j, GaussianRational(coords[i][j]));
  return C;
}

PointConfiguration grid3_in_3d() {
  PointConfiguration G = testutil::grid3();
  PointConfiguration C(9, 3, true);
  for (int i = 0; i < 9; ++i) {
    C.set_exact(i, 0, G.xat(i, 0));
    C.set_exact(i, 1, G.xat(i, 1));
    C.set_exact(i, 2, GaussianRational(0));
  }
  return C;
}

}  // namespace

TEST_CASE("line classification on the 3x3 grid") {
  PointConfiguration G = testutil::grid3();
  LineIncidence L = special_lines(G);
  CHECK(L.special_count() == 8);
  CHECK(L.ordinary_count() == 12);
  // every point pair lies on exactly one listed line
  long long pair_total = 0;
  for (const auto& line : L.lines)
    pair_total += static_cast<long long>(line.size()) * (line.size() - 1) / 2;
  CHECK(pair_total == 36);

  // a float copy classifies identically
  PointConfiguration F(9, 2);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 2; ++j) F.set(i, j, G.at(i, j));
  LineIncidence Lf = special_lines(F);
  CHECK(Lf.special_count() == 8);
  CHECK(Lf.ordinary_count() == 12);

  CHECK(sg_delta(G) == Rational(1, 2));
  CHECK(affine_dim(G) == 2);
}

TEST_CASE("degenerate inputs are rejected") {
  PointConfiguration dup(2, 2, true);
  dup.set_exact(0, 0, GaussianRational(1));
  dup.set_exact(0, 1, GaussianRational(2));
  dup.set_exact(1, 0, GaussianRational(1));
  dup.set_exact(1, 1, GaussianRational(2));
  CHECK_THROWS_AS(special_lines(dup), DegenerateInput);

  PointConfiguration dupf(2, 1);
  dupf.set(0, 0, Complex(0.5, 0));
  dupf.set(1, 0, Complex(0.5, 1e-12));
  CHECK_THROWS_AS(special_lines(dupf), DegenerateInput);

  PointConfiguration one(1, 2);
  one.set(0, 0, Complex(0, 0));
  one.set(0, 1, Complex(0, 0));
  CHECK_THROWS_AS(sg_delta(one), InvalidParams);
  CHECK(affine_dim(one) == 0);

  CHECK_THROWS_AS(PointConfiguration(0, 2), InvalidParams);
}

TEST_CASE("idempotent latin squares") {
  auto L5 = idempotent_latin_square(5);
  REQUIRE(L5.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(L5[i][i] == i);

  auto L4 = idempotent_latin_square(4);
  std::vector<std::vector<int>> expected = {
      {0, 2, 3, 1}, {3, 1, 0, 2}, {1, 3, 2, 0}, {2, 0, 1, 3}};
  CHECK(L4 == expected);

  for (int r : {3, 4, 6, 8, 12, 17, 20}) {
    auto L = idempotent_latin_square(r);
    REQUIRE(static_cast<int>(L.size()) == r);
    for (int i = 0; i < r; ++i) {
      CHECK(L[i][i] == i);
      std::vector<char> row(r, 0), col(r, 0);
      for (int j = 0; j < r; ++j) {
        REQUIRE(L[i][j] >= 0);
        REQUIRE(L[i][j] < r);
        row[L[i][j]] = 1;
        col[L[j][i]] = 1;
      }
      CHECK(std::count(row.begin(), row.end(), 1) == r);
      CHECK(std::count(col.begin(), col.end(), 1) == r);
    }
  }

  CHECK_THROWS_AS(idempotent_latin_square(2), InvalidParams);
  CHECK_THROWS_AS(idempotent_latin_square(65), TooLarge);
}

TEST_CASE("triple systems") {
  for (int r = 3; r <= 12; ++r) {
    TripleSystem T = triple_system(r);
    CHECK(static_cast<int>(T.triples.size()) == r * (r - 1));
    std::vector<int> degree(r, 0);
    std::map<std::pair<int, int>, int> pair_mult;
    for (const auto& tr : T.triples) {
      CHECK(tr[0] != tr[1]);
      CHECK(tr[1] != tr[2]);
      CHECK(tr[0] != tr[2]);
      for (int x = 0; x < 3; ++x) {
        ++degree[tr[x]];
        for (int y = x + 1; y < 3; ++y)
          ++pair_mult[{std::min(tr[x], tr[y]), std::max(tr[x], tr[y])}];
      }
    }
    for (int v = 0; v < r; ++v) CHECK(degree[v] == 3 * (r - 1));
    for (const auto& [p, c] : pair_mult) CHECK(c <= 6);
  }
}

TEST_CASE("design matrix annihilates the homogeneous points") {
  PointConfiguration G = testutil::grid3();
  SGMatrix SG = sg_design_matrix(G);
  CHECK(SG.A.m == 48);  // 8 special lines, 6 triples each
  CHECK(SG.A.n == 9);
  CHECK(SG.V.m == 9);
  CHECK(SG.V.n == 3);
  CHECK(SG.delta == Rational(1, 2));
  REQUIRE(SG.A.exact);
  for (int r = 0; r < SG.A.m; ++r) {
    int support = 0;
    for (int j = 0; j < 9; ++j) support += !SG.A.xat(r, j).is_zero();
    CHECK(support == 3);
    for (int c = 0; c < 3; ++c) {
      GaussianRational dot(0);
      for (int j = 0; j < 9; ++j) dot = dot + SG.A.xat(r, j) * SG.V.xat(j, c);
      CHECK(dot.is_zero());
    }
  }

  CHECK_THROWS_AS(sg_design_matrix(generic4()), NoSpecialLines);
  PointConfiguration two(2, 2);
  two.set(0, 0, Complex(0, 0));
  two.set(1, 0, Complex(1, 0));
  CHECK_THROWS_AS(sg_design_matrix(two), NoSpecialLines);
}

TEST_CASE("fully special configurations take the kelly route") {
  PointConfiguration line5 = testutil::line_points(5);
  LineIncidence L = special_lines(line5);
  CHECK(L.special_count() == 1);
  CHECK(L.ordinary_count() == 0);
  CHECK(sg_delta(line5) == Rational(1));

  SGReport rep = sg_bound_check(line5);
  CHECK(rep.kelly_route);
  CHECK(rep.m_rows == 20);
  CHECK(rep.bound == Rational(20, 8));
  CHECK(rep.certified_rank == 3);
  CHECK(rep.rank_measured == 3);
  CHECK(rep.affine_dimension == 1);
  CHECK(rep.dim_bound == Rational(2));
  CHECK(rep.pass);

  PointConfiguration H = gen_hesse();
  LineIncidence LH = special_lines(H);
  CHECK(LH.special_count() == 12);
  CHECK(sg_delta(H) == Rational(1));
  SGReport rh = sg_bound_check(H);
  CHECK(rh.kelly_route);
  CHECK(rh.m_rows == 72);
  CHECK(rh.bound == Rational(6));
  CHECK(rh.certified_rank == 6);
  CHECK(rh.rank_measured == 6);
  CHECK(rh.affine_dimension == 2);
  CHECK(rh.pass);
}

TEST_CASE("partially special configurations use the direct bound") {
  SGReport rep = sg_bound_check(testutil::grid3());
  CHECK(!rep.kelly_route);
  CHECK(rep.delta == Rational(1, 2));
  CHECK(rep.m_rows == 48);
  CHECK(rep.bound == Rational(9 * 12, 12 + 36));
  CHECK(rep.certified_rank == 3);
  CHECK(rep.rank_measured >= 3);
  CHECK(rep.rank_measured <= 6);  // A annihilates the rank-3 homogeneous points
  CHECK(rep.affine_dimension == 2);
  CHECK(rep.dim_bound == Rational(24));
  CHECK(rep.pass);
}

TEST_CASE("average-case extraction") {
  PointConfiguration H = gen_hesse();
  ExtractReport rep = avg_case_extract(H, Rational(1, 2));
  CHECK(!rep.hypothesis_met);  // 36 special pairs < 81/2
  CHECK(rep.survivors.size() == 9);
  CHECK(rep.measured_delta == Rational(1));
  CHECK(rep.affine_dimension == 2);
  CHECK(rep.dim_bound == Rational(12));
  CHECK(rep.size_ok);
  CHECK(rep.dim_ok);
  CHECK(!rep.empty);

  ExtractReport rg = avg_case_extract(testutil::grid3(), Rational(1, 4));
  CHECK(rg.hypothesis_met);  // 24 special pairs >= 81/4
  CHECK(rg.survivors.size() == 9);
  CHECK(rg.measured_delta == Rational(1, 2));
  CHECK(rg.dim_ok);

  ExtractReport re = avg_case_extract(generic4(), Rational(1));
  CHECK(re.empty);
  CHECK(re.survivors.empty());
  CHECK(!re.notes.empty());

  CHECK_THROWS_AS(avg_case_extract(H, Rational(3, 2)), InvalidParams);
  CHECK_THROWS_AS(avg_case_extract(H, Rational(-1, 2)), InvalidParams);
}

TEST_CASE("flat deltas generalize the line delta") {
  PointConfiguration G = testutil::grid3();
  Rational d1 = flat_sg_delta(G, 1, FlatVariant::plain);
  CHECK(d1 == (sg_delta(G) * Rational(8) + 1) / Rational(9));
  CHECK(flat_sg_delta(G, 1, FlatVariant::star) == d1);

  PointConfiguration H = gen_hesse();
  CHECK(flat_sg_delta(H, 1, FlatVariant::plain) == Rational(1));

  PointConfiguration G3 = grid3_in_3d();
  CHECK(flat_sg_delta(G3, 2, FlatVariant::plain) == Rational(1));
  CHECK(flat_sg_delta(G3, 2, FlatVariant::star) == Rational(1));

  // a rich line plus an apex separates the two variants
  PointConfiguration P = pencil4();
  CHECK(flat_sg_delta(P, 2, FlatVariant::plain) == Rational(1));
  CHECK(flat_sg_delta(P, 2, FlatVariant::star) == Rational(3, 4));

  CHECK_THROWS_AS(flat_sg_delta(G, 0, FlatVariant::plain), InvalidParams);
  CHECK_THROWS_AS(flat_sg_delta(G, 3, FlatVariant::plain), InvalidParams);
  CHECK_THROWS_AS(flat_sg_delta(testutil::line_points(41), 1, FlatVariant::plain), TooLarge);
}

TEST_CASE("flat reports assert only the line case") {
  FlatReport r1 = flat_bound_check(testutil::grid3(), 1, FlatVariant::plain);
  CHECK(r1.asserted);
  CHECK(r1.pass);
  REQUIRE(r1.k_over_delta.has_value());
  CHECK(*r1.k_over_delta == Rational(9, 5));
  CHECK(r1.affine_dimension == 2);

  FlatReport r2 = flat_bound_check(grid3_in_3d(), 2, FlatVariant::star);
  CHECK(!r2.asserted);
  CHECK(r2.pass);
  CHECK(r2.delta == Rational(1));

  FlatReport r3 = flat_bound_check(generic4(), 1, FlatVariant::plain);
  CHECK(!r3.asserted);
  CHECK(r3.pass);
  CHECK(r3.delta == Rational(1, 4));  // only the tuple point itself qualifies
}

TEST_CASE("doubling report on an arithmetic progression") {
  PointConfiguration A(4, 1);
  for (int i = 0; i < 4; ++i) A.set(i, 0, Complex(i, 0));
  FreimanReport rep = freiman_report(A);
  CHECK(rep.set_size == 4);
  CHECK(rep.image_size == 5);
  CHECK(rep.K == Rational(5, 4));
  CHECK(rep.K_squared == Rational(25, 16));
  CHECK(rep.dim_linear == 1);
  CHECK(rep.dim_affine == 1);

  std::map<std::pair<int, int>, Complex> table;
  table[{0, 1}] = Complex(1.0 / 3.0, 0);
  FreimanReport rt = freiman_report(A, Complex(0.5, 0), &table);
  CHECK(rt.image_size == 6);
  CHECK(rt.K == Rational(3, 2));

  CHECK_THROWS_AS(freiman_report(A, Complex(0, 0)), InvalidAlpha);
  CHECK_THROWS_AS(freiman_report(A, Complex(1, 0)), InvalidAlpha);
  std::map<std::pair<int, int>, Complex> bad;
  bad[{1, 2}] = Complex(1, 0);
  CHECK_THROWS_AS(freiman_report(A, Complex(0.5, 0), &bad), InvalidAlpha);

  PointConfiguration dup(2, 1);
  dup.set(0, 0, Complex(3, 0));
  dup.set(1, 0, Complex(3, 0));
  CHECK_THROWS_AS(freiman_report(dup), DegenerateInput);
}
