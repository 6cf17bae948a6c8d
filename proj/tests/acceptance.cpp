#include <catch2/catch_amalgamated.hpp>

#include <iostream>

#include "rankcert/selftest.hpp"

namespace {

rankcert::CriterionResult report(int id) {
  rankcert::CriterionResult r = rankcert::run_criterion(id);
  std::cout << "criterion " << r.id << " (" << r.name << "): " << (r.pass ? "PASS" : "FAIL")
            << " [" << r.ms << " ms] " << r.detail << std::endl;
  return r;
}

}  // namespace

TEST_CASE("criterion 1: kelly-end-to-end") { REQUIRE(report(1).pass); }
TEST_CASE("criterion 2: delta-sg-dimension-bound") { REQUIRE(report(2).pass); }
TEST_CASE("criterion 3: soundness-sweep") { REQUIRE(report(3).pass); }
TEST_CASE("criterion 4: property-s-equivalence") { REQUIRE(report(4).pass); }
TEST_CASE("criterion 5: scaling-guarantee") { REQUIRE(report(5).pass); }
TEST_CASE("criterion 6: cover-contracts") { REQUIRE(report(6).pass); }
TEST_CASE("criterion 7: lemma-inequalities") { REQUIRE(report(7).pass); }
TEST_CASE("criterion 8: triple-systems") { REQUIRE(report(8).pass); }
TEST_CASE("criterion 9: tight-example-guard") { REQUIRE(report(9).pass); }
TEST_CASE("criterion 10: monotone-rigidity") { REQUIRE(report(10).pass); }
TEST_CASE("criterion 11: freiman-checker") { REQUIRE(report(11).pass); }
