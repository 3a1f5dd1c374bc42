#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "urnlab/verification.hpp"

using namespace urnlab;

TEST_SUITE("verification") {

TEST_CASE("make_report directions") {
  CHECK(make_report("a", 1, 0, 0.5, 0.5, "<=", 0.0).passed);
  CHECK_FALSE(make_report("a", 1, 0, 0.6, 0.5, "<=", 0.0).passed);
  CHECK(make_report("a", 1, 0, 0.6, 0.5, "<=", 0.1).passed);
  CHECK(make_report("a", 1, 0, 0.5, 0.6, "==", 0.1).passed);
  CHECK_FALSE(make_report("a", 1, 0, 0.5, 0.7, "==", 0.1).passed);
  CHECK(make_report("a", 1, 0, 9.0, 8.0, ">=", 0.0).passed);
  CHECK_FALSE(make_report("a", 1, 0, 7.0, 8.0, ">=", 0.0).passed);
  CHECK_FALSE(make_report("a", 1, 0, NAN, 8.0, "<=", 1.0).passed);
  CHECK_THROWS_AS(make_report("a", 1, 0, 0.0, 0.0, "<", 0.0), std::invalid_argument);
  CHECK(all_passed({}));
  CHECK_FALSE(all_passed({make_report("a", 1, 0, 1.0, 0.0, "<=", 0.0)}));
}

TEST_CASE("proportion rule") {
  const auto r = proportion_report("p", {100, 10}, 0.105, 0.1, 10000, 3);
  CHECK(r.passed);
  CHECK(r.tolerance == doctest::Approx(3.0 * std::sqrt(0.105 * 0.895 / 10000)));
  CHECK_FALSE(proportion_report("p", {100, 10}, 0.2, 0.1, 10000, 3).passed);
  CHECK(proportion_report("p", {100, 10}, 0.0, 0.0, 10000, 3).passed);
}

TEST_CASE("exact suite on a small grid") {
  const auto reports = run_exact_suite(14, 1e-12, 1);
  std::set<std::string> names;
  for (const auto& r : reports) {
    names.insert(r.name);
    CHECK_MESSAGE(r.passed, r.name);
    CHECK(r.replicas == 0);
  }
  CHECK(names.size() >= 10);
  CHECK(names.count("kernel_vs_rational_oracle") == 1);
  CHECK(names.count("f1_squared_decomposition") == 1);
  CHECK_THROWS(run_exact_suite(301));
  CHECK_THROWS(run_exact_suite(1));
}

TEST_CASE("parallel exact checks do not depend on jobs") {
  const auto a = check_hyper_binom_bound(120, 1);
  const auto b = check_hyper_binom_bound(120, 3);
  CHECK(a.statistic == b.statistic);
  CHECK(a.n == b.n);
  const auto grid = full_half_grid(2, 16);
  const auto p1 = check_start_policies(grid, 0.05, {0.25}, 1e-12, 1);
  const auto p3 = check_start_policies(grid, 0.05, {0.25}, 1e-12, 3);
  CHECK(p1.extremes_agreement.statistic == p3.extremes_agreement.statistic);
  CHECK(p1.nw_sandwich.statistic == p3.nw_sandwich.statistic);
}

TEST_CASE("individual exact checks") {
  CHECK(check_kernel_vs_oracle(8, 1e-13).passed);
  CHECK(check_f1_f2_identity(500, 1e-12).passed);
  CHECK(check_contraction_enumeration(9).statistic == 0.0);
  CHECK(check_shifted_binom_endpoint().passed);
  CHECK(check_shifted_binom_crossing(300, 1e-14).passed);
  const auto ladder = check_shifted_binom_ladder(4, 1);
  CHECK_FALSE(ladder.passed);
  CHECK(ladder.statistic == doctest::Approx(0.20899255059712185 - 0.19568299980660148).epsilon(1e-10));
  CHECK_FALSE(check_shifted_binom_ladder(4, 2).passed);
  CHECK(check_complement_symmetry(12, 20, 1e-12).passed);
}

TEST_CASE("start policy checks") {
  const auto grid = full_half_grid(2, 20);
  CHECK(grid.front() == ChainParams{2, 1});
  CHECK(grid.size() == 100);
  const auto pc = check_start_policies(grid, 0.01, {0.25, 0.1}, 1e-12);
  CHECK(pc.extremes_agreement.passed);
  CHECK(pc.profile_monotone.passed);
  CHECK(pc.nw_sandwich.passed);
  // the bound fails at eps = 0.01 for n = 2
  CHECK_FALSE(check_start_policies({{2, 1}}, 0.01, {0.01}, 1e-12).nw_sandwich.passed);
}

TEST_CASE("mgf probe") {
  const auto m = mgf_constant_probe({20, 50}, {-0.5, 0.1, 1.0});
  CHECK(m.reports.size() == 2);
  CHECK(all_passed(m.reports));
  CHECK(m.min_constant >= 8.0);
  CHECK(m.sixteen_holds == (m.min_constant >= 16.0));
  const auto full = mgf_constant_probe(default_mgf_populations(), default_mgf_h_grid());
  CHECK(full.min_constant == doctest::Approx(8.000833).epsilon(1e-6));
  CHECK_FALSE(full.sixteen_holds);
}

TEST_CASE("stochastic checks are reproducible") {
  const auto a = check_step_sample_row(20000, 5, 1);
  const auto b = check_step_sample_row(20000, 5, 4);
  CHECK(a.statistic == b.statistic);
  CHECK(a.seed == 5);
  const auto s1 = check_hitting_lemma({100, 10}, 2000, 7, 1);
  const auto s2 = check_hitting_lemma({100, 10}, 2000, 7, 2);
  REQUIRE(s1.size() == 2);
  CHECK(s1[0].statistic == s2[0].statistic);
  CHECK(s1[0].passed);
}

}
