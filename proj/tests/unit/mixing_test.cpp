#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "urnlab/chain_kernel.hpp"
#include "urnlab/mixing.hpp"

using namespace urnlab;

TEST_SUITE("mixing") {

TEST_CASE("policies") {
  CHECK(parse_start_policy("extremes") == StartPolicy::Extremes);
  CHECK(parse_start_policy("all-states") == StartPolicy::AllStates);
  CHECK_THROWS_AS(parse_start_policy("some"), std::invalid_argument);
  CHECK(policy_starts(5, StartPolicy::Extremes) == std::vector<int>{0, 5});
  CHECK(policy_starts(2, StartPolicy::AllStates) == std::vector<int>{0, 1, 2});
}

TEST_CASE("distance examples at n=2, k=1") {
  const auto kernel = build_kernel({2, 1});
  CHECK(distance_from(kernel, 0, 0) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  // from 0 the chain sits at 1 after one step; the row of state 1 is (1/4, 1/2, 1/4)
  CHECK(distance_from(kernel, 0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(distance_from(kernel, 1, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(distance_from(kernel, 0, 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(distance(stationary(30), stationary(30)) == 0.0);
  CHECK(mixing_time(kernel, 0.25, StartPolicy::Extremes) == 2);
  CHECK(mixing_time(kernel, 0.4, StartPolicy::Extremes) == 1);
  CHECK(mixing_time(kernel, 0.9, StartPolicy::AllStates) == 0);
  CHECK_THROWS_AS(mixing_time(kernel, 0.0, StartPolicy::Extremes), std::invalid_argument);
  CHECK_THROWS_AS(mixing_time(kernel, 1.0, StartPolicy::Extremes), std::invalid_argument);
}

TEST_CASE("t_mix exceeds the upper bound at n=2, k=1, eps=0.01") {
  const auto kernel = build_kernel({2, 1});
  CHECK(mixing_time(kernel, 0.01, StartPolicy::AllStates) == 7);
  CHECK(nw_upper_bound({2, 1}, 0.01) == 6);
  CHECK(mixing_time(kernel, 0.25, StartPolicy::AllStates) <= nw_upper_bound({2, 1}, 0.25));
}

TEST_CASE("non-ergodic parameters have no mixing time") {
  CHECK_FALSE(mixing_time(build_kernel({6, 0}), 0.25, StartPolicy::Extremes).has_value());
  CHECK_FALSE(mixing_time(build_kernel({6, 6}), 0.25, StartPolicy::Extremes).has_value());
}

TEST_CASE("d(0) under all-states") {
  for (int n : {2, 5, 20}) {
    const auto kernel = build_kernel({n, 1});
    CHECK(worst_distance(kernel, 0, StartPolicy::AllStates) ==
          doctest::Approx(1.0 - stationary(n).weights[0]).epsilon(1e-14));
  }
}

TEST_CASE("profiles are non-increasing and bounded") {
  for (int n : {9, 30, 61}) {
    for (int k : {1, n / 4, n / 2}) {
      const auto prof = mixing_profile(build_kernel({n, k}), 80, StartPolicy::AllStates);
      REQUIRE(prof.distances.size() == 81);
      for (std::size_t t = 0; t < prof.distances.size(); ++t) {
        CHECK(prof.distances[t] >= 0.0);
        CHECK(prof.distances[t] <= 1.0);
        if (t > 0) CHECK(prof.distances[t] <= prof.distances[t - 1] + 1e-12);
      }
    }
  }
}

TEST_CASE("extremes agree with all states") {
  for (int n : {4, 17, 40}) {
    for (int k = 1; k <= n / 2; k += 3) {
      const auto c = compare_start_policies({n, k}, 0.05);
      CHECK(c.reached);
      CHECK(c.max_gap <= 1e-12);
      CHECK(c.max_increase <= 1e-12);
    }
  }
}

TEST_CASE("mixing_profile_until stops at the threshold") {
  const auto kernel = build_kernel({50, 5});
  const auto p = mixing_profile_until(kernel, 0.25, StartPolicy::Extremes);
  const auto t = mixing_time(kernel, 0.25, StartPolicy::Extremes);
  REQUIRE(t.has_value());
  CHECK(p.times.back() == *t);
  CHECK(p.distances.back() <= 0.25);
}

TEST_CASE("cutoff profile") {
  const ChainParams p{200, 5};
  const auto pts = cutoff_profile(p, {0.0, 1.0, 2.0});
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].t == 0);
  CHECK(pts[0].d == doctest::Approx(1.0 - stationary(200).weights[0]).epsilon(1e-12));
  CHECK(pts[1].t == static_cast<std::int64_t>(std::ceil(200.0 / 20.0 * std::log(200.0))));
  CHECK(pts[2].d < pts[1].d);
  CHECK_THROWS(cutoff_profile(p, {-1.0}));
  CHECK_THROWS(cutoff_profile({10, 0}, {1.0}));
}

TEST_CASE("window diagnostic") {
  const auto recs = window_diagnostic({{250, 5}, {500, 5}, {40, 35}}, 0.25);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].t_mix == 88);
  CHECK(recs[1].t_mix == 194);
  CHECK(recs[1].ratio < recs[0].ratio);
  CHECK(recs[2].k == 5);
  for (const auto& r : recs) {
    CHECK(r.nw_ok);
    CHECK(r.nw_upper == nw_upper_bound({r.n, r.k}, 0.25));
  }
  CHECK(window_diagnostic({{250, 5}, {500, 5}}, 0.25, StartPolicy::Extremes, 2)[1].t_mix == 194);
}

}
