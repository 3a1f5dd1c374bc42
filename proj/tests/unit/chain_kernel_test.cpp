#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "exact_oracle.hpp"
#include "urnlab/chain_kernel.hpp"
#include "urnlab/mixing.hpp"
#include "urnlab/random.hpp"

using namespace urnlab;

TEST_SUITE("chain_kernel") {

TEST_CASE("params validation") {
  CHECK_NOTHROW((ChainParams{1, 0}.validate()));
  CHECK_NOTHROW((ChainParams{5, 5}.validate()));
  CHECK_THROWS_AS((ChainParams{0, 0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ChainParams{5, 6}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ChainParams{5, -1}.validate()), std::invalid_argument);
}

TEST_CASE("transition probabilities at n=2, k=1") {
  const ChainParams p{2, 1};
  CHECK(transition_prob(p, 1, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(transition_prob(p, 1, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(transition_prob(p, 1, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(transition_prob(p, 0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(transition_prob(p, 0, 0) == 0.0);
  CHECK(transition_prob(p, 0, 2) == 0.0);
  const auto k = build_kernel(p);
  CHECK(k(2, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("full swap and identity") {
  for (int n : {1, 3, 8, 17}) {
    for (int i = 0; i <= n; ++i) {
      CHECK(transition_prob({n, n}, i, n - i) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(transition_prob({n, 0}, i, i) == 1.0);
    }
    const auto id = build_kernel({n, 0});
    for (int i = 0; i <= n; ++i) CHECK(id.row(i).size() == 1);
  }
}

TEST_CASE("kernel rows match the rational oracle") {
  for (int n = 1; n <= oracle::kMaxUrn; ++n) {
    for (int k = 0; k <= n; ++k) {
      for (int i = 0; i <= n; ++i) {
        const auto exact = oracle::kernel_row(n, k, i);
        for (int j = 0; j <= n; ++j) {
          CHECK(std::abs(transition_prob({n, k}, i, j) - oracle::to_double(exact[j])) <= 1e-13);
        }
      }
    }
  }
}

TEST_CASE("rows sum to one and satisfy detailed balance") {
  for (int n : {2, 7, 30, 60, 151}) {
    for (int k : {1, n / 3, n / 2, n - 1}) {
      if (k < 1) continue;
      const auto kernel = build_kernel({n, k});
      CHECK(kernel.max_row_deviation() <= 1e-12);
      CHECK(kernel.max_balance_error() <= 1e-12);
      const auto pi = stationary(n);
      for (int i = 0; i <= n; ++i) {
        for (int j = kernel.row_lo(i); j <= kernel.row_hi(i); ++j) {
          CHECK(kernel(i, j) >= 0.0);
          CHECK(std::abs(pi.weights[i] * kernel(i, j) - pi.weights[j] * kernel(j, i)) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("stationary distribution") {
  const auto one = stationary(1);
  CHECK(one.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(one.weights[1] == doctest::Approx(0.5).epsilon(1e-15));
  const auto two = stationary(2);
  CHECK(two.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(two.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(two.weights[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  for (int n : {3, 12}) {
    const auto exact = oracle::stationary(n);
    const auto pi = stationary(n);
    for (int j = 0; j <= n; ++j) CHECK(pi.weights[j] == doctest::Approx(oracle::to_double(exact[j])).epsilon(1e-14));
  }
  const auto big = stationary(500);
  CHECK(big.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(big.mean() == doctest::Approx(250.0).epsilon(1e-12));
  CHECK(big.variance() == doctest::Approx(500.0 * 500.0 / (4.0 * 999.0)).epsilon(1e-10));
}

TEST_CASE("evolve") {
  const auto kernel = build_kernel({40, 7});
  const auto pi = stationary(40);
  const auto next = evolve(kernel, pi);
  for (int j = 0; j <= 40; ++j) CHECK(std::abs(next.weights[j] - pi.weights[j]) <= 1e-12);

  const auto id = build_kernel({9, 0});
  auto d = StateDistribution::point_mass(9, 4);
  d.weights[2] = 0.25;
  d.weights[4] = 0.75;
  CHECK(evolve(id, d).weights == d.weights);

  const auto small = evolve(build_kernel({2, 1}), StateDistribution::point_mass(2, 0));
  CHECK(small.weights[0] == 0.0);
  CHECK(small.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(small.weights[2] == 0.0);
}

TEST_CASE("step_sample") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    CHECK(step_sample({20, 0}, 7, rng) == 7);
    CHECK(step_sample({20, 1}, 0, rng) == 1);
    CHECK(step_sample({20, 20}, 7, rng) == 13);
    const int x = step_sample({20, 4}, 9, rng);
    CHECK(x >= 5);
    CHECK(x <= 13);
  }
}

TEST_CASE("complement params") {
  CHECK(complement_params({10, 3}) == ChainParams{10, 7});
  for (int k = 0; k <= 10; ++k) CHECK(complement_params(complement_params({10, k})) == ChainParams{10, k});
  // k and n-k differ by the reflection y -> n - y
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) {
      CHECK(std::abs(transition_prob({40, 3}, i, j) - transition_prob({40, 37}, i, 40 - j)) <= 1e-14);
    }
  }
  const auto a = mixing_profile(build_kernel({40, 3}), 60, StartPolicy::AllStates);
  const auto b = mixing_profile(build_kernel({40, 37}), 60, StartPolicy::AllStates);
  for (std::size_t t = 0; t < a.distances.size(); ++t) {
    CHECK(std::abs(a.distances[t] - b.distances[t]) <= 1e-10);
  }
}

}
