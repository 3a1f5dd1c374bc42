#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "exact_oracle.hpp"
#include "urnlab/chain_kernel.hpp"
#include "urnlab/mixing.hpp"
#include "urnlab/spectral.hpp"

using namespace urnlab;
using oracle::Rational;

namespace {

// Exact distribution of X_t from x0 by rational matrix powers.
std::vector<Rational> exact_law(int n, int k, int x0, int t) {
  std::vector<Rational> d(n + 1, Rational(0));
  d[x0] = 1;
  std::vector<std::vector<Rational>> rows;
  for (int i = 0; i <= n; ++i) rows.push_back(oracle::kernel_row(n, k, i));
  for (int s = 0; s < t; ++s) {
    std::vector<Rational> next(n + 1, Rational(0));
    for (int i = 0; i <= n; ++i) {
      if (d[i] == 0) continue;
      for (int j = 0; j <= n; ++j) next[j] += d[i] * rows[i][j];
    }
    d = std::move(next);
  }
  return d;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("eigenfunction values") {
  CHECK(f1(10, 5) == 0.0);
  CHECK(f1(10, 0) == 1.0);
  CHECK(f1(10, 10) == -1.0);
  CHECK(f2(2, 1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(f2(7, 0) == 1.0);
}

TEST_CASE("f1 squared decomposes into f2") {
  for (int n = 2; n <= 500; n += 3) {
    for (int x = 0; x <= n; ++x) {
      const double lhs = f1(n, x) * f1(n, x);
      const double rhs = 1.0 / (2.0 * n - 1) + (2.0 * n - 2) / (2.0 * n - 1) * f2(n, x);
      CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
  }
}

TEST_CASE("eigen residuals") {
  for (int n : {2, 9, 50, 200}) {
    for (int k = 0; k <= n / 2; k += std::max(1, n / 7)) {
      const auto kernel = build_kernel({n, k});
      CHECK(eigen_residual(kernel, eigen_pair({n, k}, 1)) <= 1e-10);
      CHECK(eigen_residual(kernel, eigen_pair({n, k}, 2)) <= 1e-10);
    }
  }
  CHECK_THROWS(eigen_pair({10, 2}, 3));
}

TEST_CASE("conditional mean") {
  CHECK(conditional_mean({100, 25}, 0, 13) == 13.0);
  CHECK(conditional_mean({100, 25}, 1, 0) == doctest::Approx(25.0).epsilon(1e-14));
  for (int t : {0, 1, 5, 100}) CHECK(conditional_mean({100, 7}, t, 50) == doctest::Approx(50.0).epsilon(1e-14));
}

TEST_CASE("conditional variance") {
  CHECK(conditional_variance({30, 4}, 0, 3) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(conditional_variance({2, 1}, 1, 1) == doctest::Approx(0.5).epsilon(1e-15));
  const double limit = 100.0 * 100.0 / (4.0 * 199.0);
  CHECK(conditional_variance({100, 10}, 5000, 0) == doctest::Approx(limit).epsilon(1e-12));
}

TEST_CASE("moments against rational propagation") {
  for (int n : {3, 8, 11}) {
    for (int k = 1; k <= n / 2; ++k) {
      for (int x0 : {0, n / 3, n}) {
        for (int t : {1, 2, 6}) {
          const auto law = exact_law(n, k, x0, t);
          Rational m1 = 0, m2 = 0;
          for (int j = 0; j <= n; ++j) {
            m1 += law[j] * j;
            m2 += law[j] * j * j;
          }
          const double mean = oracle::to_double(m1);
          const double var = oracle::to_double(m2 - m1 * m1);
          CHECK(conditional_mean({n, k}, t, x0) == doctest::Approx(mean).epsilon(1e-12));
          CHECK(std::abs(conditional_variance({n, k}, t, x0) - var) <= 1e-12 * std::max(1.0, var));
        }
      }
    }
  }
}

TEST_CASE("martingale") {
  CHECK(martingale_value({30, 4}, 0, 7) == doctest::Approx(f1(30, 7)).epsilon(1e-15));
  CHECK(martingale_value({30, 4}, 9, 15) == 0.0);
  CHECK_THROWS_AS(martingale_value({2, 1}, 1, 0), std::domain_error);
  // one step: sum_j P(x,j) M_{t+1}(j) = M_t(x)
  const ChainParams p{40, 6};
  const auto kernel = build_kernel(p);
  for (int x = 0; x <= 40; ++x) {
    double s = 0.0;
    for (int j = kernel.row_lo(x); j <= kernel.row_hi(x); ++j) s += kernel(x, j) * martingale_value(p, 4, j);
    CHECK(s == doctest::Approx(martingale_value(p, 3, x)).epsilon(1e-12));
  }
}

TEST_CASE("second moment of f1") {
  CHECK(second_moment_f1({30, 4}, 0, 3) == doctest::Approx(f1(30, 3) * f1(30, 3)).epsilon(1e-13));
  CHECK(second_moment_f1({30, 4}, 100000, 3) == doctest::Approx(1.0 / 59.0).epsilon(1e-12));
}

TEST_CASE("doob and chebyshev bounds") {
  const ChainParams p{100, 5};
  const auto ts = cutoff_time(p);
  CHECK(ts == static_cast<std::int64_t>(std::ceil(100.0 / 20.0 * std::log(100.0))));
  CHECK(doob_bound(p, ts, ts, 30, 0) >= 0.0);
  CHECK(doob_bound(p, ts - 5, ts, 30, 0) >= doob_bound(p, ts, ts, 30, 0));
  CHECK_THROWS_AS(doob_bound({10, 5}, 1, 2, 3, 0), std::domain_error);
  CHECK_THROWS_AS(doob_bound(p, 3, 2, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(doob_bound(p, 1, 2, 0, 0), std::invalid_argument);
  CHECK(chebyshev_window_bound(100, 30) == doctest::Approx(100.0 / 400.0));
  CHECK(signed_power(-0.5, 3) == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(signed_power(0.0, 0) == 1.0);
}

}
