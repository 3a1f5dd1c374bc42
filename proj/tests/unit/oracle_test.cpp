#include "doctest.h"
#include "exact_oracle.hpp"

using namespace urnlab::oracle;

TEST_SUITE("oracle") {

TEST_CASE("binomials") {
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(52, 5) == 2598960);
  CHECK(binomial(5, 6) == 0);
  CHECK(binomial(0, 0) == 1);
}

TEST_CASE("kernel rows are distributions") {
  for (int n = 1; n <= 8; ++n) {
    for (int k = 0; k <= n; ++k) {
      for (int i = 0; i <= n; ++i) {
        Rational s = 0;
        for (const auto& p : kernel_row(n, k, i)) {
          CHECK(p >= 0);
          s += p;
        }
        CHECK(s == 1);
      }
    }
  }
  const auto row = kernel_row(2, 1, 1);
  CHECK(row[0] == Rational(1, 4));
  CHECK(row[1] == Rational(1, 2));
  CHECK(row[2] == Rational(1, 4));
}

TEST_CASE("stationary law is reversible") {
  for (int n = 1; n <= 7; ++n) {
    const auto pi = stationary(n);
    Rational s = 0;
    for (const auto& p : pi) s += p;
    CHECK(s == 1);
    for (int k = 0; k <= n; ++k) {
      for (int i = 0; i <= n; ++i) {
        const auto ri = kernel_row(n, k, i);
        for (int j = 0; j <= n; ++j) CHECK(pi[i] * ri[j] == pi[j] * kernel_row(n, k, j)[i]);
      }
    }
  }
  CHECK(stationary(2)[1] == Rational(2, 3));
}

TEST_CASE("coupled law has the kernel rows as marginals") {
  for (int n = 2; n <= 6; ++n) {
    for (int k = 1; k <= n; ++k) {
      const auto law = coupled_step_law(n, k, n, 1);
      std::vector<Rational> mx(n + 1, Rational(0)), my(n + 1, Rational(0));
      for (const auto& [xy, p] : law) {
        mx[xy.first] += p;
        my[xy.second] += p;
      }
      CHECK(mx == kernel_row(n, k, n));
      CHECK(my == kernel_row(n, k, 1));
    }
  }
}

TEST_CASE("micro step moments") {
  const auto m = micro_step_moments(4, 1, 0, 3, 2);
  CHECK(m.drift == Rational(-1, 4));
  const auto same = micro_step_moments(6, 2, 3, 2, 2);
  CHECK(same.drift == 0);
  CHECK_THROWS(micro_step_moments(4, 1, 0, 5, 2));
}

}
