#include "urnlab/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "urnlab/combinatorics.hpp"

namespace urnlab {

namespace {

void require_nonnegative_time(std::int64_t t) {
  if (t < 0) throw std::invalid_argument("time must be nonnegative");
}

double contraction_factor(const ChainParams& params) {
  return 1.0 - 2.0 * params.k / params.n;
}

}  // namespace

double f1(int n, double x) {
  if (n < 1) throw std::invalid_argument("f1: n must be >= 1");
  return 1.0 - 2.0 * x / n;
}

double f2(int n, double x) {
  if (n < 2) throw std::invalid_argument("f2: n must be >= 2");
  const double nn = static_cast<double>(n) * n;
  const double c = 2.0 * (2.0 * n - 1.0);
  return 1.0 - c * x / nn + c * x * (x - 1.0) / (nn * (n - 1.0));
}

double signed_power(double base, std::int64_t t) {
  require_nonnegative_time(t);
  if (t == 0) return 1.0;
  if (base == 0.0) return 0.0;
  const double magnitude = std::exp(static_cast<double>(t) * std::log(std::abs(base)));
  return (base < 0.0 && (t % 2 == 1)) ? -magnitude : magnitude;
}

EigenPair eigen_pair(const ChainParams& params, int index) {
  params.validate();
  if (index != 1 && index != 2) throw std::invalid_argument("eigen_pair: index must be 1 or 2");
  EigenPair pair;
  pair.index = index;
  auto f = index == 1 ? f1 : f2;
  pair.eigenvalue = f(params.n, params.k);
  pair.values.resize(static_cast<std::size_t>(params.n) + 1);
  for (int x = 0; x <= params.n; ++x) pair.values[static_cast<std::size_t>(x)] = f(params.n, x);
  return pair;
}

double eigen_residual(const BandedKernel& kernel, const EigenPair& pair) {
  if (pair.values.size() != static_cast<std::size_t>(kernel.n()) + 1) {
    throw std::invalid_argument("eigen_residual: size mismatch");
  }
  double worst = 0.0;
  for (int x = 0; x <= kernel.n(); ++x) {
    const auto r = kernel.row(x);
    const int lo = kernel.row_lo(x);
    CompensatedSum s;
    for (std::size_t t = 0; t < r.size(); ++t) {
      s.add(r[t] * pair.values[static_cast<std::size_t>(lo) + t]);
    }
    const double lhs = s.value();
    worst = std::max(worst, std::abs(lhs - pair.eigenvalue * pair.values[static_cast<std::size_t>(x)]));
  }
  return worst;
}

double conditional_mean(const ChainParams& params, std::int64_t t, double x0) {
  params.validate();
  require_nonnegative_time(t);
  const double half = params.n / 2.0;
  return half - signed_power(contraction_factor(params), t) * (half - x0);
}

double conditional_variance(const ChainParams& params, std::int64_t t, double x0) {
  params.validate();
  require_nonnegative_time(t);
  const double n = params.n;
  if (params.n < 2) {
    // Single ball per urn: the state is fixed or flips deterministically.
    return 0.0;
  }
  const double a = n * n / (4.0 * (2.0 * n - 1.0));
  const double b = n * n * (n - 1.0) / (2.0 * (2.0 * n - 1.0));
  const double lam2 = signed_power(f2(params.n, params.k), t);
  const double lam1 = signed_power(contraction_factor(params), 2 * t);
  const double g = f1(params.n, x0);
  return a + b * lam2 * f2(params.n, x0) - n * n / 4.0 * lam1 * g * g;
}

double martingale_value(const ChainParams& params, std::int64_t t, double x) {
  params.validate();
  require_nonnegative_time(t);
  if (2 * params.k == params.n) {
    throw std::domain_error("martingale_value: normalizer vanishes when 2k = n");
  }
  return f1(params.n, x) / signed_power(contraction_factor(params), t);
}

double second_moment_f1(const ChainParams& params, std::int64_t t, double x0) {
  params.validate();
  require_nonnegative_time(t);
  if (params.n < 2) return 1.0;
  const double n = params.n;
  return 1.0 / (2.0 * n - 1.0) +
         (2.0 * n - 2.0) / (2.0 * n - 1.0) * signed_power(f2(params.n, params.k), t) *
             f2(params.n, x0);
}

double doob_bound(const ChainParams& params, std::int64_t t1, std::int64_t t2, double r,
                  double x0) {
  params.validate();
  if (t1 < 0 || t2 < t1) throw std::invalid_argument("doob_bound: need 0 <= t1 <= t2");
  if (!(r > 0.0)) throw std::invalid_argument("doob_bound: r must be positive");
  if (2 * params.k == params.n) {
    throw std::domain_error("doob_bound: normalizer vanishes when 2k = n");
  }
  const double n = params.n;
  const double growth = 1.0 / signed_power(contraction_factor(params), 2 * (t2 - t1));
  return n * n / (r * r) * growth * second_moment_f1(params, t2, x0);
}

double chebyshev_window_bound(int n, double r) {
  const double root = std::sqrt(static_cast<double>(n));
  if (r <= root) return std::numeric_limits<double>::infinity();
  return n / ((r - root) * (r - root));
}

std::int64_t cutoff_time(const ChainParams& params) {
  params.validate();
  if (params.k < 1) throw std::invalid_argument("cutoff_time: k must be >= 1");
  return static_cast<std::int64_t>(
      std::ceil(params.n / (4.0 * params.k) * std::log(static_cast<double>(params.n))));
}

}  // namespace urnlab
