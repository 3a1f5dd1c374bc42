#pragma once

#include <cstdint>
#include <vector>

#include "urnlab/chain_kernel.hpp"

namespace urnlab {

/// f1(x) = 1 - 2x/n.
double f1(int n, double x);

/// f2(x) = 1 - 2(2n-1)x/n^2 + 2(2n-1)x(x-1)/(n^2(n-1)); requires n >= 2.
double f2(int n, double x);

/// base^t for integer t >= 0, computed as exp(t ln|base|) with the sign
/// tracked by parity. 0^0 = 1.
double signed_power(double base, std::int64_t t);

struct EigenPair {
  int index = 1;
  double eigenvalue = 0.0;
  std::vector<double> values;
};

/// f_index on {0..n} with eigenvalue f_index(k). index must be 1 or 2.
EigenPair eigen_pair(const ChainParams& params, int index);

/// max_x |sum_j P(x,j) f(j) - lambda f(x)|.
double eigen_residual(const BandedKernel& kernel, const EigenPair& pair);

/// E(X_t | X_0 = x0).
double conditional_mean(const ChainParams& params, std::int64_t t, double x0);

/// Var(X_t | X_0 = x0).
double conditional_variance(const ChainParams& params, std::int64_t t, double x0);

/// M_t = f1(x) / (1 - 2k/n)^t. Throws std::domain_error when 2k = n.
double martingale_value(const ChainParams& params, std::int64_t t, double x);

/// E(f1(X_t)^2 | X_0 = x0) = 1/(2n-1) + (2n-2)/(2n-1) f2(k)^t f2(x0).
double second_moment_f1(const ChainParams& params, std::int64_t t, double x0);

/// (n^2/r^2) (1-2k/n)^{-2(t2-t1)} E(f1(X_{t2})^2 | X_0 = x0), bounding
/// P(max_{t1<=t<=t2} |X_t - n/2| > r). Throws std::domain_error when 2k = n
/// and std::invalid_argument unless 0 <= t1 <= t2 and r > 0.
double doob_bound(const ChainParams& params, std::int64_t t1, std::int64_t t2, double r,
                  double x0);

/// n / (r - sqrt n)^2, bounding P(|X_t - n/2| > r) once t >= (n/4k) ln n.
/// Returns +inf when r <= sqrt n.
double chebyshev_window_bound(int n, double r);

/// ceil((n/4k) ln n); requires k >= 1.
std::int64_t cutoff_time(const ChainParams& params);

}  // namespace urnlab
