#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace urnlab {

class Rng;

/// Urn size n and swap size k of the two-urn chain.
struct ChainParams {
  int n = 1;
  int k = 0;

  /// Throws std::invalid_argument unless 1 <= n and 0 <= k <= n.
  void validate() const;
  bool ergodic() const { return k > 0 && k < n; }
  bool operator==(const ChainParams&) const = default;
};

/// Probability vector over {0, ..., n}.
struct StateDistribution {
  int n = 0;
  std::vector<double> weights;

  static StateDistribution point_mass(int n, int x);
  double operator[](int x) const { return weights[static_cast<std::size_t>(x)]; }
  double total() const;
  double mean() const;
  double variance() const;
};

/// Transition matrix stored on the band |i - j| <= k.
class BandedKernel {
 public:
  BandedKernel() = default;

  /// Takes ownership of per-row band values; rows[i] covers [row_lo(i), row_hi(i)].
  BandedKernel(ChainParams params, std::vector<std::vector<double>> rows);

  const ChainParams& params() const { return params_; }
  int n() const { return params_.n; }
  int k() const { return params_.k; }
  int row_lo(int i) const;
  int row_hi(int i) const;
  std::span<const double> row(int i) const;
  double operator()(int i, int j) const;

  /// Largest |row sum - 1| seen before renormalization.
  double max_row_deviation() const { return max_row_deviation_; }
  /// Largest |pi(i) P(i,j) - pi(j) P(j,i)| over band pairs.
  double max_balance_error() const { return max_balance_error_; }

 private:
  friend BandedKernel build_kernel(const ChainParams& params);

  ChainParams params_{};
  std::vector<std::size_t> start_;
  std::vector<double> data_;
  double max_row_deviation_ = 0.0;
  double max_balance_error_ = 0.0;
};

/// Single entry evaluated directly from the double-binomial sum.
/// Out-of-band pairs return exactly 0. Throws on invalid states.
double transition_prob(const ChainParams& params, int i, int j);

/// Row i on [max(0,i-k), min(n,i+k)] as the law of i - A + B with
/// A ~ Hyper(n, i, k) and B ~ Hyper(n, n-i, k) independent.
std::vector<double> kernel_row(const ChainParams& params, int i);

/// Builds every row. Throws std::runtime_error if a row sum misses 1 by
/// more than 1e-9; smaller deviations are renormalized.
BandedKernel build_kernel(const ChainParams& params);

/// pi_n(j) = C(n,j)^2 / C(2n,n).
StateDistribution stationary(int n);

/// One step: returns dist * P. Throws std::invalid_argument on size mismatch.
StateDistribution evolve(const BandedKernel& kernel, const StateDistribution& dist);

/// x' = x + H1 - H2 with H1 ~ Hyper(n, n-x, k), H2 ~ Hyper(n, x, k).
int step_sample(const ChainParams& params, int x, Rng& source);

/// (n, k) -> (n, n - k).
ChainParams complement_params(const ChainParams& params);

}  // namespace urnlab
