#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace urnlab {

class Rng;

/// Natural logarithm of a nonnegative quantity. Zero is encoded as -inf.
struct LogWeight {
  double value = -std::numeric_limits<double>::infinity();

  static constexpr LogWeight zero() { return LogWeight{}; }
  static constexpr LogWeight one() { return LogWeight{0.0}; }

  bool is_zero() const { return value == -std::numeric_limits<double>::infinity(); }
  double linear() const;

  friend LogWeight operator*(LogWeight a, LogWeight b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return LogWeight{a.value + b.value};
  }
  friend LogWeight operator/(LogWeight a, LogWeight b);
};

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Probability mass function on consecutive integers offset, offset+1, ...
struct DiscretePMF {
  int offset = 0;
  std::vector<double> weights;

  int lo() const { return offset; }
  int hi() const { return offset + static_cast<int>(weights.size()) - 1; }
  bool empty() const { return weights.empty(); }
  double at(int x) const {
    if (x < lo() || x > hi()) return 0.0;
    return weights[static_cast<std::size_t>(x - offset)];
  }
  double total() const;
  double mean() const;
  double variance() const;
};

/// ln n! for n >= 0, from a precomputed table for moderate n.
double log_factorial(std::int64_t n);

/// ln C(m, r); zero encoding when r is outside [0, m].
LogWeight log_binomial(std::int64_t m, std::int64_t r);

// Hypergeometric law: j successes in r draws without replacement from a
// population of N holding K successes. All functions throw
// std::invalid_argument unless 0 <= K <= N and 0 <= r <= N.
void validate_hypergeometric(std::int64_t N, std::int64_t K, std::int64_t r);
int hypergeometric_support_lo(int N, int K, int r);
int hypergeometric_support_hi(int N, int K, int r);
int hypergeometric_mode(int N, int K, int r);
LogWeight hypergeometric_log_pmf(int N, int K, int r, int j);
double hypergeometric_pmf(int N, int K, int r, int j);
DiscretePMF hypergeometric_dist(int N, int K, int r);

/// Inverse-CDF draw with the search walked outward from the mode.
int hypergeometric_sample(int N, int K, int r, Rng& source);

// Binomial law Bin(trials, p). Throws std::invalid_argument unless
// trials >= 0 and 0 <= p <= 1.
double binomial_pmf(int trials, double p, int j);
DiscretePMF binomial_dist(int trials, double p);
int binomial_sample(int trials, double p, Rng& source);

/// Total variation distance; supports are aligned by integer index.
double tv(const DiscretePMF& p, const DiscretePMF& q);

struct HyperBinomTV {
  double tv;
  double bound;  // 4r/N
};

/// Exact TV(Hyper(N,K,r), Bin(r, K/N)) together with the 4r/N bound.
HyperBinomTV hyper_vs_binom_tv(int N, int K, int r);

struct ShiftedBinomTV {
  double tv;              // direct half-L1 summation
  int crossing;           // x* (see below)
  double crossing_tv;     // P(x* - |g| < B <= x*) in the frame of the lower law
  bool single_crossing;   // lower(x) >= upper(x) iff x <= x*
};

/// TV between Bin(k,1/2) and g + Bin(k,1/2).
///
/// `crossing` is the point x* such that the law with the smaller offset
/// dominates exactly on x <= x*. For g > 0 that is Bin(k,1/2) itself; for
/// g < 0 the roles swap and x* is reported in the original coordinates.
/// `crossing_tv` is the probability P(x0 - |g| < Bin(k,1/2) <= x0) where x0
/// is x* shifted into the frame of the lower law.
ShiftedBinomTV shifted_binom_tv(int k, int g);

/// E exp(h (H - E H)) for H ~ Hyper(N, K, r), accumulated in log space.
double exp_moment_hypergeom(int N, int K, int r, double h);
double log_exp_moment_hypergeom(int N, int K, int r, double h);

}  // namespace urnlab
