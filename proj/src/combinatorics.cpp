#include "urnlab/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "urnlab/random.hpp"

namespace urnlab {

namespace {

constexpr std::int64_t kLogFactorialTableSize = 1 << 17;

const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactorialTableSize);
    for (std::int64_t i = 0; i < kLogFactorialTableSize; ++i) {
      t[static_cast<std::size_t>(i)] = std::lgamma(static_cast<double>(i) + 1.0);
    }
    t[0] = 0.0;
    t[1] = 0.0;
    return t;
  }();
  return table;
}

void require_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binomial: probability must lie in [0,1], got " +
                                std::to_string(p));
  }
}

void require_trials(int trials) {
  if (trials < 0) {
    throw std::invalid_argument("binomial: trials must be nonnegative, got " +
                                std::to_string(trials));
  }
}

void normalize(std::vector<double>& w) {
  CompensatedSum s;
  for (double v : w) s.add(v);
  const double total = s.value();
  if (total > 0.0) {
    for (double& v : w) v /= total;
  }
}

// Fill a pmf on [lo, hi] from its mode using successive probability ratios.
// up(j) = p(j+1)/p(j), down(j) = p(j-1)/p(j).
template <typename Up, typename Down>
std::vector<double> fill_from_mode(int lo, int hi, int mode, double p_mode, Up up, Down down) {
  std::vector<double> w(static_cast<std::size_t>(hi - lo + 1), 0.0);
  w[static_cast<std::size_t>(mode - lo)] = p_mode;
  double p = p_mode;
  for (int j = mode; j < hi && p > 0.0; ++j) {
    p *= up(j);
    w[static_cast<std::size_t>(j + 1 - lo)] = p;
  }
  p = p_mode;
  for (int j = mode; j > lo && p > 0.0; --j) {
    p *= down(j);
    w[static_cast<std::size_t>(j - 1 - lo)] = p;
  }
  return w;
}

// Chop-down inverse-CDF search alternating outward from the mode.
template <typename Up, typename Down>
int sample_from_mode(int lo, int hi, int mode, double p_mode, Up up, Down down, Rng& source) {
  double u = source.uniform();
  if (u < p_mode) return mode;
  u -= p_mode;
  int upper = mode;
  int lower = mode;
  double p_upper = p_mode;
  double p_lower = p_mode;
  while (upper < hi || lower > lo) {
    if (upper < hi) {
      p_upper *= up(upper);
      ++upper;
      if (u < p_upper) return upper;
      u -= p_upper;
    }
    if (lower > lo) {
      p_lower *= down(lower);
      --lower;
      if (u < p_lower) return lower;
      u -= p_lower;
    }
  }
  // Only reachable through rounding in the accumulated mass.
  return mode;
}

struct HyperRatios {
  double N, K, r;
  double up(int j) const {
    return (K - j) * (r - j) / ((j + 1.0) * (N - K - r + j + 1.0));
  }
  double down(int j) const {
    return j * (N - K - r + j) / ((K - j + 1.0) * (r - j + 1.0));
  }
};

int binomial_mode(int trials, double p) {
  const int m = static_cast<int>(std::floor((trials + 1) * p));
  return std::clamp(m, 0, trials);
}

}  // namespace

double LogWeight::linear() const { return is_zero() ? 0.0 : std::exp(value); }

LogWeight operator/(LogWeight a, LogWeight b) {
  if (b.is_zero()) throw std::domain_error("LogWeight: division by zero");
  if (a.is_zero()) return LogWeight::zero();
  return LogWeight{a.value - b.value};
}

double DiscretePMF::total() const {
  CompensatedSum s;
  for (double w : weights) s.add(w);
  return s.value();
}

double DiscretePMF::mean() const {
  CompensatedSum s;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    s.add(weights[i] * static_cast<double>(offset + static_cast<int>(i)));
  }
  return s.value();
}

double DiscretePMF::variance() const {
  const double m = mean();
  CompensatedSum s;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double d = static_cast<double>(offset + static_cast<int>(i)) - m;
    s.add(weights[i] * d * d);
  }
  return s.value();
}

double log_factorial(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  if (n < kLogFactorialTableSize) return log_factorial_table()[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

LogWeight log_binomial(std::int64_t m, std::int64_t r) {
  if (m < 0) throw std::invalid_argument("log_binomial: m must be nonnegative");
  if (r < 0 || r > m) return LogWeight::zero();
  if (r == 0 || r == m) return LogWeight::one();
  return LogWeight{log_factorial(m) - log_factorial(r) - log_factorial(m - r)};
}

void validate_hypergeometric(std::int64_t N, std::int64_t K, std::int64_t r) {
  if (N < 0 || K < 0 || K > N || r < 0 || r > N) {
    throw std::invalid_argument("hypergeometric: invalid parameters N=" + std::to_string(N) +
                                " K=" + std::to_string(K) + " r=" + std::to_string(r));
  }
}

int hypergeometric_support_lo(int N, int K, int r) { return std::max(0, r - (N - K)); }
int hypergeometric_support_hi(int /*N*/, int K, int r) { return std::min(K, r); }

int hypergeometric_mode(int N, int K, int r) {
  const auto m = static_cast<int>((static_cast<std::int64_t>(r) + 1) *
                                  (static_cast<std::int64_t>(K) + 1) /
                                  (static_cast<std::int64_t>(N) + 2));
  return std::clamp(m, hypergeometric_support_lo(N, K, r), hypergeometric_support_hi(N, K, r));
}

LogWeight hypergeometric_log_pmf(int N, int K, int r, int j) {
  validate_hypergeometric(N, K, r);
  if (j < hypergeometric_support_lo(N, K, r) || j > hypergeometric_support_hi(N, K, r)) {
    return LogWeight::zero();
  }
  return log_binomial(K, j) * log_binomial(N - K, r - j) / log_binomial(N, r);
}

double hypergeometric_pmf(int N, int K, int r, int j) {
  return hypergeometric_log_pmf(N, K, r, j).linear();
}

DiscretePMF hypergeometric_dist(int N, int K, int r) {
  validate_hypergeometric(N, K, r);
  const int lo = hypergeometric_support_lo(N, K, r);
  const int hi = hypergeometric_support_hi(N, K, r);
  const int mode = hypergeometric_mode(N, K, r);
  const HyperRatios ratios{static_cast<double>(N), static_cast<double>(K), static_cast<double>(r)};
  DiscretePMF out;
  out.offset = lo;
  out.weights = fill_from_mode(
      lo, hi, mode, hypergeometric_pmf(N, K, r, mode),
      [&](int j) { return ratios.up(j); }, [&](int j) { return ratios.down(j); });
  normalize(out.weights);
  return out;
}

int hypergeometric_sample(int N, int K, int r, Rng& source) {
  validate_hypergeometric(N, K, r);
  const int lo = hypergeometric_support_lo(N, K, r);
  const int hi = hypergeometric_support_hi(N, K, r);
  if (lo == hi) return lo;
  const int mode = hypergeometric_mode(N, K, r);
  const HyperRatios ratios{static_cast<double>(N), static_cast<double>(K), static_cast<double>(r)};
  return sample_from_mode(
      lo, hi, mode, hypergeometric_pmf(N, K, r, mode), [&](int j) { return ratios.up(j); },
      [&](int j) { return ratios.down(j); }, source);
}

double binomial_pmf(int trials, double p, int j) {
  require_trials(trials);
  require_probability(p);
  if (j < 0 || j > trials) return 0.0;
  if (p == 0.0) return j == 0 ? 1.0 : 0.0;
  if (p == 1.0) return j == trials ? 1.0 : 0.0;
  const double lp = log_binomial(trials, j).value + j * std::log(p) +
                    (trials - j) * std::log1p(-p);
  return std::exp(lp);
}

DiscretePMF binomial_dist(int trials, double p) {
  require_trials(trials);
  require_probability(p);
  DiscretePMF out;
  if (p == 0.0 || p == 1.0) {
    out.offset = p == 0.0 ? 0 : trials;
    out.weights = {1.0};
    return out;
  }
  const double odds = p / (1.0 - p);
  const int mode = binomial_mode(trials, p);
  out.offset = 0;
  out.weights = fill_from_mode(
      0, trials, mode, binomial_pmf(trials, p, mode),
      [&](int j) { return (trials - j) / (j + 1.0) * odds; },
      [&](int j) { return j / (trials - j + 1.0) / odds; });
  normalize(out.weights);
  return out;
}

int binomial_sample(int trials, double p, Rng& source) {
  require_trials(trials);
  require_probability(p);
  if (p == 0.0) return 0;
  if (p == 1.0) return trials;
  const double odds = p / (1.0 - p);
  const int mode = binomial_mode(trials, p);
  return sample_from_mode(
      0, trials, mode, binomial_pmf(trials, p, mode),
      [&](int j) { return (trials - j) / (j + 1.0) * odds; },
      [&](int j) { return j / (trials - j + 1.0) / odds; }, source);
}

double tv(const DiscretePMF& p, const DiscretePMF& q) {
  if (p.empty() && q.empty()) return 0.0;
  const int lo = p.empty() ? q.lo() : (q.empty() ? p.lo() : std::min(p.lo(), q.lo()));
  const int hi = p.empty() ? q.hi() : (q.empty() ? p.hi() : std::max(p.hi(), q.hi()));
  CompensatedSum s;
  for (int x = lo; x <= hi; ++x) s.add(std::abs(p.at(x) - q.at(x)));
  return std::clamp(0.5 * s.value(), 0.0, 1.0);
}

HyperBinomTV hyper_vs_binom_tv(int N, int K, int r) {
  validate_hypergeometric(N, K, r);
  if (N == 0) throw std::invalid_argument("hyper_vs_binom_tv: empty population");
  const double bound = 4.0 * r / N;
  if (r == 0) return {0.0, bound};
  const DiscretePMF hyper = hypergeometric_dist(N, K, r);
  const DiscretePMF binom = binomial_dist(r, static_cast<double>(K) / N);
  return {tv(hyper, binom), bound};
}

ShiftedBinomTV shifted_binom_tv(int k, int g) {
  if (k < 1) throw std::invalid_argument("shifted_binom_tv: k must be positive");
  const DiscretePMF mu = binomial_dist(k, 0.5);
  const int s = std::abs(g);

  // Frame of the lower law: lower(x) = mu(x), upper(x) = mu(x - s).
  CompensatedSum direct;
  for (int x = 0; x <= k + s; ++x) direct.add(std::abs(mu.at(x) - mu.at(x - s)));

  const double ln2k = k * std::log(2.0);
  auto log_mu = [&](int x) {
    return (x < 0 || x > k) ? -std::numeric_limits<double>::infinity()
                            : log_binomial(k, x).value - ln2k;
  };
  auto lower_dominates = [&](int x) {
    const double a = log_mu(x);
    const double b = log_mu(x - s);
    if (b == -std::numeric_limits<double>::infinity()) return true;
    if (a == -std::numeric_limits<double>::infinity()) return false;
    return a >= b - 1e-12 * std::max(1.0, std::abs(b));
  };

  int x_star = -1;
  while (x_star + 1 <= k + s && lower_dominates(x_star + 1)) ++x_star;
  bool single = true;
  for (int x = x_star + 1; x <= k + s; ++x) {
    if (lower_dominates(x)) {
      single = false;
      break;
    }
  }

  CompensatedSum window;
  for (int y = x_star - s + 1; y <= x_star; ++y) window.add(mu.at(y));

  ShiftedBinomTV out;
  out.tv = std::clamp(0.5 * direct.value(), 0.0, 1.0);
  out.crossing = g >= 0 ? x_star : x_star + g;
  out.crossing_tv = window.value();
  out.single_crossing = single;
  return out;
}

double log_exp_moment_hypergeom(int N, int K, int r, double h) {
  validate_hypergeometric(N, K, r);
  if (N == 0) throw std::invalid_argument("exp_moment_hypergeom: empty population");
  const int lo = hypergeometric_support_lo(N, K, r);
  const int hi = hypergeometric_support_hi(N, K, r);
  const double mean = static_cast<double>(r) * K / N;
  std::vector<double> terms;
  std::vector<double> masses;
  terms.reserve(static_cast<std::size_t>(hi - lo + 1));
  masses.reserve(terms.capacity());
  double term_max = -std::numeric_limits<double>::infinity();
  double mass_max = term_max;
  for (int j = lo; j <= hi; ++j) {
    const double lp = hypergeometric_log_pmf(N, K, r, j).value;
    masses.push_back(lp);
    terms.push_back(lp + h * (j - mean));
    term_max = std::max(term_max, terms.back());
    mass_max = std::max(mass_max, lp);
  }
  CompensatedSum t_sum;
  CompensatedSum m_sum;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    t_sum.add(std::exp(terms[i] - term_max));
    m_sum.add(std::exp(masses[i] - mass_max));
  }
  // Self-normalized so pmf rounding cancels.
  return (term_max + std::log(t_sum.value())) - (mass_max + std::log(m_sum.value()));
}

double exp_moment_hypergeom(int N, int K, int r, double h) {
  return std::exp(log_exp_moment_hypergeom(N, K, r, h));
}

}  // namespace urnlab
