#include "urnlab/chain_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "urnlab/combinatorics.hpp"
#include "urnlab/random.hpp"

namespace urnlab {

namespace {

constexpr double kRowHardTolerance = 1e-9;

void require_state(const ChainParams& params, int x, const char* what) {
  if (x < 0 || x > params.n) {
    throw std::invalid_argument(std::string(what) + ": state " + std::to_string(x) +
                                " outside [0," + std::to_string(params.n) + "]");
  }
}

}  // namespace

void ChainParams::validate() const {
  if (n < 1) throw std::invalid_argument("n must be >= 1, got " + std::to_string(n));
  if (k < 0 || k > n) {
    throw std::invalid_argument("k must lie in [0,n], got k=" + std::to_string(k) +
                                " with n=" + std::to_string(n));
  }
}

StateDistribution StateDistribution::point_mass(int n, int x) {
  if (n < 0 || x < 0 || x > n) throw std::invalid_argument("point_mass: state out of range");
  StateDistribution d;
  d.n = n;
  d.weights.assign(static_cast<std::size_t>(n) + 1, 0.0);
  d.weights[static_cast<std::size_t>(x)] = 1.0;
  return d;
}

double StateDistribution::total() const {
  CompensatedSum s;
  for (double w : weights) s.add(w);
  return s.value();
}

double StateDistribution::mean() const {
  CompensatedSum s;
  for (std::size_t x = 0; x < weights.size(); ++x) s.add(weights[x] * static_cast<double>(x));
  return s.value();
}

double StateDistribution::variance() const {
  const double m = mean();
  CompensatedSum s;
  for (std::size_t x = 0; x < weights.size(); ++x) {
    const double d = static_cast<double>(x) - m;
    s.add(weights[x] * d * d);
  }
  return s.value();
}

BandedKernel::BandedKernel(ChainParams params, std::vector<std::vector<double>> rows)
    : params_(params) {
  params_.validate();
  if (rows.size() != static_cast<std::size_t>(params_.n) + 1) {
    throw std::invalid_argument("BandedKernel: expected n+1 rows");
  }
  start_.resize(rows.size() + 1);
  std::size_t offset = 0;
  for (int i = 0; i <= params_.n; ++i) {
    const auto width = static_cast<std::size_t>(row_hi(i) - row_lo(i) + 1);
    if (rows[static_cast<std::size_t>(i)].size() != width) {
      throw std::invalid_argument("BandedKernel: row " + std::to_string(i) +
                                  " does not match the band width");
    }
    start_[static_cast<std::size_t>(i)] = offset;
    offset += width;
  }
  start_.back() = offset;
  data_.reserve(offset);
  for (auto& r : rows) data_.insert(data_.end(), r.begin(), r.end());
}

int BandedKernel::row_lo(int i) const { return std::max(0, i - params_.k); }
int BandedKernel::row_hi(int i) const { return std::min(params_.n, i + params_.k); }

std::span<const double> BandedKernel::row(int i) const {
  const auto a = start_[static_cast<std::size_t>(i)];
  const auto b = start_[static_cast<std::size_t>(i) + 1];
  return {data_.data() + a, b - a};
}

double BandedKernel::operator()(int i, int j) const {
  if (j < row_lo(i) || j > row_hi(i)) return 0.0;
  return row(i)[static_cast<std::size_t>(j - row_lo(i))];
}

double transition_prob(const ChainParams& params, int i, int j) {
  params.validate();
  require_state(params, i, "transition_prob");
  require_state(params, j, "transition_prob");
  const int n = params.n;
  const int k = params.k;
  if (std::abs(i - j) > k) return 0.0;

  // m reds leave the left urn, j - i + m reds arrive from the right urn.
  const int m_lo = std::max(0, i - j);
  const int m_hi = std::min(i, k);
  std::vector<double> logs;
  double top = -std::numeric_limits<double>::infinity();
  for (int m = m_lo; m <= m_hi; ++m) {
    const int b = j - i + m;
    const LogWeight w = log_binomial(i, m) * log_binomial(n - i, k - m) *
                        log_binomial(n - i, b) * log_binomial(i, k - b);
    if (w.is_zero()) continue;
    logs.push_back(w.value);
    top = std::max(top, w.value);
  }
  if (logs.empty()) return 0.0;
  CompensatedSum s;
  for (double v : logs) s.add(std::exp(v - top));
  return std::exp(top + std::log(s.value()) - 2.0 * log_binomial(n, k).value);
}

std::vector<double> kernel_row(const ChainParams& params, int i) {
  params.validate();
  require_state(params, i, "kernel_row");
  const int n = params.n;
  const int k = params.k;
  const int lo = std::max(0, i - k);
  const int hi = std::min(n, i + k);
  const DiscretePMF leave = hypergeometric_dist(n, i, k);
  const DiscretePMF arrive = hypergeometric_dist(n, n - i, k);
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(hi - lo + 1));
  for (int a = leave.lo(); a <= leave.hi(); ++a) {
    const double pa = leave.at(a);
    if (pa == 0.0) continue;
    for (int b = arrive.lo(); b <= arrive.hi(); ++b) {
      acc[static_cast<std::size_t>(i - a + b - lo)].add(pa * arrive.at(b));
    }
  }
  std::vector<double> out(acc.size());
  for (std::size_t t = 0; t < acc.size(); ++t) out[t] = acc[t].value();
  return out;
}

BandedKernel build_kernel(const ChainParams& params) {
  params.validate();
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(params.n) + 1);
  double worst = 0.0;
  for (int i = 0; i <= params.n; ++i) {
    auto r = kernel_row(params, i);
    CompensatedSum s;
    for (double v : r) s.add(v);
    const double total = s.value();
    const double dev = std::abs(total - 1.0);
    if (dev > kRowHardTolerance) {
      throw std::runtime_error("build_kernel: row " + std::to_string(i) + " of (n=" +
                               std::to_string(params.n) + ",k=" + std::to_string(params.k) +
                               ") sums to " + std::to_string(total));
    }
    worst = std::max(worst, dev);
    if (dev > 0.0) {
      for (double& v : r) v /= total;
    }
    rows[static_cast<std::size_t>(i)] = std::move(r);
  }
  BandedKernel kernel(params, std::move(rows));
  kernel.max_row_deviation_ = worst;

  const StateDistribution pi = stationary(params.n);
  double balance = 0.0;
  for (int i = 0; i <= params.n; ++i) {
    for (int j = i + 1; j <= kernel.row_hi(i); ++j) {
      balance = std::max(balance, std::abs(pi[i] * kernel(i, j) - pi[j] * kernel(j, i)));
    }
  }
  kernel.max_balance_error_ = balance;
  return kernel;
}

StateDistribution stationary(int n) {
  if (n < 1) throw std::invalid_argument("stationary: n must be >= 1");
  StateDistribution pi;
  pi.n = n;
  const DiscretePMF h = hypergeometric_dist(2 * n, n, n);
  pi.weights.resize(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) pi.weights[static_cast<std::size_t>(j)] = h.at(j);
  return pi;
}

StateDistribution evolve(const BandedKernel& kernel, const StateDistribution& dist) {
  if (dist.n != kernel.n() || dist.weights.size() != static_cast<std::size_t>(kernel.n()) + 1) {
    throw std::invalid_argument("evolve: distribution size does not match kernel");
  }
  const int n = kernel.n();
  std::vector<double> sum(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> comp(sum.size(), 0.0);
  for (int i = 0; i <= n; ++i) {
    const double w = dist.weights[static_cast<std::size_t>(i)];
    if (w == 0.0) continue;
    const int lo = kernel.row_lo(i);
    const auto r = kernel.row(i);
    for (std::size_t t = 0; t < r.size(); ++t) {
      const double x = w * r[t];
      const std::size_t j = static_cast<std::size_t>(lo) + t;
      const double s = sum[j] + x;
      if (std::abs(sum[j]) >= std::abs(x)) {
        comp[j] += (sum[j] - s) + x;
      } else {
        comp[j] += (x - s) + sum[j];
      }
      sum[j] = s;
    }
  }
  StateDistribution out;
  out.n = n;
  out.weights.resize(sum.size());
  for (std::size_t j = 0; j < sum.size(); ++j) out.weights[j] = sum[j] + comp[j];
  return out;
}

int step_sample(const ChainParams& params, int x, Rng& source) {
  require_state(params, x, "step_sample");
  if (params.k == 0) return x;
  const int gain = hypergeometric_sample(params.n, params.n - x, params.k, source);
  const int loss = hypergeometric_sample(params.n, x, params.k, source);
  return x + gain - loss;
}

ChainParams complement_params(const ChainParams& params) {
  return ChainParams{params.n, params.n - params.k};
}

}  // namespace urnlab
