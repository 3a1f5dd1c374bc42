#include "urnlab/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "urnlab/combinatorics.hpp"
#include "urnlab/parallel.hpp"
#include "urnlab/spectral.hpp"

namespace urnlab {

namespace {

constexpr std::int64_t kRenormalizeEvery = 64;
constexpr double kDriftTolerance = 1e-12;

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
}

std::int64_t default_cap(const ChainParams& params, double eps) {
  return 4 * nw_upper_bound(params, eps) + 64;
}

ChainParams lower_half(const ChainParams& params) {
  return 2 * params.k > params.n ? complement_params(params) : params;
}

struct StartSet {
  std::vector<Evolver> evolvers;
  const StateDistribution* pi;

  StartSet(const BandedKernel& kernel, const StateDistribution& stationary_law, StartPolicy policy)
      : pi(&stationary_law) {
    for (int x : policy_starts(kernel.n(), policy)) {
      evolvers.emplace_back(kernel, StateDistribution::point_mass(kernel.n(), x));
    }
  }
  double worst() const {
    double w = 0.0;
    for (const auto& e : evolvers) w = std::max(w, distance(e.current(), *pi));
    return w;
  }
  void step() {
    for (auto& e : evolvers) e.step();
  }
};

}  // namespace

std::string_view to_string(StartPolicy policy) {
  return policy == StartPolicy::AllStates ? "all-states" : "extremes";
}

StartPolicy parse_start_policy(std::string_view text) {
  if (text == "all-states") return StartPolicy::AllStates;
  if (text == "extremes") return StartPolicy::Extremes;
  throw std::invalid_argument("policy must be all-states or extremes, got '" + std::string(text) +
                              "'");
}

std::vector<int> policy_starts(int n, StartPolicy policy) {
  if (policy == StartPolicy::Extremes) return n == 0 ? std::vector<int>{0} : std::vector<int>{0, n};
  std::vector<int> all(static_cast<std::size_t>(n) + 1);
  std::iota(all.begin(), all.end(), 0);
  return all;
}

Evolver::Evolver(const BandedKernel& kernel, StateDistribution start)
    : kernel_(&kernel), dist_(std::move(start)) {
  if (dist_.n != kernel.n()) throw std::invalid_argument("Evolver: size mismatch");
}

void Evolver::step() {
  dist_ = evolve(*kernel_, dist_);
  ++t_;
  if (t_ % kRenormalizeEvery == 0) {
    const double total = dist_.total();
    if (std::abs(total - 1.0) > kDriftTolerance) {
      for (double& w : dist_.weights) w /= total;
    }
  }
}

void Evolver::advance_to(std::int64_t t) {
  if (t < t_) throw std::invalid_argument("Evolver: cannot move backwards in time");
  while (t_ < t) step();
}

double distance(const StateDistribution& a, const StateDistribution& b) {
  if (a.weights.size() != b.weights.size()) throw std::invalid_argument("distance: size mismatch");
  CompensatedSum s;
  for (std::size_t x = 0; x < a.weights.size(); ++x) s.add(std::abs(a.weights[x] - b.weights[x]));
  return std::clamp(0.5 * s.value(), 0.0, 1.0);
}

double distance_from(const BandedKernel& kernel, int x0, std::int64_t t) {
  if (t < 0) throw std::invalid_argument("distance_from: t must be nonnegative");
  Evolver e(kernel, StateDistribution::point_mass(kernel.n(), x0));
  e.advance_to(t);
  return distance(e.current(), stationary(kernel.n()));
}

double worst_distance(const BandedKernel& kernel, std::int64_t t, StartPolicy policy) {
  if (t < 0) throw std::invalid_argument("worst_distance: t must be nonnegative");
  const StateDistribution pi = stationary(kernel.n());
  StartSet set(kernel, pi, policy);
  for (std::int64_t s = 0; s < t; ++s) set.step();
  return set.worst();
}

std::int64_t nw_upper_bound(const ChainParams& params, double eps) {
  params.validate();
  require_eps(eps);
  const int k = std::min(params.k, params.n - params.k);
  if (k < 1) throw std::invalid_argument("nw_upper_bound: chain is not ergodic");
  return static_cast<std::int64_t>(
      std::ceil(params.n / (2.0 * k) * std::log(params.n / eps)));
}

std::optional<std::int64_t> mixing_time(const BandedKernel& kernel, double eps,
                                        StartPolicy policy, std::int64_t t_cap) {
  require_eps(eps);
  if (!kernel.params().ergodic()) return std::nullopt;
  if (t_cap <= 0) t_cap = default_cap(kernel.params(), eps);
  const StateDistribution pi = stationary(kernel.n());
  StartSet set(kernel, pi, policy);
  for (std::int64_t t = 0; t <= t_cap; ++t) {
    if (t > 0) set.step();
    if (set.worst() <= eps) return t;
  }
  return std::nullopt;
}

MixingProfile mixing_profile(const BandedKernel& kernel, std::int64_t t_max, StartPolicy policy) {
  if (t_max < 0) throw std::invalid_argument("mixing_profile: t_max must be nonnegative");
  MixingProfile profile{kernel.params(), policy, {}, {}};
  const StateDistribution pi = stationary(kernel.n());
  StartSet set(kernel, pi, policy);
  for (std::int64_t t = 0; t <= t_max; ++t) {
    if (t > 0) set.step();
    profile.times.push_back(t);
    profile.distances.push_back(set.worst());
  }
  return profile;
}

MixingProfile mixing_profile_until(const BandedKernel& kernel, double eps, StartPolicy policy,
                                   std::int64_t t_cap) {
  require_eps(eps);
  MixingProfile profile{kernel.params(), policy, {}, {}};
  if (t_cap <= 0) {
    t_cap = kernel.params().ergodic() ? default_cap(kernel.params(), eps) : 0;
  }
  const StateDistribution pi = stationary(kernel.n());
  StartSet set(kernel, pi, policy);
  for (std::int64_t t = 0; t <= t_cap; ++t) {
    if (t > 0) set.step();
    const double d = set.worst();
    profile.times.push_back(t);
    profile.distances.push_back(d);
    if (d <= eps) break;
  }
  return profile;
}

std::vector<CutoffPoint> cutoff_profile(const ChainParams& params,
                                        const std::vector<double>& multipliers,
                                        StartPolicy policy) {
  params.validate();
  if (!params.ergodic()) throw std::invalid_argument("cutoff_profile: need 0 < k < n");
  const ChainParams p = lower_half(params);
  const double scale = p.n / (4.0 * p.k) * std::log(static_cast<double>(p.n));
  std::vector<CutoffPoint> out;
  out.reserve(multipliers.size());
  for (double c : multipliers) {
    if (!(c >= 0.0)) throw std::invalid_argument("cutoff_profile: multipliers must be >= 0");
    out.push_back({c, static_cast<std::int64_t>(std::ceil(c * scale)), 0.0});
  }
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out[a].t < out[b].t; });

  const BandedKernel kernel = build_kernel(p);
  const StateDistribution pi = stationary(p.n);
  StartSet set(kernel, pi, policy);
  std::int64_t t = 0;
  for (std::size_t idx : order) {
    while (t < out[idx].t) {
      set.step();
      ++t;
    }
    out[idx].d = set.worst();
  }
  return out;
}

std::vector<CutoffScanRecord> window_diagnostic(const std::vector<ChainParams>& ladder, double eps,
                                                StartPolicy policy, int jobs) {
  require_eps(eps);
  for (const auto& p : ladder) {
    p.validate();
    if (!p.ergodic()) {
      throw std::invalid_argument("window_diagnostic: (n=" + std::to_string(p.n) +
                                  ",k=" + std::to_string(p.k) + ") is not ergodic");
    }
  }
  std::vector<CutoffScanRecord> records(ladder.size());
  parallel_for(ladder.size(), jobs, [&](std::size_t i) {
    const ChainParams p = lower_half(ladder[i]);
    CutoffScanRecord rec;
    rec.n = p.n;
    rec.k = p.k;
    rec.eps = eps;
    rec.t_star = cutoff_time(p);
    rec.nw_upper = nw_upper_bound(p, eps);
    const BandedKernel kernel = build_kernel(p);
    rec.t_mix = mixing_time(kernel, eps, policy);
    if (rec.t_mix) {
      rec.ratio = static_cast<double>(*rec.t_mix) * 4.0 * p.k /
                  (p.n * std::log(static_cast<double>(p.n)));
      rec.nw_ok = *rec.t_mix <= rec.nw_upper;
    }
    records[i] = rec;
  });
  return records;
}

ExtremesComparison compare_start_policies(const ChainParams& params, double eps) {
  params.validate();
  require_eps(eps);
  ExtremesComparison out{params, 0, 0.0, 0.0, false, {}};
  if (!params.ergodic()) return out;
  const BandedKernel kernel = build_kernel(params);
  const StateDistribution pi = stationary(params.n);
  StartSet set(kernel, pi, StartPolicy::AllStates);
  const std::size_t last = set.evolvers.size() - 1;
  const std::int64_t cap = default_cap(params, eps);
  double previous = 1.0;
  for (std::int64_t t = 0; t <= cap; ++t) {
    if (t > 0) set.step();
    const double all = set.worst();
    const double ext = std::max(distance(set.evolvers.front().current(), pi),
                                distance(set.evolvers[last].current(), pi));
    out.max_gap = std::max(out.max_gap, std::abs(all - ext));
    if (t > 0) out.max_increase = std::max(out.max_increase, all - previous);
    previous = all;
    out.profile.push_back(all);
    out.t_checked = t;
    if (all <= eps) {
      out.reached = true;
      break;
    }
  }
  return out;
}

}  // namespace urnlab
