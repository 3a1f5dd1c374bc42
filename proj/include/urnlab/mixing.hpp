#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "urnlab/chain_kernel.hpp"

namespace urnlab {

enum class StartPolicy { AllStates, Extremes };

std::string_view to_string(StartPolicy policy);
/// Accepts "all-states" and "extremes"; throws std::invalid_argument otherwise.
StartPolicy parse_start_policy(std::string_view text);

/// Starting states examined by a policy: {0, n} or every state.
std::vector<int> policy_starts(int n, StartPolicy policy);

/// Distribution pushed forward one step at a time. Every 64 steps the mass
/// is renormalized if it has drifted from 1 by more than 1e-12.
class Evolver {
 public:
  Evolver(const BandedKernel& kernel, StateDistribution start);

  void step();
  void advance_to(std::int64_t t);
  std::int64_t time() const { return t_; }
  const StateDistribution& current() const { return dist_; }

 private:
  const BandedKernel* kernel_;
  StateDistribution dist_;
  std::int64_t t_ = 0;
};

/// TV between two distributions on {0..n}, compensated.
double distance(const StateDistribution& a, const StateDistribution& b);

struct MixingProfile {
  ChainParams params;
  StartPolicy policy = StartPolicy::Extremes;
  std::vector<std::int64_t> times;
  std::vector<double> distances;
};

/// TV(delta_{x0} P^t, pi_n).
double distance_from(const BandedKernel& kernel, int x0, std::int64_t t);

/// Maximum of distance_from over the policy's starting states.
double worst_distance(const BandedKernel& kernel, std::int64_t t, StartPolicy policy);

/// ceil((n/2k) ln(n/eps)) with k replaced by min(k, n-k).
std::int64_t nw_upper_bound(const ChainParams& params, double eps);

/// Least t with worst_distance <= eps. Empty for k in {0, n} or when no
/// such t exists up to t_cap (default: 4 * nw_upper_bound + 64).
/// Throws std::invalid_argument unless 0 < eps < 1.
std::optional<std::int64_t> mixing_time(const BandedKernel& kernel, double eps,
                                        StartPolicy policy, std::int64_t t_cap = 0);

/// d(t) for t = 0..t_max.
MixingProfile mixing_profile(const BandedKernel& kernel, std::int64_t t_max, StartPolicy policy);

/// d(t) for t = 0.. up to the first t with d(t) <= eps (inclusive), or t_cap.
MixingProfile mixing_profile_until(const BandedKernel& kernel, double eps, StartPolicy policy,
                                   std::int64_t t_cap = 0);

struct CutoffPoint {
  double c;
  std::int64_t t;  // ceil(c (n/4k) ln n)
  double d;
};

/// Exact d at multiples of (n/4k) ln n, in the order given. k is taken as
/// min(k, n-k). Throws unless 0 < k < n and every multiplier is >= 0.
std::vector<CutoffPoint> cutoff_profile(const ChainParams& params,
                                        const std::vector<double>& multipliers,
                                        StartPolicy policy = StartPolicy::Extremes);

struct CutoffScanRecord {
  int n = 0;
  int k = 0;
  double eps = 0.25;
  std::optional<std::int64_t> t_mix;
  std::int64_t t_star = 0;
  double ratio = 0.0;
  std::int64_t nw_upper = 0;
  bool nw_ok = false;
};

/// One record per ladder entry, computed independently on up to `jobs`
/// workers and returned in ladder order. Entries are normalized to k <= n/2.
std::vector<CutoffScanRecord> window_diagnostic(const std::vector<ChainParams>& ladder, double eps,
                                                StartPolicy policy = StartPolicy::Extremes,
                                                int jobs = 1);

struct ExtremesComparison {
  ChainParams params;
  std::int64_t t_checked = 0;  // times 0..t_checked were compared
  double max_gap = 0.0;        // max_t |all-states d(t) - extremes d(t)|
  double max_increase = 0.0;   // max_t (d(t+1) - d(t)) under all-states, floored at 0
  bool reached = false;        // d(t_checked) <= eps
  std::vector<double> profile; // all-states d(t), t = 0..t_checked
};

/// Compares both start policies for every t up to the all-states t_mix(eps).
ExtremesComparison compare_start_policies(const ChainParams& params, double eps);

}  // namespace urnlab
