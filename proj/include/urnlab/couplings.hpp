#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "urnlab/chain_kernel.hpp"

namespace urnlab {

class Rng;

/// Joint state (X, Y) of two copies of the chain.
struct CoupledPair {
  int x = 0;
  int y = 0;
  int gap() const { return x > y ? x - y : y - x; }
  bool operator==(const CoupledPair&) const = default;
};

enum class CouplingMode { Monotone, Independent, Decomposed };
std::string_view to_string(CouplingMode mode);
CouplingMode parse_coupling_mode(std::string_view text);

/// One step of the labeled-ball coupling. Reds occupy a prefix of the labels
/// in both copies and the swapped subsets A (left) and B (right) are shared,
/// so only the counts of A and B inside each label block matter. |gap| never
/// increases.
CoupledPair monotone_step(const CoupledPair& pair, const ChainParams& params, Rng& source);

/// Both coordinates step with independent randomness.
CoupledPair independent_step(const CoupledPair& pair, const ChainParams& params, Rng& source);

struct JointOutcome {
  CoupledPair next;
  double p;
};

/// Exact one-step law of monotone_step, outcomes sorted by (x, y).
std::vector<JointOutcome> monotone_transition_law(const CoupledPair& pair, const ChainParams& params);

/// 1 - 2k(n-k)/n^2.
double contraction_rate(const ChainParams& params);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  std::int64_t reps = 0;
  bool covers(double sigmas = 3.0) const;
};

/// Mean |gap| after one monotone step from a gap-1 pair near n/2.
MeanEstimate contraction_estimate(const ChainParams& params, std::int64_t reps, std::uint64_t seed,
                                  int jobs = 1);

struct SurvivalCurve {
  std::vector<double> survival;  // P(tau_couple(r) > t), t = 0..t_max
  std::vector<double> bound;     // rate^t |x0 - y0| / r
  std::int64_t reps = 0;
};

/// Empirical survival of tau_couple(r) = min{t : |X_t - Y_t| <= r} under the
/// monotone coupling, next to the path-coupling bound.
SurvivalCurve tau_couple_survival(const ChainParams& params, CoupledPair start, double r,
                                  std::int64_t t_max, std::int64_t reps, std::uint64_t seed,
                                  int jobs = 1);

/// Micro-time state of the 2k-step decomposition of one swap.
struct DecomposedState {
  std::int64_t s = 0;
  int r = 0;            // s mod 2k
  int xleft = 0;        // reds in the left urn
  int xright = 0;       // available reds in the right urn
  int storage_red = 0;  // reds waiting in storage

  static DecomposedState start(int n, int x0);
  bool operator==(const DecomposedState&) const = default;
};

/// Phase r < k moves a uniform left ball into storage; phase r >= k moves a
/// uniform available right ball into the left urn; after phase 2k-1 storage
/// returns to the right urn. Requires k >= 1.
DecomposedState decomposed_step(const DecomposedState& state, const ChainParams& params,
                                 Rng& source);

/// xleft after 2k * t_macro micro steps from x0.
int decomposed_run(const ChainParams& params, int x0, std::int64_t t_macro, Rng& source);

struct DriftVariance {
  double drift = 0.0;     // E(W_{s+1} - W_s | state), W = xleft - yleft
  double variance = 0.0;  // Var(W_{s+1} | state) for independent chains
};

/// Closed-form one-micro-step moments of W. Both states must share s.
DriftVariance drift_variance_check(const DecomposedState& x, const DecomposedState& y,
                                   const ChainParams& params);

enum class Truncation { None, QuarterBand };
enum class MatchOutcome { Matched, Truncated, Censored };
std::string_view to_string(MatchOutcome outcome);

struct TauMatchResult {
  MatchOutcome outcome = MatchOutcome::Censored;
  std::int64_t s = 0;
  bool lefts_match = false;
  bool rights_match = false;
  bool swapped = false;  // inputs had x0 < y0
  double min_variance = 0.0;  // smallest closed-form Var(W) before stopping
};

/// Independent decomposed chains from (x0, y0) until lefts or rights match.
/// QuarterBand also stops at macro times 2kt where either chain has left
/// [n/4, 3n/4]. Censored at s_max.
TauMatchResult tau_match_run(const ChainParams& params, int x0, int y0, std::int64_t s_max,
                             Truncation truncation, Rng& source);

struct Kappas {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
};

struct FourPhaseConfig {
  double gamma1 = 4.0;
  std::optional<double> kappa1;
  std::optional<double> kappa2;
  std::optional<double> kappa3;
  std::optional<double> kappa4;

  /// Defaults: k1 = gamma1^(1/4), k2 = k1^2 e^(3 gamma1), k3 = k2 e^gamma1, k4 = gamma1.
  Kappas resolve() const;
};

struct FourPhaseRecord {
  std::optional<std::int64_t> tau1;
  std::optional<std::int64_t> tau2;
  std::optional<std::int64_t> tau3;
  std::optional<std::int64_t> tau4;
  int censored_phase = 0;  // first censored tau index, 0 if none
  int final_gap = 0;       // |X - Y| at tau4, or at the end of the last phase
  double last_step_tv = 0.0;
  bool swapped = false;    // labels swapped so that X starts above Y
  int x0 = 0;
  int y0 = 0;
  Kappas kappas;
  bool phase_c_monotone = true;
  bool uncensored() const { return censored_phase == 0; }
};

struct PhaseSchedule {
  std::int64_t t_star = 0;    // ceil((n/4k) ln n)
  std::int64_t budget_b = 0;  // ceil(gamma1 n / k)
  std::int64_t budget_c = 0;  // ceil((3n/k) max(1, ln ln n))
  double gap2 = 0.0;          // 2 k2 sqrt(k ln n)
  double gap34 = 0.0;         // sqrt(k) / max(1, ln ln n)
};

PhaseSchedule phase_schedule(const ChainParams& params, const FourPhaseConfig& config);

/// Phases A (independent, t_star steps), B (independent until tau2 or its
/// budget), C (monotone until tau4 or its budget) and D (exact last-step TV).
/// Y0 is drawn from pi_n. Requires 0 < k <= n/2.
FourPhaseRecord four_phase_run(const ChainParams& params, int x0, const FourPhaseConfig& config,
                               Rng& source);

/// TV between kernel rows P(x0, .) and P(y0, .), O(k^2) work.
double last_step_tv(const ChainParams& params, int x0, int y0);

struct HittingSample {
  std::optional<std::int64_t> t;  // first t with X_t - Y_t < 4k
  bool truncated = false;         // stopped by leaving [n/4, 3n/4]
  int gap_at_stop = 0;            // X - Y when stopped
};

/// Independent macro chains with x0 > y0 until X - Y < 4k, censored at
/// u_max and at the quarter-band exit.
HittingSample remark_gap_hitting(const ChainParams& params, int x0, int y0, std::int64_t u_max,
                                 Rng& source);

struct EventFlags {
  bool E = false;
  bool F = false;
  bool G = false;
  bool H = false;
  bool all() const { return E && F && G && H; }
};

struct EventFlagsRun {
  EventFlags flags;
  std::optional<std::int64_t> tau_match;
  std::optional<std::int64_t> tau2;  // macro time, within gamma1 n / k
};

/// Concentration events on a stored trajectory of one decomposed chain.
/// E: |X_t - n/2| <= kappa2 sqrt n for t <= gamma1 n / 2k.
/// F: |L_{2kt} - L_{2kt+r} - r/2| and |R_{2kt} - R_{(2t+1)k+r} - r/2| stay
///    within kappa2 sqrt(k ln n). G: |L_{2kt} - L_{(2t+1)k+r} - (k-r)/2|
///    stays within the same radius. `path` holds states s = 0, 1, ...
EventFlags trajectory_flags(const std::vector<DecomposedState>& path, const ChainParams& params,
                            double kappa2, double gamma1);

/// Runs two independent decomposed chains for ceil(gamma1 n) micro steps;
/// E, F, G hold when they hold for both chains and H is tau_match <= gamma1 n.
EventFlagsRun event_flags_run(const ChainParams& params, int x0, int y0, double kappa2,
                              double gamma1, Rng& source);

}  // namespace urnlab
