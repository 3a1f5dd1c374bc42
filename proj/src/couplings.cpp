#include "urnlab/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "urnlab/combinatorics.hpp"
#include "urnlab/random.hpp"
#include "urnlab/replicas.hpp"
#include "urnlab/spectral.hpp"

namespace urnlab {

namespace {

void require_state(const ChainParams& params, int x, const char* what) {
  if (x < 0 || x > params.n) {
    throw std::invalid_argument(std::string(what) + ": state " + std::to_string(x) +
                                " outside [0," + std::to_string(params.n) + "]");
  }
}

void require_decomposable(const ChainParams& params, const char* what) {
  params.validate();
  if (params.k < 1) throw std::invalid_argument(std::string(what) + ": requires k >= 1");
}

double floored_loglog(int n) {
  const double ll = std::log(std::log(static_cast<double>(n)));
  return std::isfinite(ll) ? std::max(1.0, ll) : 1.0;
}

bool outside_quarter_band(int v, int n) { return std::abs(v - n / 2.0) > n / 4.0; }

}  // namespace

std::string_view to_string(CouplingMode mode) {
  switch (mode) {
    case CouplingMode::Monotone:
      return "monotone";
    case CouplingMode::Independent:
      return "independent";
    case CouplingMode::Decomposed:
      return "decomposed";
  }
  return "monotone";
}

CouplingMode parse_coupling_mode(std::string_view text) {
  if (text == "monotone") return CouplingMode::Monotone;
  if (text == "independent") return CouplingMode::Independent;
  if (text == "decomposed") return CouplingMode::Decomposed;
  throw std::invalid_argument("mode must be monotone, independent or decomposed, got '" +
                              std::string(text) + "'");
}

std::string_view to_string(MatchOutcome outcome) {
  switch (outcome) {
    case MatchOutcome::Matched:
      return "matched";
    case MatchOutcome::Truncated:
      return "truncated";
    case MatchOutcome::Censored:
      return "censored";
  }
  return "censored";
}

CoupledPair monotone_step(const CoupledPair& pair, const ChainParams& params, Rng& source) {
  require_state(params, pair.x, "monotone_step");
  require_state(params, pair.y, "monotone_step");
  const int n = params.n;
  const int k = params.k;
  if (k == 0) return pair;
  const int lo = std::min(pair.x, pair.y);
  const int hi = std::max(pair.x, pair.y);
  const int g = hi - lo;

  // Left labels: [0,lo) red in both, [lo,hi) red only in the higher copy.
  const int a1 = hypergeometric_sample(n, lo, k, source);
  const int a2 = hypergeometric_sample(n - lo, g, k - a1, source);
  // Right labels: [0,n-hi) red in both, [n-hi,n-lo) red only in the lower copy.
  const int b1 = hypergeometric_sample(n, n - hi, k, source);
  const int b2 = hypergeometric_sample(hi, g, k - b1, source);

  const int hi_next = hi - a1 - a2 + b1;
  const int lo_next = lo - a1 + b1 + b2;
  return pair.x >= pair.y ? CoupledPair{hi_next, lo_next} : CoupledPair{lo_next, hi_next};
}

CoupledPair independent_step(const CoupledPair& pair, const ChainParams& params, Rng& source) {
  const int x = step_sample(params, pair.x, source);
  const int y = step_sample(params, pair.y, source);
  return {x, y};
}

std::vector<JointOutcome> monotone_transition_law(const CoupledPair& pair,
                                                  const ChainParams& params) {
  params.validate();
  require_state(params, pair.x, "monotone_transition_law");
  require_state(params, pair.y, "monotone_transition_law");
  const int n = params.n;
  const int k = params.k;
  const int lo = std::min(pair.x, pair.y);
  const int hi = std::max(pair.x, pair.y);
  const int g = hi - lo;
  std::map<std::pair<int, int>, CompensatedSum> acc;
  const DiscretePMF a1_law = hypergeometric_dist(n, lo, k);
  const DiscretePMF b1_law = hypergeometric_dist(n, n - hi, k);
  for (int a1 = a1_law.lo(); a1 <= a1_law.hi(); ++a1) {
    const DiscretePMF a2_law = hypergeometric_dist(n - lo, g, k - a1);
    for (int a2 = a2_law.lo(); a2 <= a2_law.hi(); ++a2) {
      const double pa = a1_law.at(a1) * a2_law.at(a2);
      for (int b1 = b1_law.lo(); b1 <= b1_law.hi(); ++b1) {
        const DiscretePMF b2_law = hypergeometric_dist(hi, g, k - b1);
        for (int b2 = b2_law.lo(); b2 <= b2_law.hi(); ++b2) {
          const int hn = hi - a1 - a2 + b1;
          const int ln = lo - a1 + b1 + b2;
          const auto key = pair.x >= pair.y ? std::pair{hn, ln} : std::pair{ln, hn};
          acc[key].add(pa * b1_law.at(b1) * b2_law.at(b2));
        }
      }
    }
  }
  std::vector<JointOutcome> out;
  out.reserve(acc.size());
  for (const auto& [key, sum] : acc) out.push_back({{key.first, key.second}, sum.value()});
  return out;
}

double contraction_rate(const ChainParams& params) {
  params.validate();
  const double n = params.n;
  return 1.0 - 2.0 * params.k * (n - params.k) / (n * n);
}

bool MeanEstimate::covers(double sigmas) const {
  return std::abs(mean - target) <= sigmas * std_error;
}

MeanEstimate contraction_estimate(const ChainParams& params, std::int64_t reps, std::uint64_t seed,
                                  int jobs) {
  params.validate();
  if (reps < 2) throw std::invalid_argument("contraction_estimate: need at least 2 replicas");
  const CoupledPair start{params.n / 2 + 1, params.n / 2};
  const auto gaps = map_replicas<int>(reps, seed, jobs, [&](std::int64_t, Rng& rng) {
    return monotone_step(start, params, rng).gap();
  });
  CompensatedSum sum;
  CompensatedSum sq;
  for (int g : gaps) {
    sum.add(g);
    sq.add(static_cast<double>(g) * g);
  }
  MeanEstimate est;
  est.reps = reps;
  est.target = contraction_rate(params);
  est.mean = sum.value() / static_cast<double>(reps);
  const double var = std::max(0.0, (sq.value() - reps * est.mean * est.mean) / (reps - 1.0));
  est.std_error = std::sqrt(var / static_cast<double>(reps));
  return est;
}

SurvivalCurve tau_couple_survival(const ChainParams& params, CoupledPair start, double r,
                                  std::int64_t t_max, std::int64_t reps, std::uint64_t seed,
                                  int jobs) {
  params.validate();
  require_state(params, start.x, "tau_couple_survival");
  require_state(params, start.y, "tau_couple_survival");
  if (!(r > 0.0)) throw std::invalid_argument("tau_couple_survival: r must be positive");
  if (t_max < 0 || reps < 1) throw std::invalid_argument("tau_couple_survival: bad t_max or reps");
  const auto taus = map_replicas<std::int64_t>(reps, seed, jobs, [&](std::int64_t, Rng& rng) {
    CoupledPair p = start;
    for (std::int64_t t = 0; t <= t_max; ++t) {
      if (p.gap() <= r) return t;
      if (t < t_max) p = monotone_step(p, params, rng);
    }
    return t_max + 1;
  });
  SurvivalCurve curve;
  curve.reps = reps;
  std::vector<std::int64_t> alive(static_cast<std::size_t>(t_max) + 1, 0);
  for (std::int64_t tau : taus) {
    for (std::int64_t t = 0; t < std::min(tau, t_max + 1); ++t) ++alive[static_cast<std::size_t>(t)];
  }
  const double rate = contraction_rate(params);
  for (std::int64_t t = 0; t <= t_max; ++t) {
    curve.survival.push_back(static_cast<double>(alive[static_cast<std::size_t>(t)]) / reps);
    curve.bound.push_back(signed_power(rate, t) * start.gap() / r);
  }
  return curve;
}

DecomposedState DecomposedState::start(int n, int x0) {
  if (n < 1 || x0 < 0 || x0 > n) throw std::invalid_argument("DecomposedState: bad start");
  return DecomposedState{0, 0, x0, n - x0, 0};
}

DecomposedState decomposed_step(const DecomposedState& state, const ChainParams& params,
                                Rng& source) {
  require_decomposable(params, "decomposed_step");
  const int n = params.n;
  const int k = params.k;
  DecomposedState next = state;
  if (state.r < k) {
    const int balls = n - state.r;
    if (source.uniform() * balls < state.xleft) {
      --next.xleft;
      ++next.storage_red;
    }
  } else {
    const int balls = n - state.r + k;
    if (source.uniform() * balls < state.xright) {
      --next.xright;
      ++next.xleft;
    }
  }
  ++next.s;
  next.r = state.r + 1;
  if (next.r == 2 * k) {
    next.r = 0;
    next.xright += next.storage_red;
    next.storage_red = 0;
  }
  if (next.xleft + next.xright + next.storage_red != n || next.xleft < 0 || next.xright < 0) {
    throw std::logic_error("decomposed_step: red ball count not conserved");
  }
  return next;
}

int decomposed_run(const ChainParams& params, int x0, std::int64_t t_macro, Rng& source) {
  params.validate();
  require_state(params, x0, "decomposed_run");
  if (t_macro < 0) throw std::invalid_argument("decomposed_run: t_macro must be nonnegative");
  if (params.k == 0) return x0;
  DecomposedState st = DecomposedState::start(params.n, x0);
  const std::int64_t steps = 2 * static_cast<std::int64_t>(params.k) * t_macro;
  for (std::int64_t s = 0; s < steps; ++s) st = decomposed_step(st, params, source);
  return st.xleft;
}

DriftVariance drift_variance_check(const DecomposedState& x, const DecomposedState& y,
                                   const ChainParams& params) {
  require_decomposable(params, "drift_variance_check");
  if (x.s != y.s || x.r != y.r) {
    throw std::invalid_argument("drift_variance_check: states must share the micro time");
  }
  const int n = params.n;
  const int k = params.k;
  DriftVariance out;
  if (x.r < k) {
    const double m = n - x.r;
    out.drift = (y.xleft - x.xleft) / m;
    out.variance = (x.xleft * (m - x.xleft) + y.xleft * (m - y.xleft)) / (m * m);
  } else {
    const double m = n - x.r + k;
    out.drift = (x.xright - y.xright) / m;
    out.variance = (x.xright * (m - x.xright) + y.xright * (m - y.xright)) / (m * m);
  }
  return out;
}

TauMatchResult tau_match_run(const ChainParams& params, int x0, int y0, std::int64_t s_max,
                             Truncation truncation, Rng& source) {
  require_decomposable(params, "tau_match_run");
  require_state(params, x0, "tau_match_run");
  require_state(params, y0, "tau_match_run");
  if (s_max < 0) throw std::invalid_argument("tau_match_run: s_max must be nonnegative");
  TauMatchResult res;
  res.swapped = x0 < y0;
  if (res.swapped) std::swap(x0, y0);
  DecomposedState xs = DecomposedState::start(params.n, x0);
  DecomposedState ys = DecomposedState::start(params.n, y0);
  res.min_variance = std::numeric_limits<double>::infinity();
  for (std::int64_t s = 0;; ++s) {
    res.lefts_match = xs.xleft == ys.xleft;
    res.rights_match = xs.xright == ys.xright;
    if (res.lefts_match || res.rights_match) {
      res.outcome = MatchOutcome::Matched;
      res.s = s;
      break;
    }
    if (truncation == Truncation::QuarterBand && xs.r == 0 &&
        (outside_quarter_band(xs.xleft, params.n) || outside_quarter_band(ys.xleft, params.n))) {
      res.outcome = MatchOutcome::Truncated;
      res.s = s;
      break;
    }
    if (s == s_max) {
      res.outcome = MatchOutcome::Censored;
      res.s = s;
      break;
    }
    res.min_variance = std::min(res.min_variance, drift_variance_check(xs, ys, params).variance);
    xs = decomposed_step(xs, params, source);
    ys = decomposed_step(ys, params, source);
  }
  return res;
}

Kappas FourPhaseConfig::resolve() const {
  if (!(gamma1 > 0.0)) throw std::invalid_argument("gamma1 must be positive");
  Kappas kap;
  kap.k1 = kappa1.value_or(std::pow(gamma1, 0.25));
  kap.k2 = kappa2.value_or(kap.k1 * kap.k1 * std::exp(3.0 * gamma1));
  kap.k3 = kappa3.value_or(kap.k2 * std::exp(gamma1));
  kap.k4 = kappa4.value_or(gamma1);
  for (double v : {kap.k1, kap.k2, kap.k3, kap.k4}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("kappa values must be positive");
  }
  return kap;
}

PhaseSchedule phase_schedule(const ChainParams& params, const FourPhaseConfig& config) {
  params.validate();
  if (params.k < 1 || 2 * params.k > params.n) {
    throw std::invalid_argument("four-phase run requires 0 < k <= n/2");
  }
  const Kappas kap = config.resolve();
  const double n = params.n;
  const double k = params.k;
  const double lln = floored_loglog(params.n);
  PhaseSchedule s;
  s.t_star = cutoff_time(params);
  s.budget_b = static_cast<std::int64_t>(std::ceil(config.gamma1 * n / k));
  s.budget_c = static_cast<std::int64_t>(std::ceil(3.0 * n / k * lln));
  s.gap2 = 2.0 * kap.k2 * std::sqrt(k * std::log(n));
  s.gap34 = std::sqrt(k) / lln;
  return s;
}

FourPhaseRecord four_phase_run(const ChainParams& params, int x0, const FourPhaseConfig& config,
                               Rng& source) {
  const PhaseSchedule sched = phase_schedule(params, config);
  require_state(params, x0, "four_phase_run");
  const int n = params.n;
  const double half = n / 2.0;
  const double root = std::sqrt(static_cast<double>(n));
  const double ln_n = std::log(static_cast<double>(n));

  FourPhaseRecord rec;
  rec.kappas = config.resolve();
  const Kappas& kap = rec.kappas;
  int y0 = hypergeometric_sample(2 * n, n, n, source);
  rec.x0 = x0;
  rec.y0 = y0;
  rec.swapped = x0 < y0;
  CoupledPair p{std::max(x0, y0), std::min(x0, y0)};

  auto in_band = [&](double width) {
    return std::abs(p.x - half) < width && std::abs(p.y - half) < width;
  };
  auto step_independent = [&] {
    if (p.x == p.y) {
      p.x = step_sample(params, p.x, source);
      p.y = p.x;
    } else {
      p = independent_step(p, params, source);
    }
  };
  auto finish = [&](std::int64_t boundary, int from_index) {
    if (from_index <= 1 && !rec.tau1) rec.tau1 = boundary;
    if (from_index <= 2) rec.tau2 = boundary;
    if (from_index <= 3) rec.tau3 = boundary;
    rec.tau4 = boundary;
  };

  std::int64_t t = 0;
  bool done = false;
  if (p.x == p.y) {
    finish(0, 1);
    done = true;
  }

  // Phase A: independent until t_star.
  if (!done) {
    for (; t <= sched.t_star; ++t) {
      if (!rec.tau1 && in_band(kap.k1 * root)) rec.tau1 = t;
      if (t < sched.t_star) step_independent();
    }
    t = sched.t_star;
    if (p.x == p.y) {
      finish(t, 2);
      done = true;
    }
  }

  // Phase B: independent until tau2 or its budget.
  std::int64_t start_c = 0;
  if (!done) {
    const std::int64_t end_b = sched.t_star + sched.budget_b;
    for (; t <= end_b; ++t) {
      if (p.gap() <= sched.gap2 && in_band(kap.k2 * root)) {
        rec.tau2 = t;
        break;
      }
      if (t < end_b) step_independent();
    }
    start_c = rec.tau2 ? *rec.tau2 : end_b;
    t = start_c;
    if (p.x == p.y) {
      finish(t, 3);
      done = true;
    }
  }

  // Phase C: monotone coupling until tau4 or its budget.
  if (!done) {
    const std::int64_t end_c = start_c + sched.budget_c;
    const double band3 = kap.k3 * root * ln_n * ln_n;
    const double band4 = kap.k4 * root;
    for (; t <= end_c; ++t) {
      if (!rec.tau3 && p.gap() <= sched.gap34 && in_band(band3)) rec.tau3 = t;
      if (rec.tau3 && p.gap() <= sched.gap34 && in_band(band4)) {
        rec.tau4 = t;
        break;
      }
      if (t < end_c) {
        const int before = p.gap();
        p = monotone_step(p, params, source);
        if (p.gap() > before) rec.phase_c_monotone = false;
      }
    }
  }

  const std::optional<std::int64_t>* taus[] = {&rec.tau1, &rec.tau2, &rec.tau3, &rec.tau4};
  for (int i = 0; i < 4; ++i) {
    if (!*taus[i]) {
      rec.censored_phase = i + 1;
      break;
    }
  }
  rec.final_gap = p.gap();
  rec.last_step_tv = last_step_tv(params, p.x, p.y);
  return rec;
}

double last_step_tv(const ChainParams& params, int x0, int y0) {
  params.validate();
  require_state(params, x0, "last_step_tv");
  require_state(params, y0, "last_step_tv");
  if (x0 == y0) return 0.0;
  DiscretePMF a;
  a.offset = std::max(0, x0 - params.k);
  a.weights = kernel_row(params, x0);
  DiscretePMF b;
  b.offset = std::max(0, y0 - params.k);
  b.weights = kernel_row(params, y0);
  return tv(a, b);
}

HittingSample remark_gap_hitting(const ChainParams& params, int x0, int y0, std::int64_t u_max,
                                 Rng& source) {
  params.validate();
  require_state(params, x0, "remark_gap_hitting");
  require_state(params, y0, "remark_gap_hitting");
  if (x0 < y0) throw std::invalid_argument("remark_gap_hitting: requires x0 >= y0");
  if (u_max < 0) throw std::invalid_argument("remark_gap_hitting: u_max must be nonnegative");
  const int threshold = 4 * params.k;
  CoupledPair p{x0, y0};
  HittingSample out;
  for (std::int64_t t = 0; t <= u_max; ++t) {
    if (p.x - p.y < threshold) {
      out.t = t;
      break;
    }
    if (outside_quarter_band(p.x, params.n) || outside_quarter_band(p.y, params.n)) {
      out.truncated = true;
      break;
    }
    if (t < u_max) p = independent_step(p, params, source);
  }
  out.gap_at_stop = p.x - p.y;
  return out;
}

EventFlags trajectory_flags(const std::vector<DecomposedState>& path, const ChainParams& params,
                            double kappa2, double gamma1) {
  require_decomposable(params, "trajectory_flags");
  const int n = params.n;
  const int k = params.k;
  const auto macro_last = static_cast<std::int64_t>(std::floor(gamma1 * n / (2.0 * k)));
  const auto needed = static_cast<std::size_t>(2 * k * (macro_last + 1));
  if (path.size() <= needed) throw std::invalid_argument("trajectory_flags: path too short");
  const double band = kappa2 * std::sqrt(static_cast<double>(n));
  const double radius = kappa2 * std::sqrt(k * std::log(static_cast<double>(n)));
  EventFlags f{true, true, true, false};
  for (std::int64_t t = 0; t <= macro_last; ++t) {
    const auto base = static_cast<std::size_t>(2 * k * t);
    const DecomposedState& s0 = path[base];
    if (std::abs(s0.xleft - n / 2.0) > band) f.E = false;
    for (int r = 1; r <= k; ++r) {
      const DecomposedState& early = path[base + static_cast<std::size_t>(r)];
      const DecomposedState& late = path[base + static_cast<std::size_t>(k + r)];
      if (std::abs(s0.xleft - early.xleft - r / 2.0) > radius ||
          std::abs(s0.xright - late.xright - r / 2.0) > radius) {
        f.F = false;
      }
      if (std::abs(s0.xleft - late.xleft - (k - r) / 2.0) > radius) f.G = false;
    }
  }
  return f;
}

EventFlagsRun event_flags_run(const ChainParams& params, int x0, int y0, double kappa2,
                              double gamma1, Rng& source) {
  require_decomposable(params, "event_flags_run");
  require_state(params, x0, "event_flags_run");
  require_state(params, y0, "event_flags_run");
  if (!(kappa2 > 0.0) || !(gamma1 > 0.0)) {
    throw std::invalid_argument("event_flags_run: kappa2 and gamma1 must be positive");
  }
  const int n = params.n;
  const int k = params.k;
  const auto macro_last = static_cast<std::int64_t>(std::floor(gamma1 * n / (2.0 * k)));
  const auto tau2_last = static_cast<std::int64_t>(std::floor(gamma1 * n / k));
  const auto match_last = static_cast<std::int64_t>(std::floor(gamma1 * n));
  const std::int64_t steps =
      std::max({2 * k * (macro_last + 1), 2 * k * tau2_last, match_last}) + 1;

  std::vector<DecomposedState> xp{DecomposedState::start(n, std::max(x0, y0))};
  std::vector<DecomposedState> yp{DecomposedState::start(n, std::min(x0, y0))};
  xp.reserve(static_cast<std::size_t>(steps) + 1);
  yp.reserve(static_cast<std::size_t>(steps) + 1);
  for (std::int64_t s = 0; s < steps; ++s) {
    xp.push_back(decomposed_step(xp.back(), params, source));
    yp.push_back(decomposed_step(yp.back(), params, source));
  }

  EventFlagsRun out;
  const EventFlags fx = trajectory_flags(xp, params, kappa2, gamma1);
  const EventFlags fy = trajectory_flags(yp, params, kappa2, gamma1);
  out.flags.E = fx.E && fy.E;
  out.flags.F = fx.F && fy.F;
  out.flags.G = fx.G && fy.G;
  for (std::int64_t s = 0; s <= match_last; ++s) {
    const auto& a = xp[static_cast<std::size_t>(s)];
    const auto& b = yp[static_cast<std::size_t>(s)];
    if (a.xleft == b.xleft || a.xright == b.xright) {
      out.tau_match = s;
      break;
    }
  }
  out.flags.H = out.tau_match.has_value();

  const double root = std::sqrt(static_cast<double>(n));
  const double gap2 = 2.0 * kappa2 * std::sqrt(k * std::log(static_cast<double>(n)));
  for (std::int64_t t = 0; t <= tau2_last; ++t) {
    const int xm = xp[static_cast<std::size_t>(2 * k * t)].xleft;
    const int ym = yp[static_cast<std::size_t>(2 * k * t)].xleft;
    if (std::abs(xm - ym) <= gap2 && std::abs(xm - n / 2.0) < kappa2 * root &&
        std::abs(ym - n / 2.0) < kappa2 * root) {
      out.tau2 = t;
      break;
    }
  }
  return out;
}

}  // namespace urnlab
