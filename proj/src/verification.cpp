#include "urnlab/verification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "exact_oracle.hpp"
#include "urnlab/combinatorics.hpp"
#include "urnlab/couplings.hpp"
#include "urnlab/mixing.hpp"
#include "urnlab/parallel.hpp"
#include "urnlab/random.hpp"
#include "urnlab/replicas.hpp"
#include "urnlab/spectral.hpp"

namespace urnlab {

namespace {

// Largest value offered so far and the (n, k) where it occurred. NaN always
// wins so that it surfaces as a failure.
struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  int n = 0;
  int k = 0;
  bool seen = false;

  void offer(double v, int n_, int k_) {
    if (!seen || std::isnan(v) || v > value) {
      if (seen && std::isnan(value)) return;
      value = v;
      n = n_;
      k = k_;
      seen = true;
    }
  }
  double stat() const { return seen ? value : 0.0; }
};

CheckReport worst_report(std::string name, const Worst& w, double bound, double tolerance) {
  return make_report(std::move(name), w.n, w.k, w.stat(), bound, "<=", tolerance);
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t tag) {
  std::uint64_t state = master ^ (0xD1B54A32D192ED03ULL * (tag + 1));
  return splitmix64(state);
}

double empirical_tv(const std::vector<std::int64_t>& counts, int offset, std::int64_t total,
                    const DiscretePMF& exact) {
  CompensatedSum s;
  const int lo = std::min(offset, exact.lo());
  const int hi = std::max(offset + static_cast<int>(counts.size()) - 1, exact.hi());
  for (int x = lo; x <= hi; ++x) {
    const int idx = x - offset;
    const double p_hat =
        idx >= 0 && idx < static_cast<int>(counts.size())
            ? static_cast<double>(counts[static_cast<std::size_t>(idx)]) / static_cast<double>(total)
            : 0.0;
    s.add(std::abs(p_hat - exact.at(x)));
  }
  return 0.5 * s.value();
}

DiscretePMF as_pmf(const StateDistribution& d) { return DiscretePMF{0, d.weights}; }

DiscretePMF row_pmf(const ChainParams& params, int x) {
  return DiscretePMF{std::max(0, x - params.k), kernel_row(params, x)};
}

std::vector<std::int64_t> histogram(const std::vector<int>& values, int n) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  for (int v : values) ++counts[static_cast<std::size_t>(v)];
  return counts;
}

StateDistribution propagate(const BandedKernel& kernel, int x0, std::int64_t t) {
  Evolver ev(kernel, StateDistribution::point_mass(kernel.n(), x0));
  ev.advance_to(t);
  return ev.current();
}

}  // namespace

CheckReport make_report(std::string name, int n, int k, double statistic, double bound,
                        std::string direction, double tolerance, std::int64_t replicas,
                        std::uint64_t seed) {
  CheckReport r;
  r.name = std::move(name);
  r.n = n;
  r.k = k;
  r.statistic = statistic;
  r.bound = bound;
  r.direction = std::move(direction);
  r.tolerance = tolerance;
  r.replicas = replicas;
  r.seed = seed;
  if (r.direction == "<=") {
    r.passed = statistic <= bound + tolerance;
  } else if (r.direction == "==") {
    r.passed = std::abs(statistic - bound) <= tolerance;
  } else if (r.direction == ">=") {
    r.passed = statistic >= bound - tolerance;
  } else {
    throw std::invalid_argument("make_report: unknown direction " + r.direction);
  }
  return r;
}

bool all_passed(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.passed; });
}

// ---------------------------------------------------------------------------
// Exact checks

CheckReport check_kernel_vs_oracle(int n_max, double tolerance) {
  Worst w;
  for (int n = 1; n <= std::min(n_max, oracle::kMaxUrn); ++n) {
    for (int k = 0; k <= n; ++k) {
      const ChainParams params{n, k};
      const BandedKernel kernel = build_kernel(params);
      for (int i = 0; i <= n; ++i) {
        const auto exact = oracle::kernel_row(n, k, i);
        for (int j = 0; j <= n; ++j) {
          w.offer(std::abs(kernel(i, j) - oracle::to_double(exact[static_cast<std::size_t>(j)])),
                  n, k);
        }
      }
    }
  }
  return worst_report("kernel_vs_rational_oracle", w, 0.0, tolerance);
}

CheckReport check_stationary_vs_oracle(int n_max, double tolerance) {
  Worst w;
  for (int n = 1; n <= n_max; ++n) {
    const StateDistribution pi = stationary(n);
    const auto exact = oracle::stationary(n);
    for (int j = 0; j <= n; ++j) {
      const double q = oracle::to_double(exact[static_cast<std::size_t>(j)]);
      w.offer(std::abs(pi[j] - q) / std::max(q, std::numeric_limits<double>::min()), n, 0);
    }
  }
  return worst_report("stationary_vs_rational_oracle", w, 0.0, tolerance);
}

CheckReport check_row_sums(int n_max, double tolerance) {
  Worst w;
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 0; k <= n; ++k) {
      w.offer(build_kernel(ChainParams{n, k}).max_row_deviation(), n, k);
    }
  }
  return worst_report("kernel_row_sums", w, 0.0, tolerance);
}

CheckReport check_detailed_balance(int n_max, double tolerance) {
  Worst w;
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 0; k <= n; ++k) {
      w.offer(build_kernel(ChainParams{n, k}).max_balance_error(), n, k);
    }
  }
  return worst_report("detailed_balance", w, 0.0, tolerance);
}

CheckReport check_transition_prob_vs_rows(int n_max, double tolerance) {
  Worst w;
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 0; k <= n; ++k) {
      const ChainParams params{n, k};
      for (int i = 0; i <= n; ++i) {
        const auto row = kernel_row(params, i);
        const int lo = std::max(0, i - k);
        for (int j = 0; j <= n; ++j) {
          const int idx = j - lo;
          const double fast =
              idx >= 0 && idx < static_cast<int>(row.size()) ? row[static_cast<std::size_t>(idx)] : 0.0;
          w.offer(std::abs(fast - transition_prob(params, i, j)), n, k);
        }
      }
    }
  }
  return worst_report("transition_prob_vs_rows", w, 0.0, tolerance);
}

CheckReport check_stationary_moments(int n_max, double tolerance) {
  Worst w;
  for (int n = 1; n <= n_max; ++n) {
    const StateDistribution pi = stationary(n);
    const double mean = n / 2.0;
    const double var = static_cast<double>(n) * n / (4.0 * (2.0 * n - 1.0));
    w.offer(std::abs(pi.mean() - mean) / mean, n, 0);
    w.offer(std::abs(pi.variance() - var) / var, n, 0);
  }
  return worst_report("stationary_moments", w, 0.0, tolerance);
}

CheckReport check_f1_f2_identity(int n_max, double tolerance) {
  Worst w;
  for (int n = 2; n <= n_max; ++n) {
    const double a = 1.0 / (2.0 * n - 1.0);
    const double b = (2.0 * n - 2.0) / (2.0 * n - 1.0);
    for (int x = 0; x <= n; ++x) {
      const double v = f1(n, x);
      w.offer(std::abs(v * v - (a + b * f2(n, x))), n, 0);
    }
  }
  return worst_report("f1_squared_decomposition", w, 0.0, tolerance);
}

SpectralChecks check_spectral(int n_max, double tolerance) {
  Worst e1;
  Worst e2;
  Worst mart;
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 0; 2 * k <= n; ++k) {
      const ChainParams params{n, k};
      const BandedKernel kernel = build_kernel(params);
      e1.offer(eigen_residual(kernel, eigen_pair(params, 1)), n, k);
      if (n >= 2) e2.offer(eigen_residual(kernel, eigen_pair(params, 2)), n, k);
      if (2 * k == n) continue;
      const double lambda = 1.0 - 2.0 * k / n;
      for (std::int64_t t : {0, 1, 10}) {
        const double scale = std::abs(signed_power(lambda, t + 1));
        for (int x = 0; x <= n; ++x) {
          CompensatedSum lhs;
          const auto row = kernel.row(x);
          for (int j = kernel.row_lo(x); j <= kernel.row_hi(x); ++j) {
            lhs.add(row[static_cast<std::size_t>(j - kernel.row_lo(x))] *
                    martingale_value(params, t + 1, j));
          }
          mart.offer(std::abs(lhs.value() - martingale_value(params, t, x)) * scale, n, k);
        }
      }
    }
  }
  return SpectralChecks{worst_report("eigen_residual_f1", e1, 0.0, tolerance),
                        worst_report("eigen_residual_f2", e2, 0.0, tolerance),
                        worst_report("martingale_identity", mart, 0.0, tolerance)};
}

MomentChecks check_moment_propagation(const std::vector<int>& ns, int t_max, double tolerance) {
  Worst wm;
  Worst wv;
  Worst ws;
  for (int n : ns) {
    for (int k = 0; 2 * k <= n; ++k) {
      const ChainParams params{n, k};
      const BandedKernel kernel = build_kernel(params);
      std::vector<int> starts{0, n / 4, n / 2};
      starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
      for (int x0 : starts) {
        Evolver ev(kernel, StateDistribution::point_mass(n, x0));
        for (std::int64_t t = 0; t <= t_max; ++t) {
          if (t > 0) ev.step();
          const StateDistribution& d = ev.current();
          const double m = d.mean();
          const double v = d.variance();
          wm.offer(std::abs(conditional_mean(params, t, x0) - m) / std::max(std::abs(m), 1.0), n, k);
          wv.offer(std::abs(conditional_variance(params, t, x0) - v) / std::max(std::abs(v), 1.0),
                   n, k);
          if (n >= 2) {
            CompensatedSum s;
            for (int x = 0; x <= n; ++x) {
              const double f = f1(n, x);
              s.add(d[x] * f * f);
            }
            ws.offer(std::abs(second_moment_f1(params, t, x0) - s.value()), n, k);
          }
        }
      }
    }
  }
  return MomentChecks{worst_report("conditional_mean_propagation", wm, 0.0, tolerance),
                      worst_report("conditional_variance_propagation", wv, 0.0, tolerance),
                      worst_report("f1_second_moment_propagation", ws, 0.0, tolerance)};
}

CheckReport check_hypergeometric_dist_vs_pmf(int N_max, double tolerance) {
  Worst w;
  for (int N = 0; N <= N_max; ++N) {
    for (int K = 0; K <= N; ++K) {
      for (int r = 0; r <= N; ++r) {
        const DiscretePMF d = hypergeometric_dist(N, K, r);
        for (int j = d.lo(); j <= d.hi(); ++j) {
          w.offer(std::abs(d.at(j) - hypergeometric_pmf(N, K, r, j)), N, r);
        }
      }
    }
  }
  return worst_report("hypergeometric_dist_vs_pmf", w, 0.0, tolerance);
}

CheckReport check_hyper_binom_bound(int N_max, int jobs) {
  std::vector<Worst> per(static_cast<std::size_t>(std::max(N_max, 0)));
  parallel_for(per.size(), jobs, [&](std::size_t idx) {
    const int N = static_cast<int>(idx) + 1;
    for (int K = 0; K <= N; ++K) {
      for (int r = 1; 2 * r <= N; ++r) {
        const HyperBinomTV h = hyper_vs_binom_tv(N, K, r);
        per[idx].offer(h.tv / h.bound, N, r);
      }
    }
  });
  Worst w;
  for (const auto& p : per) {
    if (p.seen) w.offer(p.value, p.n, p.k);
  }
  return worst_report("hyper_binom_tv_ratio", w, 1.0, 0.0);
}

CheckReport check_shifted_binom_crossing(int k_max, double tolerance, int jobs) {
  std::vector<Worst> per(static_cast<std::size_t>(std::max(k_max, 0)));
  parallel_for(per.size(), jobs, [&](std::size_t idx) {
    const int k = static_cast<int>(idx) + 1;
    const int g_max = static_cast<int>(std::floor(std::sqrt(static_cast<double>(k))));
    for (int g = -g_max; g <= g_max; ++g) {
      const ShiftedBinomTV s = shifted_binom_tv(k, g);
      per[idx].offer(s.single_crossing ? std::abs(s.tv - s.crossing_tv) : 1.0, k, g);
    }
  });
  Worst w;
  for (const auto& p : per) w.offer(p.value, p.n, p.k);
  return worst_report("shifted_binom_crossing_formula", w, 0.0, tolerance);
}

CheckReport check_shifted_binom_endpoint() {
  const int k = 1 << 16;
  const int g = static_cast<int>(std::floor(std::pow(static_cast<double>(k), 0.25)));
  return make_report("shifted_binom_endpoint", 0, k, shifted_binom_tv(k, g).tv, 0.06, "<=", 0.0);
}

CheckReport check_shifted_binom_ladder(int e_first, int step) {
  Worst w;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int e = e_first; e <= 16; e += step) {
    const int k = 1 << e;
    const int g = static_cast<int>(std::floor(std::pow(static_cast<double>(k), 0.25)));
    const double tv_k = shifted_binom_tv(k, g).tv;
    if (!std::isnan(previous)) w.offer(tv_k - previous, 0, k);
    previous = tv_k;
  }
  return worst_report("shifted_binom_ladder_increase", w, 0.0, 0.0);
}

CheckReport check_contraction_enumeration(int n_max) {
  std::int64_t mismatches = 0;
  int bad_n = 0;
  int bad_k = 0;
  for (int n = 1; n <= std::min(n_max, oracle::kMaxUrn); ++n) {
    for (int k = 0; k <= n; ++k) {
      const oracle::Rational target =
          oracle::Rational(1) - oracle::Rational(2 * k * (n - k), n * n);
      for (int x = 0; x < n; ++x) {
        if (oracle::expected_gap(n, k, x + 1, x) != target) {
          ++mismatches;
          bad_n = n;
          bad_k = k;
        }
      }
    }
  }
  return make_report("contraction_enumeration", bad_n, bad_k, static_cast<double>(mismatches), 0.0,
                     "==", 0.0);
}

CheckReport check_monotone_law_vs_enumeration(int n_max, double tolerance) {
  Worst w;
  for (int n = 1; n <= std::min(n_max, oracle::kMaxUrn); ++n) {
    for (int k = 0; k <= n; ++k) {
      const ChainParams params{n, k};
      for (int x = 0; x <= n; ++x) {
        for (int y = 0; y <= n; ++y) {
          auto exact = oracle::coupled_step_law(n, k, x, y);
          const auto law = monotone_transition_law(CoupledPair{x, y}, params);
          for (const auto& o : law) {
            auto it = exact.find({o.next.x, o.next.y});
            const double q = it == exact.end() ? 0.0 : oracle::to_double(it->second);
            w.offer(std::abs(o.p - q), n, k);
            if (it != exact.end()) exact.erase(it);
          }
          for (const auto& [key, q] : exact) w.offer(oracle::to_double(q), n, k);
        }
      }
    }
  }
  return worst_report("monotone_law_vs_enumeration", w, 0.0, tolerance);
}

CheckReport check_micro_drift_enumeration(int n_max, double tolerance) {
  Worst w;
  for (int n = 1; n <= std::min(n_max, oracle::kMaxUrn); ++n) {
    for (int k = 1; k <= n; ++k) {
      const ChainParams params{n, k};
      for (int r = 0; r < 2 * k; ++r) {
        const int balls = r < k ? n - r : n - r + k;
        for (int a = 0; a <= balls; ++a) {
          for (int b = 0; b <= balls; ++b) {
            DecomposedState xs{r, r, 0, 0, 0};
            DecomposedState ys{r, r, 0, 0, 0};
            if (r < k) {
              xs.xleft = a;
              ys.xleft = b;
            } else {
              xs.xright = a;
              ys.xright = b;
            }
            const DriftVariance dv = drift_variance_check(xs, ys, params);
            const auto m = oracle::micro_step_moments(n, k, r, a, b);
            w.offer(std::abs(dv.drift - oracle::to_double(m.drift)), n, k);
            w.offer(std::abs(dv.variance - oracle::to_double(m.variance)), n, k);
          }
        }
      }
    }
  }
  return worst_report("micro_drift_enumeration", w, 0.0, tolerance);
}

std::vector<ChainParams> full_half_grid(int n_min, int n_max) {
  std::vector<ChainParams> grid;
  for (int n = std::max(2, n_min); n <= n_max; ++n) {
    for (int k = 1; 2 * k <= n; ++k) grid.push_back(ChainParams{n, k});
  }
  return grid;
}

PolicyChecks check_start_policies(const std::vector<ChainParams>& grid, double eps_floor,
                                  const std::vector<double>& nw_eps, double tolerance,
                                  int jobs) {
  for (double e : nw_eps) {
    if (!(e >= eps_floor)) throw std::invalid_argument("check_start_policies: eps below floor");
  }
  std::vector<ExtremesComparison> results(grid.size());
  parallel_for(grid.size(), jobs,
               [&](std::size_t i) { results[i] = compare_start_policies(grid[i], eps_floor); });
  Worst gap;
  Worst increase;
  Worst nw;
  for (const auto& r : results) {
    const int n = r.params.n;
    const int k = r.params.k;
    gap.offer(r.max_gap, n, k);
    increase.offer(r.max_increase, n, k);
    for (double e : nw_eps) {
      const auto hit = std::find_if(r.profile.begin(), r.profile.end(),
                                    [e](double d) { return d <= e; });
      const double excess =
          hit == r.profile.end()
              ? std::numeric_limits<double>::infinity()
              : static_cast<double>(hit - r.profile.begin()) -
                    static_cast<double>(nw_upper_bound(r.params, e));
      nw.offer(excess, n, k);
    }
  }
  return PolicyChecks{worst_report("extremes_policy_agreement", gap, 0.0, tolerance),
                      worst_report("tv_profile_nonincreasing", increase, 0.0, tolerance),
                      worst_report("nw_upper_bound_excess", nw, 0.0, 0.0)};
}

CheckReport check_complement_symmetry(int n_max, int t_max, double tolerance) {
  Worst w;
  for (int n = 2; n <= n_max; ++n) {
    for (int k = 1; 2 * k < n; ++k) {
      const ChainParams a{n, k};
      const ChainParams b = complement_params(a);
      const BandedKernel ka = build_kernel(a);
      const BandedKernel kb = build_kernel(b);
      for (int x = 0; x <= n; ++x) {
        for (int y = 0; y <= n; ++y) w.offer(std::abs(kb(x, y) - ka(x, n - y)), n, k);
      }
      const MixingProfile pa = mixing_profile(ka, t_max, StartPolicy::Extremes);
      const MixingProfile pb = mixing_profile(kb, t_max, StartPolicy::Extremes);
      for (std::size_t t = 0; t < pa.distances.size(); ++t) {
        w.offer(std::abs(pa.distances[t] - pb.distances[t]), n, k);
      }
    }
  }
  return worst_report("complement_symmetry", w, 0.0, tolerance);
}

std::vector<CheckReport> run_exact_suite(int n_max, double tolerance, int jobs) {
  if (n_max < 2 || n_max > 300) throw std::invalid_argument("run_exact_suite: need 2 <= n_max <= 300");
  if (!(tolerance > 0.0)) throw std::invalid_argument("run_exact_suite: tolerance must be positive");
  const int small = std::min(n_max, 60);
  std::vector<int> moment_ns;
  for (int n = 2; n <= small; ++n) moment_ns.push_back(n);
  for (int n : {80, 100, 150, 200}) {
    if (n <= n_max) moment_ns.push_back(n);
  }

  using Task = std::function<std::vector<CheckReport>()>;
  const std::vector<Task> tasks{
      [&] { return std::vector{check_kernel_vs_oracle(n_max, 1e-13)}; },
      [&] { return std::vector{check_stationary_vs_oracle(small, tolerance)}; },
      [&] { return std::vector{check_row_sums(small, tolerance)}; },
      [&] { return std::vector{check_detailed_balance(small, tolerance)}; },
      [&] { return std::vector{check_transition_prob_vs_rows(std::min(n_max, 30), 1e-13)}; },
      [&] { return std::vector{check_stationary_moments(std::min(n_max, 200), tolerance)}; },
      [&] { return std::vector{check_f1_f2_identity(500, tolerance)}; },
      [&] {
        const SpectralChecks s = check_spectral(std::min(n_max, 200), 1e-10);
        return std::vector{s.eigen_f1, s.eigen_f2, s.martingale};
      },
      [&] {
        const MomentChecks m = check_moment_propagation(moment_ns, 200, 1e-9);
        return std::vector{m.mean, m.variance, m.f1_second_moment};
      },
      [&] { return std::vector{check_hypergeometric_dist_vs_pmf(small, tolerance)}; },
      [&] { return std::vector{check_hyper_binom_bound(500, jobs)}; },
      [&] { return std::vector{check_shifted_binom_crossing(2000, 1e-14, jobs)}; },
      [&] { return std::vector{check_shifted_binom_endpoint()}; },
      [&] { return std::vector{check_contraction_enumeration(n_max)}; },
      [&] { return std::vector{check_monotone_law_vs_enumeration(std::min(n_max, 10), 1e-13)}; },
      [&] { return std::vector{check_micro_drift_enumeration(n_max, 1e-15)}; },
      [&] {
        const PolicyChecks p = check_start_policies(full_half_grid(2, small), 0.01, {0.25, 0.1}, tolerance, 1);
        return std::vector{p.extremes_agreement, p.profile_monotone, p.nw_sandwich};
      },
      [&] { return std::vector{check_complement_symmetry(std::min(n_max, 40), 50, tolerance)}; },
  };
  std::vector<std::vector<CheckReport>> results(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) { results[i] = tasks[i](); });
  std::vector<CheckReport> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

// ---------------------------------------------------------------------------
// Statistical checks

CheckReport proportion_report(std::string name, const ChainParams& params, double p_hat,
                              double bound, std::int64_t reps, std::uint64_t seed) {
  const double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(reps));
  return make_report(std::move(name), params.n, params.k, p_hat, bound, "<=", 3.0 * se, reps, seed);
}

CheckReport curve_report(std::string name, const ChainParams& params,
                         const std::vector<double>& p_hat, const std::vector<double>& bound,
                         std::int64_t reps, std::uint64_t seed) {
  if (p_hat.empty() || p_hat.size() != bound.size()) {
    throw std::invalid_argument("curve_report: curves must be nonempty and aligned");
  }
  std::size_t worst = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p_hat.size(); ++i) {
    const double se = std::sqrt(p_hat[i] * (1.0 - p_hat[i]) / static_cast<double>(reps));
    const double margin = p_hat[i] - bound[i] - 3.0 * se;
    if (margin > worst_margin) {
      worst_margin = margin;
      worst = i;
    }
  }
  return proportion_report(std::move(name), params, p_hat[worst], bound[worst], reps, seed);
}

CheckReport check_hypergeometric_sampler(std::int64_t samples, std::uint64_t seed, int jobs) {
  const int N = 100;
  const int K = 50;
  const int r = 10;
  const auto draws = map_replicas<int>(samples, seed, jobs, [&](std::int64_t, Rng& rng) {
    return hypergeometric_sample(N, K, r, rng);
  });
  const double d = empirical_tv(histogram(draws, r), 0, samples, hypergeometric_dist(N, K, r));
  return make_report("hypergeometric_sampler_tv", N, r, d, 0.005, "<=", 0.0, samples, seed);
}

CheckReport check_step_sample_row(std::int64_t samples, std::uint64_t seed, int jobs) {
  const ChainParams params{100, 10};
  const int x = 30;
  const auto draws = map_replicas<int>(samples, seed, jobs, [&](std::int64_t, Rng& rng) {
    return step_sample(params, x, rng);
  });
  const double d = empirical_tv(histogram(draws, params.n), 0, samples, row_pmf(params, x));
  return make_report("step_sample_row_tv", params.n, params.k, d, 0.005, "<=", 0.0, samples, seed);
}

CheckReport check_contraction_monte_carlo(const ChainParams& params, std::int64_t reps,
                                          std::uint64_t seed, int jobs) {
  const MeanEstimate m = contraction_estimate(params, reps, seed, jobs);
  return make_report("contraction_monte_carlo", params.n, params.k, m.mean, m.target, "==",
                     3.0 * m.std_error, reps, seed);
}

std::vector<CheckReport> check_monotone_marginals(const ChainParams& params, std::int64_t reps,
                                                  std::uint64_t seed, int jobs) {
  const std::vector<CoupledPair> starts{{params.n / 4, 3 * params.n / 4},
                                        {params.n / 2 + 1, params.n / 2},
                                        {0, params.n}};
  std::vector<CheckReport> reports;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const CoupledPair start = starts[s];
    const std::uint64_t stream = seed + s;
    const auto pairs = map_replicas<CoupledPair>(reps, stream, jobs, [&](std::int64_t, Rng& rng) {
      return monotone_step(start, params, rng);
    });
    std::vector<int> xs;
    std::vector<int> ys;
    xs.reserve(pairs.size());
    ys.reserve(pairs.size());
    for (const auto& p : pairs) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
    const double dx = empirical_tv(histogram(xs, params.n), 0, reps, row_pmf(params, start.x));
    const double dy = empirical_tv(histogram(ys, params.n), 0, reps, row_pmf(params, start.y));
    const std::string tag = "_from_" + std::to_string(start.x) + "_" + std::to_string(start.y);
    reports.push_back(make_report("monotone_marginal_x_tv" + tag, params.n, params.k, dx, 0.005, "<=",
                                  0.0, reps, stream));
    reports.push_back(make_report("monotone_marginal_y_tv" + tag, params.n, params.k, dy, 0.005, "<=",
                                  0.0, reps, stream));
  }
  return reports;
}

CheckReport check_monotonicity(const std::vector<ChainParams>& grid, std::int64_t total_steps,
                               std::uint64_t seed, int jobs) {
  if (grid.empty()) throw std::invalid_argument("check_monotonicity: empty grid");
  constexpr std::int64_t kChains = 1000;
  const std::int64_t per_entry = (total_steps + static_cast<std::int64_t>(grid.size()) - 1) /
                                 static_cast<std::int64_t>(grid.size());
  const std::int64_t per_chain = (per_entry + kChains - 1) / kChains;
  const auto count = static_cast<std::int64_t>(grid.size()) * kChains;
  struct Tally {
    std::int64_t steps = 0;
    std::int64_t violations = 0;
  };
  const auto tallies = map_replicas<Tally>(count, seed, jobs, [&](std::int64_t i, Rng& rng) {
    const ChainParams& params = grid[static_cast<std::size_t>(i / kChains)];
    const auto fresh = [&] {
      return CoupledPair{static_cast<int>(rng.below(static_cast<std::uint64_t>(params.n) + 1)),
                         static_cast<int>(rng.below(static_cast<std::uint64_t>(params.n) + 1))};
    };
    Tally t;
    CoupledPair p = fresh();
    for (std::int64_t s = 0; s < per_chain; ++s) {
      const CoupledPair q = monotone_step(p, params, rng);
      ++t.steps;
      if (q.gap() > p.gap()) ++t.violations;
      p = q.gap() == 0 ? fresh() : q;
    }
    return t;
  });
  Tally total;
  for (const auto& t : tallies) {
    total.steps += t.steps;
    total.violations += t.violations;
  }
  return make_report("monotone_gap_violations", grid.front().n, grid.front().k,
                     static_cast<double>(total.violations), 0.0, "==", 0.0, total.steps, seed);
}

std::vector<CheckReport> check_decomposition(const ChainParams& params, int x0,
                                             const std::vector<int>& t_macro, std::int64_t reps,
                                             std::uint64_t seed, int jobs) {
  if (t_macro.empty() || !std::is_sorted(t_macro.begin(), t_macro.end()) || t_macro.front() < 0) {
    throw std::invalid_argument("check_decomposition: times must be sorted and nonnegative");
  }
  const std::int64_t two_k = 2 * static_cast<std::int64_t>(params.k);
  const auto paths = map_replicas<std::vector<int>>(reps, seed, jobs, [&](std::int64_t, Rng& rng) {
    std::vector<int> out;
    out.reserve(t_macro.size());
    DecomposedState st = DecomposedState::start(params.n, x0);
    for (int t : t_macro) {
      while (st.s < two_k * t) st = decomposed_step(st, params, rng);
      out.push_back(st.xleft);
    }
    return out;
  });
  const BandedKernel kernel = build_kernel(params);
  std::vector<CheckReport> reports;
  for (std::size_t i = 0; i < t_macro.size(); ++i) {
    std::vector<int> values;
    values.reserve(paths.size());
    for (const auto& p : paths) values.push_back(p[i]);
    const double d = empirical_tv(histogram(values, params.n), 0, reps,
                                  as_pmf(propagate(kernel, x0, t_macro[i])));
    reports.push_back(make_report("decomposition_tv_t" + std::to_string(t_macro[i]), params.n,
                                  params.k, d, 0.005, "<=", 0.0, reps, seed));
  }
  return reports;
}

std::vector<CheckReport> check_tau_couple_survival(const ChainParams& params, std::int64_t reps,
                                                   std::uint64_t seed, int jobs) {
  const CoupledPair start{3 * params.n / 4, params.n / 4};
  const double r = 5.0;
  const double rate = contraction_rate(params);
  const auto t_max = static_cast<std::int64_t>(
      std::ceil(std::log(start.gap() / r / 1e-3) / -std::log(rate)));
  const SurvivalCurve c = tau_couple_survival(params, start, r, t_max, reps, seed, jobs);
  return {curve_report("tau_couple_survival", params, c.survival, c.bound, reps, seed),
          proportion_report("tau_couple_censored", params, c.survival.back(), c.bound.back(), reps,
                            seed)};
}

CheckReport check_doob_window(const ChainParams& params, std::int64_t reps, std::uint64_t seed,
                              int jobs) {
  const std::int64_t t1 = cutoff_time(params);
  const std::int64_t t2 = t1 + (params.n + 4 * params.k - 1) / (4 * params.k);
  const double r = 4.0 * std::sqrt(static_cast<double>(params.n));
  const double center = params.n / 2.0;
  const auto hits = map_replicas<char>(reps, seed, jobs, [&](std::int64_t, Rng& rng) {
    int x = 0;
    for (std::int64_t t = 1; t <= t2; ++t) {
      x = step_sample(params, x, rng);
      if (t >= t1 && std::abs(x - center) > r) return char{1};
    }
    return char{0};
  });
  const double p = static_cast<double>(std::count(hits.begin(), hits.end(), 1)) / reps;
  return proportion_report("doob_window_exceedance", params, p, doob_bound(params, t1, t2, r, 0.0),
                           reps, seed);
}

CheckReport check_doob_single_time(const ChainParams& params, std::int64_t reps,
                                   std::uint64_t seed, int jobs) {
  const std::int64_t t = cutoff_time(params);
  const double r = 3.0 * std::sqrt(static_cast<double>(params.n));
  const auto hits = map_replicas<char>(reps, seed, jobs, [&](std::int64_t, Rng& rng) {
    int x = 0;
    for (std::int64_t s = 0; s < t; ++s) x = step_sample(params, x, rng);
    return static_cast<char>(std::abs(x - params.n / 2.0) > r);
  });
  const double p = static_cast<double>(std::count(hits.begin(), hits.end(), 1)) / reps;
  return proportion_report("doob_single_time_exceedance", params, p,
                           doob_bound(params, t, t, r, 0.0), reps, seed);
}

CheckReport check_chebyshev_window(const ChainParams& params, std::int64_t reps,
                                   std::uint64_t seed, int jobs) {
  const std::int64_t t = cutoff_time(params);
  const double r = 3.0 * std::sqrt(static_cast<double>(params.n));
  const auto hits = map_replicas<char>(reps, seed, jobs, [&](std::int64_t, Rng& rng) {
    int x = 0;
    for (std::int64_t s = 0; s < t; ++s) x = step_sample(params, x, rng);
    return static_cast<char>(std::abs(x - params.n / 2.0) > r);
  });
  const double p = static_cast<double>(std::count(hits.begin(), hits.end(), 1)) / reps;
  return proportion_report("chebyshev_window_exceedance", params, p,
                           chebyshev_window_bound(params.n, r), reps, seed);
}

std::vector<CheckReport> check_hitting_lemma(const ChainParams& params, std::int64_t reps,
                                             std::uint64_t seed, int jobs) {
  constexpr int kLog2Max = 14;
  const std::int64_t u_max = std::int64_t{1} << kLog2Max;
  const int x0 = params.n / 2 + 2;
  const int y0 = params.n / 2 - 2;
  const double z0 = x0 - y0;
  const auto runs = map_replicas<TauMatchResult>(reps, seed, jobs, [&](std::int64_t, Rng& rng) {
    return tau_match_run(params, x0, y0, u_max, Truncation::QuarterBand, rng);
  });
  double sigma2 = std::numeric_limits<double>::infinity();
  for (const auto& r : runs) sigma2 = std::min(sigma2, r.min_variance);
  const double sigma = std::sqrt(sigma2);
  std::vector<double> p_hat;
  std::vector<double> bound;
  for (int e = 0; e <= kLog2Max; ++e) {
    const std::int64_t u = std::int64_t{1} << e;
    if (static_cast<double>(u) <= 12.0 / sigma2) continue;
    std::int64_t alive = 0;
    for (const auto& r : runs) {
      if (r.outcome == MatchOutcome::Censored || r.s > u) ++alive;
    }
    p_hat.push_back(static_cast<double>(alive) / reps);
    bound.push_back(4.0 * z0 / (sigma * std::sqrt(static_cast<double>(u))));
  }
  const auto censored = std::count_if(runs.begin(), runs.end(), [](const TauMatchResult& r) {
    return r.outcome == MatchOutcome::Censored;
  });
  return {curve_report("hitting_lemma_survival", params, p_hat, bound, reps, seed),
          proportion_report("hitting_lemma_censored", params,
                            static_cast<double>(censored) / static_cast<double>(reps), bound.back(),
                            reps, seed)};
}

CheckReport check_matched_drift(const ChainParams& params, std::int64_t reps, std::uint64_t seed,
                                int jobs) {
  constexpr std::int64_t kMaxSteps = 4000;
  struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t count = 0;
  };
  const auto parts = map_replicas<Moments>(reps, seed, jobs, [&](std::int64_t, Rng& rng) {
    DecomposedState xs = DecomposedState::start(params.n, params.n / 2 + 5);
    DecomposedState ys = DecomposedState::start(params.n, params.n / 2 - 5);
    Moments m;
    for (std::int64_t s = 0; s < kMaxSteps; ++s) {
      if (xs.xleft == ys.xleft || xs.xright == ys.xright) break;
      const double drift = drift_variance_check(xs, ys, params).drift;
      const int w0 = xs.xleft - ys.xleft;
      xs = decomposed_step(xs, params, rng);
      ys = decomposed_step(ys, params, rng);
      const double d = (xs.xleft - ys.xleft - w0) - drift;
      m.sum += d;
      m.sum_sq += d * d;
      ++m.count;
    }
    return m;
  });
  CompensatedSum sum;
  CompensatedSum sum_sq;
  std::int64_t count = 0;
  for (const auto& m : parts) {
    sum.add(m.sum);
    sum_sq.add(m.sum_sq);
    count += m.count;
  }
  const double mean = sum.value() / static_cast<double>(count);
  const double var = sum_sq.value() / static_cast<double>(count) - mean * mean;
  const double se = std::sqrt(var / static_cast<double>(count));
  return make_report("matched_walk_drift_residual", params.n, params.k, mean, 0.0, "==", 3.0 * se,
                     reps, seed);
}

std::vector<CheckReport> run_stochastic_suite(const StochasticOptions& o) {
  if (o.reps < 10000) throw std::invalid_argument("run_stochastic_suite: reps must be >= 10^4");
  if (o.grid.empty()) throw std::invalid_argument("run_stochastic_suite: empty grid");
  for (const auto& p : o.grid) {
    p.validate();
    if (p.k < 1 || 2 * p.k >= p.n) {
      throw std::invalid_argument("run_stochastic_suite: grid entries need 1 <= k < n/2");
    }
  }
  const ChainParams base{100, 10};
  std::uint64_t tag = 0;
  std::vector<CheckReport> out;
  const auto add = [&](CheckReport r) { out.push_back(std::move(r)); };
  const auto add_all = [&](std::vector<CheckReport> rs) {
    for (auto& r : rs) out.push_back(std::move(r));
  };
  add(check_hypergeometric_sampler(o.distribution_reps, sub_seed(o.seed, tag++), o.jobs));
  add(check_step_sample_row(o.distribution_reps, sub_seed(o.seed, tag++), o.jobs));
  add(check_contraction_monte_carlo(base, o.distribution_reps, sub_seed(o.seed, tag++), o.jobs));
  add_all(check_monotone_marginals(base, o.distribution_reps, sub_seed(o.seed, tag++), o.jobs));
  add(check_monotonicity(o.grid, o.monotone_steps, sub_seed(o.seed, tag++), o.jobs));
  add_all(check_decomposition(base, 30, {1, 2, 5}, o.distribution_reps,
                              sub_seed(o.seed, tag++), o.jobs));
  add(check_matched_drift(base, o.reps, sub_seed(o.seed, tag++), o.jobs));
  add(check_doob_single_time(ChainParams{100, 5}, 10 * o.reps, sub_seed(o.seed, tag++), o.jobs));
  for (const auto& p : o.grid) {
    add_all(check_tau_couple_survival(p, o.reps, sub_seed(o.seed, tag++), o.jobs));
    add(check_doob_window(p, o.reps, sub_seed(o.seed, tag++), o.jobs));
    add(check_chebyshev_window(p, o.reps, sub_seed(o.seed, tag++), o.jobs));
    add_all(check_hitting_lemma(p, o.reps, sub_seed(o.seed, tag++), o.jobs));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exponential moment constant

std::vector<int> default_mgf_populations() { return {20, 50, 100, 200, 400}; }

std::vector<double> default_mgf_h_grid() {
  return {-1.0, -0.5, -0.25, -0.1, -0.05, 0.05, 0.1, 0.25, 0.5, 1.0};
}

MgfProbeResult mgf_constant_probe(const std::vector<int>& populations,
                                  const std::vector<double>& h_grid) {
  MgfProbeResult out;
  out.min_constant = std::numeric_limits<double>::infinity();
  for (int N : populations) {
    if (N < 10) throw std::invalid_argument("mgf_constant_probe: populations need N >= 10");
    const int K = N / 2;
    double c_min = std::numeric_limits<double>::infinity();
    int r_at = 0;
    for (int r = 1; 10 * r <= N; ++r) {
      for (double h : h_grid) {
        if (h == 0.0) continue;
        const double c = h * h * r / log_exp_moment_hypergeom(N, K, r, h);
        if (c < c_min) {
          c_min = c;
          r_at = r;
        }
      }
    }
    out.min_constant = std::min(out.min_constant, c_min);
    out.reports.push_back(make_report("mgf_constant", N, r_at, c_min, 8.0, ">=", 0.0));
  }
  out.sixteen_holds = out.min_constant >= 16.0;
  return out;
}

}  // namespace urnlab
