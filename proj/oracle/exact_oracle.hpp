#pragma once

// Exact rational ground truth for tiny urns. Everything here is computed by
// enumerating labeled balls or subsets with arbitrary-precision integers, so
// it shares no formulas with the floating-point code it checks.

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <utility>
#include <vector>

namespace urnlab::oracle {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Largest urn size the subset enumerations accept.
inline constexpr int kMaxUrn = 12;

Integer binomial(int m, int r);

/// Row i of the kernel: counts k-subsets of each urn by red content.
/// Index j of the result is P(i, j).
std::vector<Rational> kernel_row(int n, int k, int i);

/// pi_n(j) = C(n,j)^2 / C(2n,n).
std::vector<Rational> stationary(int n);

/// Joint law of (X', Y') after one step of the labeled-ball coupling from
/// (x, y), by enumerating every pair of swapped subsets.
std::map<std::pair<int, int>, Rational> coupled_step_law(int n, int k, int x, int y);

/// E|X' - Y'| under coupled_step_law.
Rational expected_gap(int n, int k, int x, int y);

struct MicroMoments {
  Rational drift;     // E(dW)
  Rational variance;  // Var(dW)
};

/// One micro step of two independent decomposed chains sharing phase r.
/// For r < k the counts are the left-urn reds; otherwise the available
/// right-urn reds. dW is the change of (X left - Y left). Enumerates the
/// drawn ball in each urn.
MicroMoments micro_step_moments(int n, int k, int r, int x_count, int y_count);

double to_double(const Rational& q);

}  // namespace urnlab::oracle
