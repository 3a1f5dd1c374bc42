#include "exact_oracle.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>

namespace urnlab::oracle {

namespace {

void require_small(int n, int k) {
  if (n < 1 || n > kMaxUrn || k < 0 || k > n) {
    throw std::invalid_argument("oracle: need 1 <= n <= 12 and 0 <= k <= n");
  }
}

std::uint32_t low_bits(int count) { return count <= 0 ? 0u : ((1u << count) - 1u); }

std::vector<std::uint32_t> subsets_of_size(int n, int k) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    if (std::popcount(m) == k) out.push_back(m);
  }
  return out;
}

}  // namespace

Integer binomial(int m, int r) {
  if (r < 0 || r > m) return 0;
  Integer num = 1;
  Integer den = 1;
  for (int i = 1; i <= r; ++i) {
    num *= m - r + i;
    den *= i;
  }
  return num / den;
}

std::vector<Rational> kernel_row(int n, int k, int i) {
  require_small(n, k);
  if (i < 0 || i > n) throw std::invalid_argument("oracle: state out of range");
  const auto subsets = subsets_of_size(n, k);
  // Reds leaving the left urn (labels [0,i) are red) and reds arriving from
  // the right urn (labels [0,n-i) are red).
  std::vector<Integer> leave(static_cast<std::size_t>(k) + 1, 0);
  std::vector<Integer> arrive(static_cast<std::size_t>(k) + 1, 0);
  for (auto m : subsets) {
    ++leave[static_cast<std::size_t>(std::popcount(m & low_bits(i)))];
    ++arrive[static_cast<std::size_t>(std::popcount(m & low_bits(n - i)))];
  }
  const Integer total = Integer(subsets.size()) * Integer(subsets.size());
  std::vector<Integer> counts(static_cast<std::size_t>(n) + 1, 0);
  for (int a = 0; a <= k; ++a) {
    for (int b = 0; b <= k; ++b) {
      const int j = i - a + b;
      if (j < 0 || j > n) continue;
      counts[static_cast<std::size_t>(j)] += leave[static_cast<std::size_t>(a)] *
                                             arrive[static_cast<std::size_t>(b)];
    }
  }
  std::vector<Rational> row;
  row.reserve(counts.size());
  for (const auto& c : counts) row.emplace_back(c, total);
  return row;
}

std::vector<Rational> stationary(int n) {
  if (n < 1) throw std::invalid_argument("oracle: n must be positive");
  const Integer total = binomial(2 * n, n);
  std::vector<Rational> pi;
  for (int j = 0; j <= n; ++j) {
    const Integer c = binomial(n, j);
    pi.emplace_back(c * c, total);
  }
  return pi;
}

std::map<std::pair<int, int>, Rational> coupled_step_law(int n, int k, int x, int y) {
  require_small(n, k);
  if (x < 0 || x > n || y < 0 || y > n) throw std::invalid_argument("oracle: state out of range");
  const auto subsets = subsets_of_size(n, k);
  std::map<std::pair<int, int>, Integer> left;   // (reds leaving X, reds leaving Y)
  std::map<std::pair<int, int>, Integer> right;  // (reds arriving in X, reds arriving in Y)
  for (auto m : subsets) {
    ++left[{std::popcount(m & low_bits(x)), std::popcount(m & low_bits(y))}];
    ++right[{std::popcount(m & low_bits(n - x)), std::popcount(m & low_bits(n - y))}];
  }
  std::map<std::pair<int, int>, Integer> counts;
  for (const auto& [a, ca] : left) {
    for (const auto& [b, cb] : right) {
      counts[{x - a.first + b.first, y - a.second + b.second}] += ca * cb;
    }
  }
  const Integer total = Integer(subsets.size()) * Integer(subsets.size());
  std::map<std::pair<int, int>, Rational> law;
  for (const auto& [key, c] : counts) law.emplace(key, Rational(c, total));
  return law;
}

Rational expected_gap(int n, int k, int x, int y) {
  Rational e = 0;
  for (const auto& [key, p] : coupled_step_law(n, k, x, y)) {
    e += p * (key.first > key.second ? key.first - key.second : key.second - key.first);
  }
  return e;
}

MicroMoments micro_step_moments(int n, int k, int r, int x_count, int y_count) {
  require_small(n, k);
  if (k < 1 || r < 0 || r >= 2 * k) throw std::invalid_argument("oracle: bad phase");
  const int balls = r < k ? n - r : n - r + k;
  if (x_count < 0 || x_count > balls || y_count < 0 || y_count > balls) {
    throw std::invalid_argument("oracle: red count exceeds urn content");
  }
  const int sign = r < k ? -1 : 1;
  Integer sum = 0;
  Integer sum_sq = 0;
  for (int a = 0; a < balls; ++a) {
    for (int b = 0; b < balls; ++b) {
      const int dw = sign * ((a < x_count ? 1 : 0) - (b < y_count ? 1 : 0));
      sum += dw;
      sum_sq += dw * dw;
    }
  }
  const Integer outcomes = Integer(balls) * balls;
  MicroMoments m;
  m.drift = Rational(sum, outcomes);
  m.variance = Rational(sum_sq, outcomes) - m.drift * m.drift;
  return m;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace urnlab::oracle
