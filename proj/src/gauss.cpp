#include "blowup/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "blowup/errors.hpp"

namespace blowup {
namespace {

// Jacobi polynomial P_n^{(a,b)}(x) and its derivative, evaluated in extended
// precision by the three-term recurrence.
std::pair<long double, long double> jacobi_eval(int n, long double a, long double b,
                                                long double x) {
  long double p0 = 1.0L;
  long double p1 = 0.5L * (a - b + (a + b + 2.0L) * x);
  if (n == 0) return {p0, 0.0L};
  for (int k = 2; k <= n; ++k) {
    const long double kk = k;
    const long double c = 2.0L * kk + a + b;
    const long double a1 = 2.0L * kk * (kk + a + b) * (c - 2.0L);
    const long double a2 = (c - 1.0L) * (a * a - b * b);
    const long double a3 = (c - 2.0L) * (c - 1.0L) * c;
    const long double a4 = 2.0L * (kk + a - 1.0L) * (kk + b - 1.0L) * c;
    const long double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  const long double nn = n;
  const long double c = 2.0L * nn + a + b;
  const long double dp = (nn * (a - b - c * x) * p1 + 2.0L * (nn + a) * (nn + b) * p0) /
                         (c * (1.0L - x * x));
  return {p1, dp};
}

GaussRule compute_jacobi(int n, double alpha, double beta) {
  const long double a = alpha;
  const long double b = beta;
  std::vector<long double> x(n);
  // Initial guesses follow the classical asymptotic placement; each root is
  // then polished by Newton iteration with deflation against earlier roots.
  long double z = 0.0L;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      const long double an = a / n;
      const long double bn = b / n;
      const long double r1 = (1.0L + a) * (2.78L / (4.0L + n * n) + 0.768L * an / n);
      const long double r2 = 1.0L + 1.48L * an + 0.96L * bn + 0.452L * an * an + 0.83L * an * bn;
      z = 1.0L - r1 / r2;
    } else if (i == 1) {
      const long double r1 = (4.1L + a) / ((1.0L + a) * (1.0L + 0.156L * a));
      const long double r2 = 1.0L + 0.06L * (n - 8.0L) * (1.0L + 0.12L * a) / n;
      const long double r3 = 1.0L + 0.012L * b * (1.0L + 0.25L * std::fabs(a)) / n;
      z -= (1.0L - z) * r1 * r2 * r3;
    } else if (i == 2) {
      const long double r1 = (1.67L + 0.28L * a) / (1.0L + 0.37L * a);
      const long double r2 = 1.0L + 0.22L * (n - 8.0L) / n;
      const long double r3 = 1.0L + 8.0L * b / ((6.28L + b) * n * n);
      z -= (x[0] - z) * r1 * r2 * r3;
    } else if (i == n - 2) {
      const long double r1 = (1.0L + 0.235L * b) / (0.766L + 0.119L * b);
      const long double r2 = 1.0L / (1.0L + 0.639L * (n - 4.0L) / (1.0L + 0.71L * (n - 4.0L)));
      const long double r3 = 1.0L / (1.0L + 20.0L * a / ((7.5L + a) * n * n));
      z += (z - x[n - 4]) * r1 * r2 * r3;
    } else if (i == n - 1) {
      const long double r1 = (1.0L + 0.37L * b) / (1.67L + 0.28L * b);
      const long double r2 = 1.0L / (1.0L + 0.22L * (n - 8.0L) / n);
      const long double r3 = 1.0L / (1.0L + 8.0L * a / ((6.28L + a) * n * n));
      z += (z - x[n - 3]) * r1 * r2 * r3;
    } else {
      z = 3.0L * x[i - 1] - 3.0L * x[i - 2] + x[i - 3];
    }
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = jacobi_eval(n, a, b, z);
      long double defl = 0.0L;
      for (int j = 0; j < i; ++j) defl += 1.0L / (z - x[j]);
      const long double dz = p / (dp - p * defl);
      z -= dz;
      if (std::fabs(dz) < 1e-19L) break;
    }
    x[i] = z;
  }
  // Final Newton polish without deflation, then weights.
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const long double lg = std::lgamma(a + n + 1.0L) + std::lgamma(b + n + 1.0L) -
                         std::lgamma(n + 1.0L) - std::lgamma(n + a + b + 1.0L);
  for (int i = 0; i < n; ++i) {
    long double zi = x[i];
    for (int it = 0; it < 3; ++it) {
      auto [p, dp] = jacobi_eval(n, a, b, zi);
      zi -= p / dp;
    }
    const long double dp = jacobi_eval(n, a, b, zi).second;
    const long double w = std::exp(lg) * std::pow(2.0L, a + b + 1.0L) / ((1.0L - zi * zi) * dp * dp);
    rule.nodes[i] = static_cast<double>(zi);
    rule.weights[i] = static_cast<double>(w);
  }
  // Roots come out descending; return ascending order.
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

GaussRule cached_jacobi(int n, double alpha, double beta) {
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double>, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(n, alpha, beta);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  return cache.emplace(key, compute_jacobi(n, alpha, beta)).first->second;
}

}  // namespace

GaussRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw ContractError("gauss_jacobi: need at least one node");
  if (alpha <= -1.0 || beta <= -1.0) throw ContractError("gauss_jacobi: exponents must exceed -1");
  if (n == 1) {
    // Single node at the weighted mean, weight = total mass.
    const double mass = std::exp(std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                                 std::lgamma(alpha + beta + 2.0)) *
                        std::pow(2.0, alpha + beta + 1.0);
    return GaussRule{{(beta - alpha) / (alpha + beta + 2.0)}, {mass}};
  }
  return cached_jacobi(n, alpha, beta);
}

GaussRule gauss_legendre(int n, double a, double b) {
  GaussRule ref = gauss_jacobi(n, 0.0, 0.0);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
    ref.nodes[i] = mid + half * ref.nodes[i];
    ref.weights[i] *= half;
  }
  return ref;
}

}  // namespace blowup
