#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blowup/bubble.hpp"
#include "blowup/functional.hpp"
#include "blowup/quadrature.hpp"

namespace blowup {

/// 2(n-1)/((n-2)(n-4)).
double c1_constant(int n);

/// 1/64 for n = 6, 1/(24(n-4)(n-6)) for n >= 7.
double dn_constant(int n);

/// psi(y) = exp(1 - 1/(1 - |y|^2)) inside the unit ball, 0 outside; psi(0) = 1.
double unit_bump(double y_squared);

/// H(x) = -1 + sum_i a_i psi((x - p_i)/sigma).
struct BumpFunction {
  int n = 6;
  std::vector<std::vector<double>> maxima;
  std::vector<double> amplitudes;
  double sigma = 0.0;
  double r_tilde = 0.0;

  std::size_t k() const noexcept { return maxima.size(); }
  double operator()(std::span<const double> x) const;
  /// H(p_i) = a_i - 1.
  double peak_value(std::size_t i) const { return amplitudes.at(i) - 1.0; }
};

struct BumpRequest {
  int k = 1;
  int n = 6;
  /// Rotates the circle placement by a seeded random phase.
  std::optional<std::uint64_t> seed;
  /// Empty means a_i = 2 + i/k (i = 1..k).
  std::vector<double> amplitudes;
  /// Smallest admissible separation radius.
  double min_r_tilde = 1e-3;
};

/// Places the maxima on the circle of radius 1/2 in the first two coordinates
/// (the origin when k = 1), sets r_tilde = min gap / 3 (1/3 when k = 1) and
/// sigma = r_tilde. Throws CapacityError when r_tilde < min_r_tilde.
BumpFunction build_H(const BumpRequest& request);

struct ReducedEnergyParams {
  int n = 6;
  double weyl_sq = 0.0;
  BumpFunction H;

  double c1() const { return c1_constant(n); }
  double dn() const { return dn_constant(n); }
};

/// E_1 (1 + c1 v delta^2 - weyl_sq * branch(delta)) with branch = delta^4 ln(1/delta)/64
/// for n = 6 and delta^4/(24(n-4)(n-6)) for n >= 7. Throws DomainError unless
/// 0 < delta < 1.
double expansion_predict(int n, double weyl_sq, double delta, double v);

/// F_n(t, p) = c1 H(p) t^2 - d_n weyl_sq t^4.
double F_n_eval(const ReducedEnergyParams& params, double t, std::span<const double> p);

struct FnCritical {
  double t_star = 0.0;
  std::vector<double> p_star;
  double value = 0.0;
  double d2t = 0.0;  ///< d^2 F / dt^2 at t_star (negative).
};

/// Closed-form maximum of F_n(., p_i) at the i-th bump maximum. Throws
/// DegenerateError when weyl_sq = 0 or H(p_i) <= 0.
FnCritical F_n_critical(const ReducedEnergyParams& params, std::size_t i);

/// n >= 7: sqrt(eps). n = 6: the root of delta^2 ln(1/delta) = eps on (0, e^{-1/2}),
/// DomainError when eps >= 1/(2e).
double delta_eps(int n, double eps);

struct ScheduleParams {
  int n = 6;
  double eps = 1e-6;
  int r = 1;
};

struct Schedule {
  double delta = 0.0;
  double mu = 0.0;
  double theta = 0.0;  ///< exponent of mu = eps^theta (0 for n = 6)
  /// Constraint scale over mu: rate/mu, eps/mu^r and delta/mu, where rate is
  /// |ln eps|^{-1/4} (n = 6) or eps^{(n-6)/(2(n-2))} (n >= 7).
  double margins[3] = {0.0, 0.0, 0.0};
};

/// mu = |ln eps|^{-1/8} (n = 6), eps^theta with theta = min((n-6)/(2(n-2)), 1/max(r,1))/2
/// (n >= 7). DomainError for eps outside (0, 1).
Schedule mu_eps(const ScheduleParams& sch);

struct HEpsField {
  PotentialField field;
  double sup_perturbation = 0.0;  ///< sup |h_eps - c_n R_g| = eps max(1, max_i a_i - 1)
  double cr_proxy = 0.0;          ///< eps / mu^r
  std::vector<Point> bump_centers;  ///< exp_{xi0}(mu p_i)
  double bump_radius = 0.0;         ///< mu sigma
  std::vector<std::string> warnings;
};

/// h_eps = c_n R_g + eps H(mu^{-1} exp_{xi0}^{-1}(x)), normal coordinates taken in
/// tangent_frame(m, xi0); points past the injectivity radius get -eps. Warns when
/// mu sigma falls below `finest_scale`.
HEpsField h_eps_field(const ManifoldModel& m, const Point& xi0, double eps, double mu,
                      const BumpFunction& H, int r = 1, double finest_scale = 0.0);

/// delta_i = t_i delta_eps and xi_i = exp_{xi0}(mu p_i); cone parameters are
/// chosen so that the configuration is admissible whenever the centres differ.
Configuration reduced_configuration(const ManifoldModel& m, const Point& xi0, std::span<const double> t,
                                    const std::vector<std::vector<double>>& p, double delta_eps_value,
                                    double mu);

struct ReducedLimitOptions {
  QuadratureOptions quadrature;
  std::size_t budget = 20'000'000;
};

struct ReducedLimitResult {
  double ratio = 0.0;      ///< (J - k E_1) / (E_1 eps delta_eps^2)
  double deviation = 0.0;  ///< J - k E_1
  double interaction = 0.0;
};

/// Measures the normalised energy of sum W for the configuration built by
/// reduced_configuration. The O(1) part cancels against the flat reference
/// node by node; pair interactions come from a partition-of-unity rule.
ReducedLimitResult reduced_limit_ratio(const ManifoldModel& m, const HEpsField& h, const Configuration& cfg,
                                       const CutoffSpec& c, double eps, double delta_eps_value,
                                       const ReducedLimitOptions& options = {});

}  // namespace blowup
