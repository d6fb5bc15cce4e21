#pragma once

#include <optional>
#include <vector>

#include "blowup/bubble.hpp"
#include "blowup/quadrature.hpp"

namespace blowup {

/// Critical exponent 2* = 2n/(n-2).
double critical_exponent(int n);

/// c_n = (n-2)/(4(n-1)).
double conformal_constant(int n);

/// h = base + perturbation.
struct PotentialField {
  ScalarFieldOnM base;
  std::optional<ScalarFieldOnM> perturbation;

  double operator()(const Point& x) const;
};

/// Constant field on M.
ScalarFieldOnM constant_field(const ManifoldModel& m, double value);

/// h = c_n R_g + shift (the shift is stored as the perturbation when nonzero).
PotentialField conformal_potential(const ManifoldModel& m, double shift = 0.0);

/// h = value everywhere.
PotentialField constant_potential(const ManifoldModel& m, double value);

struct EnergyOptions {
  bool finite_difference_fallback = true;
  double finite_difference_step = 1e-6;
};

/// The three integrals making up J_h(u).
struct EnergyParts {
  double dirichlet = 0.0;  ///< int |grad u|^2
  double potential = 0.0;  ///< int h u^2
  double critical = 0.0;   ///< int u_+^{2*}

  double energy(int n) const;
};

EnergyParts energy_parts(const ManifoldModel& m, const PotentialField& h, const ScalarFieldOnM& u,
                         const QuadratureRule& q, const EnergyOptions& options = {});

/// J_h(u) = 1/2 int (|grad u|^2 + h u^2) - (1/2*) int u_+^{2*}.
double energy(const ManifoldModel& m, const PotentialField& h, const ScalarFieldOnM& u,
              const QuadratureRule& q, const EnergyOptions& options = {});

/// Strong-form residual norm || -div grad(sum W) + h sum W - (sum W)^{2*-1} ||
/// in L^{2n/(n+2)}. Throws CapacityError when the rule is coarser than min delta_i.
double residual_norm(const ManifoldModel& m, const PotentialField& h, const Configuration& cfg,
                     const CutoffSpec& c, const QuadratureRule& q);

/// Pointwise residual of the configuration at x.
double residual_density(const ManifoldModel& m, const PotentialField& h, const Configuration& cfg,
                        const CutoffSpec& c, const Point& x);

/// (delta_i delta_j / d(xi_i, xi_j)^2)^((n-2)/2).
double interaction_term(const ManifoldModel& m, const BubbleParams& a, const BubbleParams& b);

/// Splitting J_h(sum W) = sum_i J_h(W_i) + cross - excess / 2*, where cross sums
/// int (grad W_i . grad W_j + h W_i W_j) over pairs i < j and excess is
/// int ((sum W)^{2*} - sum W_i^{2*}).
struct EnergyBreakdown {
  double total = 0.0;
  std::vector<double> per_bubble;
  double cross_dirichlet_plus_potential = 0.0;
  double nonlinear_excess = 0.0;
  /// J_h(sum W) - sum J_h(W_i), from the separately integrated pieces.
  double deviation = 0.0;
  /// Sum over pairs i < j of interaction_term.
  double predicted_interaction = 0.0;
};

EnergyBreakdown energy_split(const ManifoldModel& m, const PotentialField& h, const Configuration& cfg,
                             const CutoffSpec& c, const QuadratureRule& q);

/// (a + b)^p - a^p - b^p for a, b >= 0 without cancellation.
double power_excess(double a, double b, double p);

/// J_h(W) - E_1 for a single bubble, integrated against the flat reference
/// weights of a polar rule centred at the bubble so that the O(1) parts cancel
/// node by node. Requires q.flat_defects and q.center == b.center.
double single_bubble_energy_deviation(const ManifoldModel& m, const PotentialField& h,
                                      const BubbleParams& b, const CutoffSpec& c,
                                      const QuadratureRule& q);

/// Minimum Rayleigh quotient over constants and products of low-degree ambient
/// coordinate functions (an upper bound for lambda_1(-div grad + h)).
double rayleigh_lambda1_estimate(const ManifoldModel& m, const PotentialField& h,
                                 const QuadratureRule& q, int trial_count);

/// Integrals of the standard bubble U over R^n from a one-dimensional radial rule.
struct RadialOracle {
  double dirichlet = 0.0;
  double critical = 0.0;
  double energy = 0.0;
};
RadialOracle flat_radial_oracle(int n, int order = 200);

/// E_1 = K_n^{-n}/n = (1/n) (n(n-2)/4)^{n/2} vol(S^n).
double bubble_energy_constant(int n);

}  // namespace blowup
