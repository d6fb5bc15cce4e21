#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "blowup/geometry.hpp"

namespace blowup {

/// Nodes and positive weights realising integrals over M against dv_g.
struct QuadratureRule {
  ManifoldModel model;
  std::vector<Point> nodes;
  std::vector<double> weights;
  Point center;
  double finest_scale = 1.0;
  /// Single-centre polar rules only: weight minus the weight the node would
  /// carry under the Euclidean measure of normal coordinates at `center`,
  /// evaluated without cancellation. Empty otherwise.
  std::vector<double> flat_defects;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Node counts of a hyperspherical direction rule. `polar` applies to the angle
/// measured from the rule's axis, `rest` to every deeper level.
struct AngularOrders {
  int polar = 1;
  int rest = 1;
};

struct QuadratureOptions {
  int radial_order = 20;       ///< Gauss-Legendre nodes per radial panel.
  AngularOrders directions;    ///< S^{n-1} (flat, sphere) or the first factor (product).
  AngularOrders second_factor; ///< Second factor directions (product only).
  int split_order = 12;        ///< Product only: nodes on each half of the split angle range.
  double cutoff_radius = 0.0;  ///< Adds radial breakpoints at r0/2 and r0 when > 0.
  int cutoff_panels = 4;       ///< Panels across the cutoff transition [r0/2, r0].
  double outer_panel_width = 0.5;
  /// Extra radial breakpoints (e.g. the edge of a compactly supported bump).
  std::vector<double> extra_radii;
  /// Optional ambient vector at the centre; the polar angle is measured from
  /// it (per factor for products). Empty = first frame vector, or the outward
  /// direction for an off-centre point of a flat ball.
  std::vector<double> axis;
};

/// Concentration-aware rule around `center`: geodesic-polar coordinates with
/// radial panels doubling from finest_scale/10 and extended to the cut locus,
/// so the whole of M is covered. Picks orders that fit `budget`; throws
/// CapacityError (carrying the minimal budget) when impossible.
QuadratureRule build_quadrature(const ManifoldModel& m, const Point& center, double finest_scale,
                                std::size_t budget);

/// Same with explicit orders.
QuadratureRule build_quadrature(const ManifoldModel& m, const Point& center, double finest_scale,
                                const QuadratureOptions& options, std::size_t budget);

/// Node count build_quadrature would produce, without building.
std::size_t quadrature_size(const ManifoldModel& m, const Point& center, double finest_scale,
                            const QuadratureOptions& options);

/// Union of per-centre polar rules blended by the smooth partition of unity
/// w_i = g_i / sum_j g_j with g_j = (s_j^2 + d(., c_j)^2)^(-partition_power).
/// When options.axis is empty each centre's axis points at its nearest neighbour.
QuadratureRule build_multi_center_quadrature(const ManifoldModel& m, std::span<const Point> centers,
                                             std::span<const double> scales,
                                             const QuadratureOptions& options, std::size_t budget,
                                             int partition_power = 8);

/// Coarse tensorised rule: polar coordinates on each sphere factor (sin-power
/// Jacobians) or around the ball's origin. No grading.
QuadratureRule build_global_quadrature(const ManifoldModel& m, int radial_order,
                                       AngularOrders angular);

/// Deterministic compensated sum of f over the rule.
double integrate(const QuadratureRule& rule, const std::function<double(const Point&)>& f);

/// One row per node: c0,...,c{d-1},weight.
void write_quadrature_csv(const QuadratureRule& rule, std::ostream& out);

/// Directions on S^{m-1} spanned by an orthonormal basis (first vector = axis).
struct DirectionNode {
  std::vector<double> direction;
  double weight;
};
std::vector<DirectionNode> sphere_directions(const std::vector<std::vector<double>>& basis,
                                             AngularOrders orders);

}  // namespace blowup
