#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace blowup {

enum class ModelKind { ProductSpheres, RoundSphere, FlatBall };

/// Closed-form homogeneous model manifolds. Spheres have unit radius; points
/// are stored in ambient coordinates (R^{p+1} x R^{q+1}, R^{n+1} or R^n).
class ManifoldModel {
 public:
  /// S^p x S^q with the product metric, p, q >= 3.
  static ManifoldModel product_spheres(int p, int q);
  /// S^n, n >= 3.
  static ManifoldModel round_sphere(int n);
  /// Euclidean ball of the given radius centred at the origin of R^n, n >= 3.
  static ManifoldModel flat_ball(int n, double radius);

  ModelKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return n_; }
  int p() const noexcept { return p_; }
  int q() const noexcept { return q_; }
  double radius() const noexcept { return radius_; }
  int ambient_dimension() const noexcept;
  bool compact() const noexcept { return kind_ != ModelKind::FlatBall; }

  /// pi for the sphere models. For the flat ball this is the ball radius: the
  /// largest geodesic ball around the origin that stays inside the model.
  double injectivity_radius() const noexcept;

  /// Riemannian volume (finite for every supported model).
  double volume() const;

  std::string name() const;

  bool operator==(const ManifoldModel&) const = default;

 private:
  ManifoldModel(ModelKind kind, int n, int p, int q, double radius)
      : kind_(kind), n_(n), p_(p), q_(q), radius_(radius) {}

  ModelKind kind_;
  int n_;
  int p_;
  int q_;
  double radius_;
};

struct Point {
  std::vector<double> coords;
};

/// Tangent vector in ambient components. For sphere factors the components
/// are orthogonal to the base point.
struct TangentVector {
  Point base;
  std::vector<double> components;

  double norm() const;
};

/// Throws InvalidArgument when `x` has the wrong size or leaves a sphere.
void validate_point(const ManifoldModel& m, const Point& x);

/// The north pole (e_0 in every sphere factor) or the origin of the ball.
Point base_point(const ManifoldModel& m);

double distance(const ManifoldModel& m, const Point& a, const Point& b);

Point exp_map(const ManifoldModel& m, const Point& base, std::span<const double> v);
Point exp_map(const ManifoldModel& m, const Point& base, const TangentVector& v);

/// Inverse of exp_map. Throws DomainError when `target` sits at or beyond the
/// injectivity radius of a sphere model. Total on the flat ball.
TangentVector log_map(const ManifoldModel& m, const Point& base, const Point& target);

double scalar_curvature(const ManifoldModel& m, const Point& x);

/// Squared norm |Weyl_g|_g^2 of the Weyl (0,4)-tensor.
double weyl_norm_sq(const ManifoldModel& m, const Point& x);

/// |Weyl|^2 of S^3 x S^3, regenerated from the full curvature tensor in tests.
inline constexpr double kWeylNormSqS3xS3 = 72.0 / 5.0;

/// Orthonormal basis of T_x M (ambient components). For product models the
/// first p vectors span the first factor and the last q the second one.
std::vector<std::vector<double>> tangent_frame(const ManifoldModel& m, const Point& x);

/// Frame whose first vector is aligned with the tangential part of `axis`; for
/// products the first vector of each factor block follows that factor's part.
/// Zero parts fall back to the default frame.
std::vector<std::vector<double>> tangent_frame(const ManifoldModel& m, const Point& x,
                                               std::span<const double> axis);

/// exp_x(sum_j c_j e_j) for the frame returned by tangent_frame.
Point exp_in_frame(const ManifoldModel& m, const Point& x,
                   const std::vector<std::vector<double>>& frame, std::span<const double> c);

/// Frame coordinates of a tangent vector.
std::vector<double> frame_coordinates(const std::vector<std::vector<double>>& frame,
                                      std::span<const double> v);

/// Laplacian div(grad d) of the distance d = d(center, .) evaluated at x != center,
/// i.e. the logarithmic radial derivative of the geodesic-polar volume density.
double distance_laplacian(const ManifoldModel& m, const Point& center, const Point& x);

/// Riemannian gradient of d(center, .) at x in ambient components; zero when
/// x = center. Unlike log_map it is defined on the whole product model away
/// from the cut locus of each factor.
std::vector<double> distance_gradient(const ManifoldModel& m, const Point& center, const Point& x);

/// Volume of the unit sphere S^k in R^{k+1}.
double unit_sphere_volume(int k);

/// Projection of `v` onto the tangent space at x (drops normal components of
/// sphere factors).
std::vector<double> project_to_tangent(const ManifoldModel& m, const Point& x,
                                       std::span<const double> v);

}  // namespace blowup
