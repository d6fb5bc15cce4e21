#pragma once

#include <functional>
#include <string>
#include <vector>

#include "blowup/geometry.hpp"
#include "json.hpp"

namespace blowup {

/// Value and first two derivatives of a radial function of the distance.
struct RadialJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Smooth cutoff chi with chi = 1 on (-inf, r0/2], chi = 0 on [r0, inf), built
/// from the C-infinity smoothstep f(t) / (f(t) + f(1 - t)), f(t) = exp(-1/t).
/// A disabled cutoff is identically 1.
class CutoffSpec {
 public:
  static CutoffSpec none() { return CutoffSpec(0.0); }
  /// r0 = injectivity radius / 4.
  static CutoffSpec standard(const ManifoldModel& m);
  static CutoffSpec with_radius(double r0);

  bool enabled() const noexcept { return r0_ > 0.0; }
  double r0() const noexcept { return r0_; }

  double operator()(double d) const { return jet(d).value; }
  RadialJet jet(double d) const;

 private:
  explicit CutoffSpec(double r0) : r0_(r0) {}
  double r0_;
};

/// Smoothstep S(t) = f(t) / (f(t) + f(1 - t)) on [0, 1] with derivatives.
RadialJet smoothstep(double t);

/// Optional positive conformal factor; an empty function means 1.
using ConformalFactor = std::function<double(const Point&)>;

struct BubbleParams {
  double delta = 1.0;
  Point center;
  ConformalFactor conformal_factor;
};

/// k bubbles plus the parameters of the admissible cone: 1/alpha < delta_i/delta_j
/// < alpha, d(xi_i, xi_j)^2 / (delta_i delta_j) > K and delta_i < delta_bar.
struct Configuration {
  std::vector<BubbleParams> bubbles;
  double alpha = 2.0;
  double K = 100.0;
  double delta_bar = 1.0;
};

/// A field on M together with its Riemannian gradient (ambient components).
/// The gradient may be empty; consumers then fall back to finite differences.
struct ScalarFieldOnM {
  ManifoldModel model;
  std::function<double(const Point&)> value;
  std::function<std::vector<double>(const Point&)> gradient;

  double operator()(const Point& x) const { return value(x); }
};

/// (sqrt(n(n-2)) delta / (delta^2 + d^2))^((n-2)/2) and its d-derivatives.
RadialJet bubble_profile(int n, double delta, double d);

/// chi(d) * profile(d) as a function of d, with derivatives.
RadialJet cut_profile(int n, double delta, const CutoffSpec& c, double d);

double bubble_eval(const ManifoldModel& m, const BubbleParams& b, const CutoffSpec& c, const Point& x);
double multi_bubble_eval(const ManifoldModel& m, const Configuration& cfg, const CutoffSpec& c,
                         const Point& x);

/// Gradient of the bubble field. Zero at the centre and outside the support.
TangentVector bubble_gradient(const ManifoldModel& m, const BubbleParams& b, const CutoffSpec& c,
                              const Point& x);
TangentVector multi_bubble_gradient(const ManifoldModel& m, const Configuration& cfg,
                                    const CutoffSpec& c, const Point& x);

/// div grad of the bubble field (the analyst's Laplacian; the equation's
/// operator is its negative). Requires the default conformal factor.
double bubble_div_grad(const ManifoldModel& m, const BubbleParams& b, const CutoffSpec& c,
                       const Point& x);
double multi_bubble_div_grad(const ManifoldModel& m, const Configuration& cfg, const CutoffSpec& c,
                             const Point& x);

ScalarFieldOnM bubble_field(const ManifoldModel& m, const BubbleParams& b, const CutoffSpec& c);
ScalarFieldOnM multi_bubble_field(const ManifoldModel& m, const Configuration& cfg,
                                  const CutoffSpec& c);

/// Central differences along an orthonormal frame at x.
std::vector<double> finite_difference_gradient(const ManifoldModel& m,
                                               const std::function<double(const Point&)>& f,
                                               const Point& x, double step = 1e-5);

struct AdmissibilityViolation {
  std::string constraint;  ///< "scale", "ratio" or "separation"
  int i = -1;
  int j = -1;
  double value = 0.0;  ///< measured quantity
  double bound = 0.0;  ///< bound it failed
};

struct AdmissibilityReport {
  bool admissible = true;
  std::vector<AdmissibilityViolation> violations;
};

AdmissibilityReport is_admissible(const ManifoldModel& m, const Configuration& cfg);

/// JSON keys: delta[], center[][], alpha, K, delta_bar.
nlohmann::json to_json(const Configuration& cfg);
Configuration configuration_from_json(const ManifoldModel& m, const nlohmann::json& j);

}  // namespace blowup
