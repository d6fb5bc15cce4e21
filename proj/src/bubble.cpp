#include "blowup/bubble.hpp"

#include <cmath>

#include "blowup/errors.hpp"

namespace blowup {

RadialJet smoothstep(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0};
  // f(t) / (f(t) + f(1-t)) is the logistic function of psi = 1/(1-t) - 1/t.
  const double u = 1.0 - t;
  const double psi = 1.0 / u - 1.0 / t;
  const double dpsi = 1.0 / (u * u) + 1.0 / (t * t);
  const double d2psi = 2.0 / (u * u * u) - 2.0 / (t * t * t);
  const double e = std::exp(-std::fabs(psi));
  const double sigma = psi >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
  const double slope = e / ((1.0 + e) * (1.0 + e));  // sigma (1 - sigma)
  return {sigma, slope * dpsi, slope * (1.0 - 2.0 * sigma) * dpsi * dpsi + slope * d2psi};
}

CutoffSpec CutoffSpec::standard(const ManifoldModel& m) {
  return CutoffSpec(0.25 * m.injectivity_radius());
}

CutoffSpec CutoffSpec::with_radius(double r0) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw InvalidArgument("cutoff radius must be positive");
  return CutoffSpec(r0);
}

RadialJet CutoffSpec::jet(double d) const {
  if (!enabled()) return {1.0, 0.0, 0.0};
  const double scale = 0.5 * r0_;
  const auto s = smoothstep((r0_ - d) / scale);
  return {s.value, -s.d1 / scale, s.d2 / (scale * scale)};
}

RadialJet bubble_profile(int n, double delta, double d) {
  const double m = 0.5 * (n - 2.0);
  const double q = delta * delta + d * d;
  const double value = std::pow(std::sqrt(n * (n - 2.0)) * delta / q, m);
  const double a = 2.0 * m * d / q;
  return {value, -a * value, value * (a * a - 2.0 * m / q + 4.0 * m * d * d / (q * q))};
}

RadialJet cut_profile(int n, double delta, const CutoffSpec& c, double d) {
  const auto u = bubble_profile(n, delta, d);
  if (!c.enabled()) return u;
  const auto x = c.jet(d);
  return {x.value * u.value, x.d1 * u.value + x.value * u.d1,
          x.d2 * u.value + 2.0 * x.d1 * u.d1 + x.value * u.d2};
}

double bubble_eval(const ManifoldModel& m, const BubbleParams& b, const CutoffSpec& c, const Point& x) {
  const double d = distance(m, x, b.center);
  if (c.enabled() && d >= c.r0()) return 0.0;
  const double v = cut_profile(m.dimension(), b.delta, c, d).value;
  return b.conformal_factor ? b.conformal_factor(x) * v : v;
}

double multi_bubble_eval(const ManifoldModel& m, const Configuration& cfg, const CutoffSpec& c,
                         const Point& x) {
  double s = 0.0;
  for (const auto& b : cfg.bubbles) s += bubble_eval(m, b, c, x);
  return s;
}

TangentVector bubble_gradient(const ManifoldModel& m, const BubbleParams& b, const CutoffSpec& c,
                              const Point& x) {
  TangentVector out{x, std::vector<double>(x.coords.size(), 0.0)};
  const double d = distance(m, x, b.center);
  if (d == 0.0 || (c.enabled() && d >= c.r0())) return out;
  const auto jet = cut_profile(m.dimension(), b.delta, c, d);
  const auto grad_d = distance_gradient(m, b.center, x);
  const double lambda = b.conformal_factor ? b.conformal_factor(x) : 1.0;
  for (std::size_t i = 0; i < grad_d.size(); ++i) out.components[i] = lambda * jet.d1 * grad_d[i];
  if (b.conformal_factor) {
    const auto gl = finite_difference_gradient(m, b.conformal_factor, x);
    for (std::size_t i = 0; i < gl.size(); ++i) out.components[i] += jet.value * gl[i];
  }
  return out;
}

TangentVector multi_bubble_gradient(const ManifoldModel& m, const Configuration& cfg,
                                    const CutoffSpec& c, const Point& x) {
  TangentVector out{x, std::vector<double>(x.coords.size(), 0.0)};
  for (const auto& b : cfg.bubbles) {
    const auto g = bubble_gradient(m, b, c, x);
    for (std::size_t i = 0; i < g.components.size(); ++i) out.components[i] += g.components[i];
  }
  return out;
}

double bubble_div_grad(const ManifoldModel& m, const BubbleParams& b, const CutoffSpec& c,
                       const Point& x) {
  if (b.conformal_factor) {
    throw ContractError("analytic Laplacian needs the default conformal factor");
  }
  const double d = distance(m, x, b.center);
  if (c.enabled() && d >= c.r0()) return 0.0;
  const int n = m.dimension();
  const auto jet = cut_profile(n, b.delta, c, d);
  // At the centre u' ~ u''(0) d and div grad d ~ (n-1)/d.
  if (d < 1e-9 * b.delta) return n * jet.d2;
  return jet.d2 + jet.d1 * distance_laplacian(m, b.center, x);
}

double multi_bubble_div_grad(const ManifoldModel& m, const Configuration& cfg, const CutoffSpec& c,
                             const Point& x) {
  double s = 0.0;
  for (const auto& b : cfg.bubbles) s += bubble_div_grad(m, b, c, x);
  return s;
}

ScalarFieldOnM bubble_field(const ManifoldModel& m, const BubbleParams& b, const CutoffSpec& c) {
  return {m, [m, b, c](const Point& x) { return bubble_eval(m, b, c, x); },
          [m, b, c](const Point& x) { return bubble_gradient(m, b, c, x).components; }};
}

ScalarFieldOnM multi_bubble_field(const ManifoldModel& m, const Configuration& cfg,
                                  const CutoffSpec& c) {
  return {m, [m, cfg, c](const Point& x) { return multi_bubble_eval(m, cfg, c, x); },
          [m, cfg, c](const Point& x) { return multi_bubble_gradient(m, cfg, c, x).components; }};
}

std::vector<double> finite_difference_gradient(const ManifoldModel& m,
                                               const std::function<double(const Point&)>& f,
                                               const Point& x, double step) {
  const auto frame = tangent_frame(m, x);
  std::vector<double> g(x.coords.size(), 0.0);
  std::vector<double> v(x.coords.size());
  for (const auto& e : frame) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = step * e[i];
    const double fp = f(exp_map(m, x, v));
    for (auto& vi : v) vi = -vi;
    const double fm = f(exp_map(m, x, v));
    const double slope = (fp - fm) / (2.0 * step);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += slope * e[i];
  }
  return g;
}

AdmissibilityReport is_admissible(const ManifoldModel& m, const Configuration& cfg) {
  AdmissibilityReport r;
  auto fail = [&](std::string what, int i, int j, double value, double bound) {
    r.admissible = false;
    r.violations.push_back({std::move(what), i, j, value, bound});
  };
  const int k = static_cast<int>(cfg.bubbles.size());
  for (int i = 0; i < k; ++i) {
    const double d = cfg.bubbles[i].delta;
    if (!(d > 0.0)) fail("scale", i, -1, d, 0.0);
    if (!(d < cfg.delta_bar)) fail("scale", i, -1, d, cfg.delta_bar);
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const auto& a = cfg.bubbles[i];
      const auto& b = cfg.bubbles[j];
      const double ratio = a.delta / b.delta;
      if (!(ratio < cfg.alpha)) fail("ratio", i, j, ratio, cfg.alpha);
      if (!(ratio > 1.0 / cfg.alpha)) fail("ratio", i, j, ratio, 1.0 / cfg.alpha);
      const double dist = distance(m, a.center, b.center);
      const double sep = dist * dist / (a.delta * b.delta);
      if (!(sep > cfg.K)) fail("separation", i, j, sep, cfg.K);
    }
  }
  return r;
}

nlohmann::json to_json(const Configuration& cfg) {
  nlohmann::json j;
  j["delta"] = nlohmann::json::array();
  j["center"] = nlohmann::json::array();
  for (const auto& b : cfg.bubbles) {
    j["delta"].push_back(b.delta);
    j["center"].push_back(b.center.coords);
  }
  j["alpha"] = cfg.alpha;
  j["K"] = cfg.K;
  j["delta_bar"] = cfg.delta_bar;
  return j;
}

Configuration configuration_from_json(const ManifoldModel& m, const nlohmann::json& j) {
  Configuration cfg;
  if (!j.contains("delta") || !j.contains("center") || !j["delta"].is_array() ||
      !j["center"].is_array()) {
    throw InvalidArgument("configuration needs arrays 'delta' and 'center'");
  }
  if (j["delta"].size() != j["center"].size() || j["delta"].empty()) {
    throw InvalidArgument("configuration 'delta' and 'center' must have the same nonzero length");
  }
  for (std::size_t i = 0; i < j["delta"].size(); ++i) {
    BubbleParams b;
    b.delta = j["delta"][i].get<double>();
    b.center.coords = j["center"][i].get<std::vector<double>>();
    validate_point(m, b.center);
    if (!(b.delta > 0.0)) throw InvalidArgument("bubble scales must be positive");
    cfg.bubbles.push_back(std::move(b));
  }
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.K = j.value("K", cfg.K);
  cfg.delta_bar = j.value("delta_bar", cfg.delta_bar);
  if (!(cfg.alpha > 1.0)) throw InvalidArgument("alpha must exceed 1");
  if (!(cfg.K > 0.0)) throw InvalidArgument("K must be positive");
  if (!(cfg.delta_bar > 0.0)) throw InvalidArgument("delta_bar must be positive");
  return cfg;
}

}  // namespace blowup
