#include "blowup/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "blowup/errors.hpp"
#include "blowup/gauss.hpp"
#include "blowup/parallel.hpp"

namespace blowup {
namespace {

constexpr double kPi = std::numbers::pi;

// One geodesic ray of the polar patch: unit tangent direction, angular weight,
// the radius where it meets the cut locus (or the ball boundary) and, for
// products, the split of the direction between the two factors.
struct Ray {
  std::vector<double> direction;
  double weight;
  double rho_max;
  double c = 1.0;
  double s = 0.0;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void validate_options(const QuadratureOptions& o, double finest) {
  if (!(finest > 0.0) || !std::isfinite(finest)) {
    throw InvalidArgument("quadrature finest_scale must be positive and finite");
  }
  if (o.radial_order < 1 || o.directions.polar < 1 || o.directions.rest < 1 ||
      o.second_factor.polar < 1 || o.second_factor.rest < 1 || o.split_order < 1 ||
      o.cutoff_panels < 1) {
    throw InvalidArgument("quadrature orders must be at least 1");
  }
  if (!(o.outer_panel_width > 0.0) || o.cutoff_radius < 0.0) {
    throw InvalidArgument("quadrature panel width must be positive, cutoff radius nonnegative");
  }
}

std::vector<Ray> build_rays(const ManifoldModel& m, const Point& center,
                            const QuadratureOptions& o) {
  // Off-centre flat balls default to the outward axis, so that the boundary
  // distance depends on the polar angle only.
  const bool outward = m.kind() == ModelKind::FlatBall && o.axis.empty() && dot(center.coords, center.coords) > 0.0;
  const auto frame = tangent_frame(m, center, outward ? std::span<const double>(center.coords) : o.axis);
  std::vector<Ray> rays;
  switch (m.kind()) {
    case ModelKind::FlatBall: {
      const double r2 = m.radius() * m.radius() - dot(center.coords, center.coords);
      if (r2 <= 0.0) throw DomainError("quadrature centre lies outside the flat ball");
      for (auto& d : sphere_directions(frame, o.directions)) {
        const double cw = dot(center.coords, d.direction);
        const double rho = -cw + std::sqrt(cw * cw + r2);
        rays.push_back({std::move(d.direction), d.weight, rho});
      }
      break;
    }
    case ModelKind::RoundSphere:
      for (auto& d : sphere_directions(frame, o.directions)) {
        rays.push_back({std::move(d.direction), d.weight, kPi});
      }
      break;
    case ModelKind::ProductSpheres: {
      const std::vector<std::vector<double>> fa(frame.begin(), frame.begin() + m.p());
      const std::vector<std::vector<double>> fb(frame.begin() + m.p(), frame.end());
      const auto da = sphere_directions(fa, o.directions);
      const auto db = sphere_directions(fb, o.second_factor);
      // The cut locus is rho = pi / max(cos phi, sin phi); split phi at the kink.
      std::vector<std::pair<double, double>> phis;
      for (const auto& [lo, hi] : {std::pair{0.0, kPi / 4}, std::pair{kPi / 4, kPi / 2}}) {
        const auto g = gauss_legendre(o.split_order, lo, hi);
        for (std::size_t i = 0; i < g.nodes.size(); ++i) phis.emplace_back(g.nodes[i], g.weights[i]);
      }
      for (const auto& [phi, wphi] : phis) {
        const double c = std::cos(phi);
        const double s = std::sin(phi);
        for (const auto& a : da) {
          for (const auto& b : db) {
            std::vector<double> dir(a.direction.size());
            for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = c * a.direction[i] + s * b.direction[i];
            rays.push_back({std::move(dir), wphi * a.weight * b.weight, kPi / std::max(c, s), c, s});
          }
        }
      }
      break;
    }
  }
  return rays;
}

// log(sin x / x), accurate near 0.
double log_sinc(double x) {
  const double x2 = x * x;
  if (x2 < 1e-2) {
    return -x2 * (1.0 / 6.0 + x2 * (1.0 / 180.0 + x2 * (1.0 / 2835.0 + x2 / 37800.0)));
  }
  return std::log(std::sin(x) / x);
}

// Model density divided by the Euclidean one, minus 1.
double density_defect(const ManifoldModel& m, const Ray& ray, double rho) {
  switch (m.kind()) {
    case ModelKind::FlatBall: return 0.0;
    case ModelKind::RoundSphere: return std::expm1((m.dimension() - 1) * log_sinc(rho));
    case ModelKind::ProductSpheres:
      if (ray.s == 0.0) return std::expm1((m.p() - 1) * log_sinc(rho * ray.c));
      return std::expm1((m.p() - 1) * log_sinc(rho * ray.c) + (m.q() - 1) * log_sinc(rho * ray.s));
  }
  return 0.0;
}

// Density of the Euclidean measure in the same polar coordinates.
double flat_jacobian(const ManifoldModel& m, const Ray& ray, double rho) {
  if (m.kind() == ModelKind::ProductSpheres) {
    return std::pow(rho * ray.c, m.p() - 1) * std::pow(rho * ray.s, m.q() - 1) * rho;
  }
  return std::pow(rho, m.dimension() - 1);
}

double jacobian(const ManifoldModel& m, const Ray& ray, double rho) {
  switch (m.kind()) {
    case ModelKind::FlatBall: return std::pow(rho, m.dimension() - 1);
    case ModelKind::RoundSphere: return std::pow(std::sin(rho), m.dimension() - 1);
    case ModelKind::ProductSpheres:
      return std::pow(std::sin(rho * ray.c), m.p() - 1) * std::pow(std::sin(rho * ray.s), m.q() - 1) *
             rho;
  }
  return 0.0;
}

std::vector<double> radial_breakpoints(const QuadratureOptions& o, double finest, double rho_max) {
  std::vector<double> pts{0.0};
  const double r0 = o.cutoff_radius;
  const double inner = r0 > 0.0 ? std::min(0.5 * r0, rho_max) : rho_max;
  for (double x = finest / 10.0; x < inner; x *= 2.0) pts.push_back(x);
  if (r0 > 0.0) {
    pts.push_back(0.5 * r0);
    for (int j = 1; j <= o.cutoff_panels; ++j) pts.push_back(0.5 * r0 + j * 0.5 * r0 / o.cutoff_panels);
    if (rho_max > r0) {
      const int panels = std::clamp(
          static_cast<int>(std::ceil((rho_max - r0) / o.outer_panel_width)), 1, 16);
      for (int j = 1; j < panels; ++j) pts.push_back(r0 + j * (rho_max - r0) / panels);
    }
  }
  for (double x : o.extra_radii) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double x : pts) {
    if (x >= rho_max * (1.0 - 1e-13)) break;
    if (!out.empty() && x - out.back() <= 1e-14 * std::max(1.0, x)) continue;
    out.push_back(x);
  }
  out.push_back(rho_max);
  return out;
}

QuadratureOptions auto_options(int level) {
  static constexpr int kRadial[] = {20, 20, 20, 12, 8};
  static constexpr AngularOrders kAngular[] = {{4, 2}, {2, 1}, {1, 1}, {1, 1}, {1, 1}};
  QuadratureOptions o;
  o.radial_order = kRadial[level];
  o.directions = kAngular[level];
  o.second_factor = kAngular[level];
  o.split_order = level < 3 ? 12 : 6;
  return o;
}
constexpr int kAutoLevels = 5;

}  // namespace

std::vector<DirectionNode> sphere_directions(const std::vector<std::vector<double>>& basis,
                                             AngularOrders orders) {
  const std::size_t m = basis.size();
  if (m == 0) throw InvalidArgument("sphere_directions needs a nonempty basis");
  const std::size_t dim = basis[0].size();
  std::vector<DirectionNode> out;
  if (m == 1) {
    std::vector<double> minus(basis[0]);
    for (auto& v : minus) v = -v;
    out.push_back({basis[0], 1.0});
    out.push_back({std::move(minus), 1.0});
    return out;
  }
  if (m == 2) {
    const int count = orders.polar;
    for (int j = 0; j < count; ++j) {
      const double a = 2.0 * kPi * j / count;
      std::vector<double> d(dim);
      for (std::size_t i = 0; i < dim; ++i) d[i] = std::cos(a) * basis[0][i] + std::sin(a) * basis[1][i];
      out.push_back({std::move(d), 2.0 * kPi / count});
    }
    return out;
  }
  const double alpha = 0.5 * (static_cast<double>(m) - 3.0);
  const auto g = gauss_jacobi(orders.polar, alpha, alpha);
  const std::vector<std::vector<double>> rest(basis.begin() + 1, basis.end());
  const auto sub = sphere_directions(rest, {orders.rest, orders.rest});
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    const double x = g.nodes[k];
    const double y = std::sqrt(std::max(0.0, 1.0 - x * x));
    for (const auto& s : sub) {
      std::vector<double> d(dim);
      for (std::size_t i = 0; i < dim; ++i) d[i] = x * basis[0][i] + y * s.direction[i];
      out.push_back({std::move(d), g.weights[k] * s.weight});
    }
  }
  return out;
}

std::size_t quadrature_size(const ManifoldModel& m, const Point& center, double finest_scale,
                            const QuadratureOptions& options) {
  validate_options(options, finest_scale);
  validate_point(m, center);
  std::size_t total = 0;
  for (const auto& ray : build_rays(m, center, options)) {
    total += (radial_breakpoints(options, finest_scale, ray.rho_max).size() - 1) *
             static_cast<std::size_t>(options.radial_order);
  }
  return total;
}

QuadratureRule build_quadrature(const ManifoldModel& m, const Point& center, double finest_scale,
                                const QuadratureOptions& options, std::size_t budget) {
  validate_options(options, finest_scale);
  validate_point(m, center);
  if (options.cutoff_radius >= m.injectivity_radius() && m.compact()) {
    throw InvalidArgument("cutoff radius must lie below the injectivity radius");
  }
  const auto rays = build_rays(m, center, options);
  std::size_t total = 0;
  std::vector<std::vector<double>> breaks;
  breaks.reserve(rays.size());
  for (const auto& ray : rays) {
    breaks.push_back(radial_breakpoints(options, finest_scale, ray.rho_max));
    total += (breaks.back().size() - 1) * static_cast<std::size_t>(options.radial_order);
  }
  if (total > budget) {
    throw CapacityError("quadrature needs " + std::to_string(total) + " nodes, budget is " +
                            std::to_string(budget),
                        total);
  }
  QuadratureRule rule{m, {}, {}, center, finest_scale, {}};
  rule.nodes.reserve(total);
  rule.weights.reserve(total);
  rule.flat_defects.reserve(total);
  const auto unit = gauss_legendre(options.radial_order, 0.0, 1.0);
  std::vector<double> v(m.ambient_dimension());
  for (std::size_t r = 0; r < rays.size(); ++r) {
    const auto& ray = rays[r];
    const auto& bp = breaks[r];
    for (std::size_t j = 0; j + 1 < bp.size(); ++j) {
      const double a = bp[j];
      const double h = bp[j + 1] - bp[j];
      for (std::size_t k = 0; k < unit.nodes.size(); ++k) {
        const double rho = a + h * unit.nodes[k];
        const double base = ray.weight * h * unit.weights[k];
        const double w = base * jacobian(m, ray, rho);
        if (!(w > 0.0)) continue;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = rho * ray.direction[i];
        rule.nodes.push_back(exp_map(m, center, v));
        rule.weights.push_back(w);
        rule.flat_defects.push_back(base * flat_jacobian(m, ray, rho) * density_defect(m, ray, rho));
      }
    }
  }
  return rule;
}

QuadratureRule build_quadrature(const ManifoldModel& m, const Point& center, double finest_scale,
                                std::size_t budget) {
  std::size_t smallest = 0;
  for (int level = 0; level < kAutoLevels; ++level) {
    const auto o = auto_options(level);
    const std::size_t size = quadrature_size(m, center, finest_scale, o);
    smallest = size;
    if (size <= budget) return build_quadrature(m, center, finest_scale, o, budget);
  }
  throw CapacityError("quadrature at finest scale " + std::to_string(finest_scale) + " needs at least " +
                          std::to_string(smallest) + " nodes, budget is " + std::to_string(budget),
                      smallest);
}

QuadratureRule build_multi_center_quadrature(const ManifoldModel& m, std::span<const Point> centers,
                                             std::span<const double> scales,
                                             const QuadratureOptions& options, std::size_t budget,
                                             int partition_power) {
  if (centers.empty() || centers.size() != scales.size()) {
    throw InvalidArgument("multi-centre quadrature needs one scale per centre");
  }
  if (partition_power < 1) throw InvalidArgument("partition power must be at least 1");
  const std::size_t k = centers.size();
  std::vector<QuadratureOptions> per(k, options);
  std::size_t total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (options.axis.empty() && k > 1) {
      std::size_t nearest = i;
      double best = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        if (j == i) continue;
        const double d = distance(m, centers[i], centers[j]);
        if (nearest == i || d < best) {
          nearest = j;
          best = d;
        }
      }
      if (best > 0.0) {
        try {
          per[i].axis = log_map(m, centers[i], centers[nearest]).components;
        } catch (const DomainError&) {
          per[i].axis.clear();
        }
      }
    }
    total += quadrature_size(m, centers[i], scales[i], per[i]);
  }
  if (total > budget) {
    throw CapacityError("multi-centre quadrature needs " + std::to_string(total) +
                            " nodes, budget is " + std::to_string(budget),
                        total);
  }
  if (k == 1) return build_quadrature(m, centers[0], scales[0], per[0], budget);

  QuadratureRule rule{m, {}, {}, centers[0], *std::min_element(scales.begin(), scales.end()), {}};
  const double power = partition_power;
  std::vector<double> logg(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto part = build_quadrature(m, centers[i], scales[i], per[i], budget);
    for (std::size_t a = 0; a < part.size(); ++a) {
      const Point& x = part.nodes[a];
      for (std::size_t j = 0; j < k; ++j) {
        const double d = distance(m, x, centers[j]);
        logg[j] = -power * std::log(scales[j] * scales[j] + d * d);
      }
      double denom = 0.0;
      for (std::size_t j = 0; j < k; ++j) denom += std::exp(logg[j] - logg[i]);
      const double w = part.weights[a] / denom;
      if (!(w > 0.0)) continue;
      rule.nodes.push_back(x);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

QuadratureRule build_global_quadrature(const ManifoldModel& m, int radial_order,
                                       AngularOrders angular) {
  if (radial_order < 1 || angular.polar < 1 || angular.rest < 1) {
    throw InvalidArgument("quadrature orders must be at least 1");
  }
  const Point center = base_point(m);
  QuadratureRule rule{m, {}, {}, center, m.injectivity_radius(), {}};
  const auto frame = tangent_frame(m, center);
  const int dim = m.ambient_dimension();
  // Each factor contributes (radius, direction, weight) triples.
  struct Factor {
    std::vector<std::pair<std::vector<double>, double>> vectors;
  };
  auto polar_factor = [&](const std::vector<std::vector<double>>& basis, double rmax, bool sine) {
    Factor f;
    const auto g = gauss_legendre(radial_order, 0.0, rmax);
    const int k = static_cast<int>(basis.size());
    for (const auto& d : sphere_directions(basis, angular)) {
      for (std::size_t j = 0; j < g.nodes.size(); ++j) {
        const double r = g.nodes[j];
        const double jac = sine ? std::pow(std::sin(r), k - 1) : std::pow(r, k - 1);
        std::vector<double> v(dim);
        for (int i = 0; i < dim; ++i) v[i] = r * d.direction[i];
        f.vectors.emplace_back(std::move(v), d.weight * g.weights[j] * jac);
      }
    }
    return f;
  };
  std::vector<Factor> factors;
  switch (m.kind()) {
    case ModelKind::FlatBall: factors.push_back(polar_factor(frame, m.radius(), false)); break;
    case ModelKind::RoundSphere: factors.push_back(polar_factor(frame, kPi, true)); break;
    case ModelKind::ProductSpheres:
      factors.push_back(polar_factor({frame.begin(), frame.begin() + m.p()}, kPi, true));
      factors.push_back(polar_factor({frame.begin() + m.p(), frame.end()}, kPi, true));
      break;
  }
  auto emit = [&](const std::vector<double>& v, double w) {
    if (!(w > 0.0)) return;
    rule.nodes.push_back(exp_map(m, center, v));
    rule.weights.push_back(w);
  };
  if (factors.size() == 1) {
    for (const auto& [v, w] : factors[0].vectors) emit(v, w);
  } else {
    std::vector<double> sum(dim);
    for (const auto& [va, wa] : factors[0].vectors) {
      for (const auto& [vb, wb] : factors[1].vectors) {
        for (int i = 0; i < dim; ++i) sum[i] = va[i] + vb[i];
        emit(sum, wa * wb);
      }
    }
  }
  return rule;
}

double integrate(const QuadratureRule& rule, const std::function<double(const Point&)>& f) {
  return parallel_sum(rule.size(), [&](std::size_t i) { return rule.weights[i] * f(rule.nodes[i]); });
}

void write_quadrature_csv(const QuadratureRule& rule, std::ostream& out) {
  const int dim = rule.model.ambient_dimension();
  for (int i = 0; i < dim; ++i) out << 'c' << i << ',';
  out << "weight\n";
  char buf[32];
  for (std::size_t a = 0; a < rule.size(); ++a) {
    for (double c : rule.nodes[a].coords) {
      std::snprintf(buf, sizeof buf, "%.17g", c);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", rule.weights[a]);
    out << buf << '\n';
  }
}

}  // namespace blowup
