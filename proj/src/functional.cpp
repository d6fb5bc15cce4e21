#include "blowup/functional.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "blowup/errors.hpp"
#include "blowup/gauss.hpp"
#include "blowup/parallel.hpp"

namespace blowup {
namespace {

double squared_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

std::vector<double> gradient_of(const ManifoldModel& m, const ScalarFieldOnM& u, const Point& x,
                                const EnergyOptions& o) {
  if (u.gradient) return u.gradient(x);
  if (!o.finite_difference_fallback) {
    throw ContractError("field has no gradient and the finite-difference fallback is disabled");
  }
  return finite_difference_gradient(m, u.value, x, o.finite_difference_step);
}

void require_resolution(const QuadratureRule& q, const Configuration& cfg) {
  double smallest = cfg.bubbles.empty() ? 0.0 : cfg.bubbles.front().delta;
  for (const auto& b : cfg.bubbles) smallest = std::min(smallest, b.delta);
  if (q.finest_scale > smallest * (1.0 + 1e-12)) {
    throw CapacityError("quadrature finest scale " + std::to_string(q.finest_scale) +
                        " does not resolve bubble scale " + std::to_string(smallest));
  }
}

}  // namespace

double critical_exponent(int n) { return 2.0 * n / (n - 2.0); }

double conformal_constant(int n) { return (n - 2.0) / (4.0 * (n - 1.0)); }

double PotentialField::operator()(const Point& x) const {
  double v = base.value(x);
  if (perturbation) v += perturbation->value(x);
  return v;
}

ScalarFieldOnM constant_field(const ManifoldModel& m, double value) {
  const std::size_t dim = m.ambient_dimension();
  return {m, [value](const Point&) { return value; },
          [dim](const Point&) { return std::vector<double>(dim, 0.0); }};
}

PotentialField conformal_potential(const ManifoldModel& m, double shift) {
  const double base = conformal_constant(m.dimension()) * scalar_curvature(m, base_point(m));
  PotentialField h{constant_field(m, base), std::nullopt};
  if (shift != 0.0) h.perturbation = constant_field(m, shift);
  return h;
}

PotentialField constant_potential(const ManifoldModel& m, double value) {
  return {constant_field(m, value), std::nullopt};
}

double EnergyParts::energy(int n) const {
  return 0.5 * (dirichlet + potential) - critical / critical_exponent(n);
}

EnergyParts energy_parts(const ManifoldModel& m, const PotentialField& h, const ScalarFieldOnM& u,
                         const QuadratureRule& q, const EnergyOptions& options) {
  if (!u.gradient && !options.finite_difference_fallback) {
    throw ContractError("field has no gradient and the finite-difference fallback is disabled");
  }
  const double p = critical_exponent(m.dimension());
  const auto s = parallel_sums(q.size(), 3, [&](std::size_t i, std::span<double> out) {
    const Point& x = q.nodes[i];
    const double w = q.weights[i];
    const double v = u.value(x);
    out[0] = w * squared_norm(gradient_of(m, u, x, options));
    out[1] = w * h(x) * v * v;
    out[2] = v > 0.0 ? w * std::pow(v, p) : 0.0;
  });
  return {s[0], s[1], s[2]};
}

double energy(const ManifoldModel& m, const PotentialField& h, const ScalarFieldOnM& u,
              const QuadratureRule& q, const EnergyOptions& options) {
  return energy_parts(m, h, u, q, options).energy(m.dimension());
}

double residual_density(const ManifoldModel& m, const PotentialField& h, const Configuration& cfg,
                        const CutoffSpec& c, const Point& x) {
  const double u = multi_bubble_eval(m, cfg, c, x);
  const double lap = multi_bubble_div_grad(m, cfg, c, x);
  const double p = critical_exponent(m.dimension());
  return -lap + h(x) * u - (u > 0.0 ? std::pow(u, p - 1.0) : 0.0);
}

double residual_norm(const ManifoldModel& m, const PotentialField& h, const Configuration& cfg,
                     const CutoffSpec& c, const QuadratureRule& q) {
  require_resolution(q, cfg);
  const int n = m.dimension();
  const double s = 2.0 * n / (n + 2.0);
  const double integral = parallel_sum(q.size(), [&](std::size_t i) {
    return q.weights[i] * std::pow(std::fabs(residual_density(m, h, cfg, c, q.nodes[i])), s);
  });
  return std::pow(integral, 1.0 / s);
}

double interaction_term(const ManifoldModel& m, const BubbleParams& a, const BubbleParams& b) {
  const double d = distance(m, a.center, b.center);
  if (d == 0.0) throw DomainError("interaction term needs distinct centres");
  return std::pow(a.delta * b.delta / (d * d), 0.5 * (m.dimension() - 2.0));
}

double power_excess(double a, double b, double p) {
  if (a < b) std::swap(a, b);
  if (a <= 0.0) return 0.0;
  const double x = b / a;
  return std::pow(a, p) * (std::expm1(p * std::log1p(x)) - std::pow(x, p));
}

EnergyBreakdown energy_split(const ManifoldModel& m, const PotentialField& h, const Configuration& cfg,
                             const CutoffSpec& c, const QuadratureRule& q) {
  require_resolution(q, cfg);
  const std::size_t k = cfg.bubbles.size();
  const int n = m.dimension();
  const double p = critical_exponent(n);
  // Layout: [D_i, P_i, N_i] per bubble, then cross, excess, D, P, N of the sum.
  const std::size_t width = 3 * k + 5;
  const auto s = parallel_sums(q.size(), width, [&](std::size_t a, std::span<double> out) {
    const Point& x = q.nodes[a];
    const double w = q.weights[a];
    const double hx = h(x);
    std::vector<double> vals(k);
    std::vector<std::vector<double>> grads(k);
    std::vector<double> gsum(x.coords.size(), 0.0);
    double usum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      vals[i] = bubble_eval(m, cfg.bubbles[i], c, x);
      grads[i] = bubble_gradient(m, cfg.bubbles[i], c, x).components;
      for (std::size_t t = 0; t < gsum.size(); ++t) gsum[t] += grads[i][t];
      usum += vals[i];
      out[3 * i] = w * squared_norm(grads[i]);
      out[3 * i + 1] = w * hx * vals[i] * vals[i];
      out[3 * i + 2] = w * std::pow(vals[i], p);
    }
    double cross = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        double g = 0.0;
        for (std::size_t t = 0; t < gsum.size(); ++t) g += grads[i][t] * grads[j][t];
        cross += g + hx * vals[i] * vals[j];
      }
    }
    std::vector<double> sorted(vals);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double excess = 0.0;
    double acc = sorted.empty() ? 0.0 : sorted[0];
    for (std::size_t i = 1; i < k; ++i) {
      excess += power_excess(acc, sorted[i], p);
      acc += sorted[i];
    }
    out[3 * k] = w * cross;
    out[3 * k + 1] = w * excess;
    out[3 * k + 2] = w * squared_norm(gsum);
    out[3 * k + 3] = w * hx * usum * usum;
    out[3 * k + 4] = w * std::pow(usum, p);
  });
  EnergyBreakdown b;
  for (std::size_t i = 0; i < k; ++i) {
    b.per_bubble.push_back(0.5 * (s[3 * i] + s[3 * i + 1]) - s[3 * i + 2] / p);
  }
  b.cross_dirichlet_plus_potential = s[3 * k];
  b.nonlinear_excess = s[3 * k + 1];
  b.total = 0.5 * (s[3 * k + 2] + s[3 * k + 3]) - s[3 * k + 4] / p;
  b.deviation = b.cross_dirichlet_plus_potential - b.nonlinear_excess / p;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      b.predicted_interaction += interaction_term(m, cfg.bubbles[i], cfg.bubbles[j]);
    }
  }
  return b;
}

double single_bubble_energy_deviation(const ManifoldModel& m, const PotentialField& h,
                                      const BubbleParams& b, const CutoffSpec& c,
                                      const QuadratureRule& q) {
  if (q.flat_defects.size() != q.size()) {
    throw ContractError("energy deviation needs a single-centre polar rule");
  }
  if (distance(m, q.center, b.center) > 1e-14) {
    throw ContractError("energy deviation needs the rule centred at the bubble");
  }
  if (b.conformal_factor) throw ContractError("energy deviation needs the default conformal factor");
  if (!c.enabled()) throw ContractError("energy deviation needs a cutoff");
  if (m.kind() == ModelKind::FlatBall) {
    const double room = m.radius() - std::sqrt(std::inner_product(
                                         b.center.coords.begin(), b.center.coords.end(),
                                         b.center.coords.begin(), 0.0));
    if (c.r0() > room) throw ContractError("cutoff support leaves the flat ball");
  }
  const int n = m.dimension();
  const double p = critical_exponent(n);
  require_resolution(q, Configuration{{b}, 2.0, 1.0, 1.0});

  // Model minus Euclidean normal-coordinate measure, plus the potential term.
  const double curved = parallel_sum(q.size(), [&](std::size_t i) {
    const Point& x = q.nodes[i];
    const double d = distance(m, q.center, x);
    if (d >= c.r0()) return 0.0;
    const auto j = cut_profile(n, b.delta, c, d);
    const double density = 0.5 * j.d1 * j.d1 - std::pow(j.value, p) / p;
    return q.flat_defects[i] * density + q.weights[i] * 0.5 * h(x) * j.value * j.value;
  });

  // Euclidean energy of the cut profile minus that of the full profile.
  const double omega = unit_sphere_volume(n - 1);
  CompensatedSum flat;
  const double r0 = c.r0();
  const int panels = 8;
  for (int t = 0; t < panels; ++t) {
    const double lo = 0.5 * r0 + t * 0.5 * r0 / panels;
    const auto g = gauss_legendre(30, lo, lo + 0.5 * r0 / panels);
    for (std::size_t a = 0; a < g.nodes.size(); ++a) {
      const double r = g.nodes[a];
      const auto cut = cut_profile(n, b.delta, c, r);
      const auto full = bubble_profile(n, b.delta, r);
      const double diff = 0.5 * (cut.d1 * cut.d1 - full.d1 * full.d1) -
                          (std::pow(cut.value, p) - std::pow(full.value, p)) / p;
      flat.add(omega * g.weights[a] * diff * std::pow(r, n - 1));
    }
  }
  // Tail r > r0 through r = r0 / s.
  const auto g = gauss_legendre(60, 0.0, 1.0);
  for (std::size_t a = 0; a < g.nodes.size(); ++a) {
    const double sv = g.nodes[a];
    const double r = r0 / sv;
    const auto full = bubble_profile(n, b.delta, r);
    const double density = 0.5 * full.d1 * full.d1 - std::pow(full.value, p) / p;
    flat.add(-omega * g.weights[a] * density * std::pow(r, n - 1) * r0 / (sv * sv));
  }
  return curved + flat.value();
}

double rayleigh_lambda1_estimate(const ManifoldModel& m, const PotentialField& h,
                                 const QuadratureRule& q, int trial_count) {
  if (trial_count < 1) throw InvalidArgument("trial_count must be at least 1");
  const int dim = m.ambient_dimension();
  // Trial list: 1, x_i, x_i x_j (i <= j), truncated to trial_count.
  std::vector<std::pair<int, int>> trials{{-1, -1}};
  for (int i = 0; i < dim; ++i) trials.emplace_back(i, -1);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) trials.emplace_back(i, j);
  }
  trials.resize(std::min<std::size_t>(trials.size(), trial_count));
  const std::size_t t = trials.size();

  const auto sums = parallel_sums(q.size(), 2 * t * t, [&](std::size_t a, std::span<double> out) {
    const Point& x = q.nodes[a];
    const double w = q.weights[a];
    const double hx = h(x);
    std::vector<double> vals(t);
    std::vector<std::vector<double>> grads(t, std::vector<double>(dim, 0.0));
    auto coord_grad = [&](int i) {
      std::vector<double> e(dim, 0.0);
      e[i] = 1.0;
      return project_to_tangent(m, x, e);
    };
    for (std::size_t r = 0; r < t; ++r) {
      const auto [i, j] = trials[r];
      if (i < 0) {
        vals[r] = 1.0;
      } else if (j < 0) {
        vals[r] = x.coords[i];
        grads[r] = coord_grad(i);
      } else {
        vals[r] = x.coords[i] * x.coords[j];
        const auto gi = coord_grad(i);
        const auto gj = coord_grad(j);
        for (int s = 0; s < dim; ++s) grads[r][s] = x.coords[j] * gi[s] + x.coords[i] * gj[s];
      }
    }
    for (std::size_t r = 0; r < t; ++r) {
      for (std::size_t s = 0; s < t; ++s) {
        double g = 0.0;
        for (int e = 0; e < dim; ++e) g += grads[r][e] * grads[s][e];
        out[r * t + s] = w * (g + hx * vals[r] * vals[s]);
        out[t * t + r * t + s] = w * vals[r] * vals[s];
      }
    }
  });
  Eigen::MatrixXd A(t, t), B(t, t);
  for (std::size_t r = 0; r < t; ++r) {
    for (std::size_t s = 0; s < t; ++s) {
      A(r, s) = sums[r * t + s];
      B(r, s) = sums[t * t + r * t + s];
    }
  }
  // Restrict to the numerically independent part of the trial span.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> mass(B);
  const double top = mass.eigenvalues().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < mass.eigenvalues().size(); ++i) {
    if (mass.eigenvalues()(i) > 1e-10 * top) keep.push_back(i);
  }
  Eigen::MatrixXd T(t, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    T.col(c) = mass.eigenvectors().col(keep[c]) / std::sqrt(mass.eigenvalues()(keep[c]));
  }
  const Eigen::MatrixXd reduced = T.transpose() * A * T;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> stiff(0.5 * (reduced + reduced.transpose()));
  return stiff.eigenvalues().minCoeff();
}

RadialOracle flat_radial_oracle(int n, int order) {
  if (n < 3) throw InvalidArgument("radial oracle needs n >= 3");
  // r = tan(theta) maps [0, pi/2) onto [0, inf) and 1/(1+r^2) = cos^2(theta).
  const auto g = gauss_legendre(order, 0.0, 0.5 * std::numbers::pi);
  const double m = 0.5 * (n - 2.0);
  const double p = critical_exponent(n);
  CompensatedSum dir;
  CompensatedSum crit;
  for (std::size_t a = 0; a < g.nodes.size(); ++a) {
    const double th = g.nodes[a];
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double r = s / c;
    const double u = std::pow(std::sqrt(n * (n - 2.0)) * c * c, m);
    const double du = -(n - 2.0) * s * c * u;
    const double jac = std::pow(r, n - 1) / (c * c);
    dir.add(g.weights[a] * du * du * jac);
    crit.add(g.weights[a] * std::pow(u, p) * jac);
  }
  const double omega = unit_sphere_volume(n - 1);
  RadialOracle o{omega * dir.value(), omega * crit.value(), 0.0};
  o.energy = 0.5 * o.dirichlet - o.critical / p;
  return o;
}

double bubble_energy_constant(int n) {
  if (n < 3) throw InvalidArgument("E_1 needs n >= 3");
  return std::pow(n * (n - 2.0) / 4.0, 0.5 * n) * unit_sphere_volume(n) / n;
}

}  // namespace blowup
