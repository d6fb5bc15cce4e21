#include "blowup/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "blowup/errors.hpp"

namespace blowup {

double c1_constant(int n) {
  if (n < 5) throw InvalidArgument("c1 needs n >= 5");
  return 2.0 * (n - 1.0) / ((n - 2.0) * (n - 4.0));
}

double dn_constant(int n) {
  if (n < 6) throw InvalidArgument("d_n needs n >= 6");
  if (n == 6) return 1.0 / 64.0;
  return 1.0 / (24.0 * (n - 4.0) * (n - 6.0));
}

double unit_bump(double y_squared) {
  if (y_squared >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - y_squared));
}

double BumpFunction::operator()(std::span<const double> x) const {
  double h = -1.0;
  const double inv = 1.0 / (sigma * sigma);
  for (std::size_t i = 0; i < maxima.size(); ++i) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = x[j] - (j < maxima[i].size() ? maxima[i][j] : 0.0);
      r2 += d * d;
    }
    h += amplitudes[i] * unit_bump(r2 * inv);
  }
  return h;
}

BumpFunction build_H(const BumpRequest& request) {
  if (request.k < 1) throw InvalidArgument("bump function needs k >= 1");
  if (request.n < 2) throw InvalidArgument("bump function needs dimension >= 2");
  const int k = request.k;
  BumpFunction H;
  H.n = request.n;
  double phase = 0.0;
  if (request.seed) {
    std::mt19937_64 rng(*request.seed);
    phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
  }
  if (k == 1) {
    H.maxima.assign(1, std::vector<double>(request.n, 0.0));
    H.r_tilde = 1.0 / 3.0;
  } else {
    for (int i = 0; i < k; ++i) {
      std::vector<double> p(request.n, 0.0);
      const double a = phase + 2.0 * std::numbers::pi * (i + 1) / k;
      p[0] = 0.5 * std::cos(a);
      p[1] = 0.5 * std::sin(a);
      H.maxima.push_back(std::move(p));
    }
    // Neighbouring points on the circle are the closest pairs.
    H.r_tilde = std::sin(std::numbers::pi / k) / 3.0;
  }
  if (H.r_tilde < request.min_r_tilde) {
    throw CapacityError("cannot place " + std::to_string(k) + " bumps with separation radius >= " +
                        std::to_string(request.min_r_tilde));
  }
  H.sigma = H.r_tilde;
  if (request.amplitudes.empty()) {
    for (int i = 1; i <= k; ++i) H.amplitudes.push_back(2.0 + static_cast<double>(i) / k);
  } else {
    if (static_cast<int>(request.amplitudes.size()) != k) {
      throw InvalidArgument("bump amplitudes must have k entries");
    }
    H.amplitudes = request.amplitudes;
    for (double a : H.amplitudes) {
      if (!(a > 1.0)) throw InvalidArgument("bump amplitudes must exceed 1");
    }
  }
  return H;
}

double expansion_predict(int n, double weyl_sq, double delta, double v) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("expansion needs 0 < delta < 1");
  const double d4 = std::pow(delta, 4);
  const double branch = n == 6 ? d4 * std::log(1.0 / delta) / 64.0 : d4 * dn_constant(n);
  return bubble_energy_constant(n) * (1.0 + c1_constant(n) * v * delta * delta - weyl_sq * branch);
}

double F_n_eval(const ReducedEnergyParams& params, double t, std::span<const double> p) {
  const double t2 = t * t;
  return params.c1() * params.H(p) * t2 - params.dn() * params.weyl_sq * t2 * t2;
}

FnCritical F_n_critical(const ReducedEnergyParams& params, std::size_t i) {
  if (i >= params.H.k()) throw InvalidArgument("bump maximum index out of range");
  if (!(params.weyl_sq > 0.0)) throw DegenerateError("F_n has no interior maximum when weyl_sq = 0");
  const double hp = params.H(params.H.maxima[i]);
  if (!(hp > 0.0)) throw DegenerateError("F_n has no interior maximum when H(p_i) <= 0");
  const double c1 = params.c1();
  const double dn = params.dn();
  FnCritical out;
  out.p_star = params.H.maxima[i];
  out.t_star = std::sqrt(c1 * hp / (2.0 * dn * params.weyl_sq));
  out.value = c1 * c1 * hp * hp / (4.0 * dn * params.weyl_sq);
  out.d2t = 2.0 * c1 * hp - 12.0 * dn * params.weyl_sq * out.t_star * out.t_star;
  return out;
}

double delta_eps(int n, double eps) {
  if (n < 6) throw InvalidArgument("delta_eps needs n >= 6");
  if (!(eps > 0.0)) throw DomainError("delta_eps needs eps > 0");
  if (n >= 7) return std::sqrt(eps);
  const double top = std::exp(-0.5);
  if (!(eps < 0.5 / std::exp(1.0))) {
    throw DomainError("delta^2 ln(1/delta) = eps has no root on the increasing branch for eps >= 1/(2e)");
  }
  auto g = [](double d) { return -d * d * std::log(d); };
  double lo = 0.0;
  double hi = top;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) < eps ? lo : hi) = mid;
  }
  return std::fabs(g(lo) - eps) <= std::fabs(g(hi) - eps) && lo > 0.0 ? lo : hi;
}

Schedule mu_eps(const ScheduleParams& sch) {
  if (!(sch.eps > 0.0 && sch.eps < 1.0)) throw DomainError("mu_eps needs 0 < eps < 1");
  if (sch.n < 6) throw InvalidArgument("mu_eps needs n >= 6");
  if (sch.r < 0) throw InvalidArgument("mu_eps needs r >= 0");
  Schedule s;
  s.delta = delta_eps(sch.n, sch.eps);
  const double L = std::fabs(std::log(sch.eps));
  double rate;
  if (sch.n == 6) {
    s.mu = std::pow(L, -0.125);
    rate = std::pow(L, -0.25);
  } else {
    const double a = (sch.n - 6.0) / (2.0 * (sch.n - 2.0));
    s.theta = 0.5 * std::min(a, 1.0 / std::max(sch.r, 1));
    s.mu = std::pow(sch.eps, s.theta);
    rate = std::pow(sch.eps, a);
  }
  s.margins[0] = rate / s.mu;
  s.margins[1] = sch.eps / std::pow(s.mu, sch.r);
  s.margins[2] = s.delta / s.mu;
  return s;
}

HEpsField h_eps_field(const ManifoldModel& m, const Point& xi0, double eps, double mu,
                      const BumpFunction& H, int r, double finest_scale) {
  if (!(mu > 0.0)) throw InvalidArgument("h_eps needs mu > 0");
  if (H.n != m.dimension()) throw InvalidArgument("bump dimension does not match the model");
  validate_point(m, xi0);
  const auto frame = tangent_frame(m, xi0);
  const double base = conformal_constant(m.dimension()) * scalar_curvature(m, xi0);
  HEpsField out{PotentialField{constant_field(m, base), std::nullopt}, 0.0, 0.0, {}, 0.0, {}};
  auto bump = [m, xi0, frame, eps, mu, H](const Point& x) {
    try {
      const auto v = log_map(m, xi0, x);
      auto y = frame_coordinates(frame, v.components);
      for (auto& c : y) c /= mu;
      return eps * H(y);
    } catch (const DomainError&) {
      return -eps;
    }
  };
  ScalarFieldOnM pert{m, bump, {}};
  for (const auto& p : H.maxima) {
    std::vector<double> y(p);
    for (auto& v : y) v *= mu;
    out.bump_centers.push_back(exp_in_frame(m, xi0, frame, y));
  }
  out.bump_radius = mu * H.sigma;
  out.field.perturbation = pert;
  double amax = 0.0;
  for (double a : H.amplitudes) amax = std::max(amax, a);
  out.sup_perturbation = std::fabs(eps) * std::max(1.0, amax - 1.0);
  out.cr_proxy = eps / std::pow(mu, r);
  if (finest_scale > 0.0 && mu * H.sigma < finest_scale) {
    out.warnings.push_back("bump support radius " + std::to_string(mu * H.sigma) +
                           " is below the quadrature finest scale " + std::to_string(finest_scale));
  }
  return out;
}

Configuration reduced_configuration(const ManifoldModel& m, const Point& xi0, std::span<const double> t,
                                    const std::vector<std::vector<double>>& p, double delta_eps_value,
                                    double mu) {
  if (t.empty() || t.size() != p.size()) throw InvalidArgument("need one t and one p per bubble");
  const auto frame = tangent_frame(m, xi0);
  Configuration cfg;
  double tmin = t[0];
  double tmax = t[0];
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0)) throw InvalidArgument("scale multipliers t_i must be positive");
    std::vector<double> y(p[i]);
    for (auto& v : y) v *= mu;
    cfg.bubbles.push_back({t[i] * delta_eps_value, exp_in_frame(m, xi0, frame, y), {}});
    tmin = std::min(tmin, t[i]);
    tmax = std::max(tmax, t[i]);
  }
  cfg.alpha = 2.0 * tmax / tmin;
  cfg.delta_bar = 2.0 * tmax * delta_eps_value;
  double sep = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < cfg.bubbles.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.bubbles.size(); ++j) {
      const auto& a = cfg.bubbles[i];
      const auto& b = cfg.bubbles[j];
      const double d = distance(m, a.center, b.center);
      const double s = d * d / (a.delta * b.delta);
      sep = first ? s : std::min(sep, s);
      first = false;
    }
  }
  cfg.K = first ? 1.0 : 0.5 * sep;
  return cfg;
}

ReducedLimitResult reduced_limit_ratio(const ManifoldModel& m, const HEpsField& h, const Configuration& cfg,
                                       const CutoffSpec& c, double eps, double delta_eps_value,
                                       const ReducedLimitOptions& options) {
  if (cfg.bubbles.empty()) throw InvalidArgument("configuration has no bubbles");
  const int n = m.dimension();
  const double E1 = bubble_energy_constant(n);
  ReducedLimitResult out;
  double total = 0.0;
  for (const auto& b : cfg.bubbles) {
    QuadratureOptions o = options.quadrature;
    o.cutoff_radius = c.r0();
    // Radial breakpoints where the bump edges cross.
    for (const auto& bc : h.bump_centers) {
      const double d = distance(m, b.center, bc);
      for (double r : {d - h.bump_radius, d + h.bump_radius}) {
        if (r > 0.0) o.extra_radii.push_back(r);
      }
    }
    auto q = build_quadrature(m, b.center, b.delta, o, options.budget);
    total += single_bubble_energy_deviation(m, h.field, b, c, q);
  }
  if (cfg.bubbles.size() > 1) {
    std::vector<Point> centers;
    std::vector<double> scales;
    for (const auto& b : cfg.bubbles) {
      centers.push_back(b.center);
      scales.push_back(b.delta);
    }
    QuadratureOptions o = options.quadrature;
    o.cutoff_radius = c.r0();
    auto q = build_multi_center_quadrature(m, centers, scales, o, options.budget);
    out.interaction = energy_split(m, h.field, cfg, c, q).deviation;
    total += out.interaction;
  }
  out.deviation = total;
  out.ratio = total / (E1 * eps * delta_eps_value * delta_eps_value);
  return out;
}

}  // namespace blowup
