#include <cmath>
#include <numbers>
#include <random>

#include "../support.hpp"
#include "blowup/errors.hpp"
#include "blowup/reduced.hpp"
#include "doctest.h"

using namespace blowup;

namespace {

// Root of d^2 ln(1/d) = eps on (0, e^{-1/2}) by long double bisection.
long double delta6_oracle(long double eps) {
  long double lo = 0.0L;
  long double hi = std::exp(-0.5L);
  for (int it = 0; it < 200; ++it) {
    const long double mid = 0.5L * (lo + hi);
    (mid * mid * std::log(1.0L / mid) < eps ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

BumpFunction single_bump(int n, double amplitude) {
  BumpRequest r;
  r.k = 1;
  r.n = n;
  r.amplitudes = {amplitude};
  return build_H(r);
}

}  // namespace

TEST_CASE("expansion constants") {
  CHECK(c1_constant(7) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(c1_constant(6) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(dn_constant(7) == doctest::Approx(1.0 / 72.0).epsilon(1e-15));
  CHECK(dn_constant(6) == 1.0 / 64.0);
  CHECK(dn_constant(10) == doctest::Approx(1.0 / (24.0 * 6 * 4)).epsilon(1e-15));
}

TEST_CASE("expansion prediction") {
  for (int n : {6, 7, 9}) {
    const double e1 = bubble_energy_constant(n);
    CHECK(expansion_predict(n, 0.0, 0.3, 0.0) == e1);
    for (double delta : {1e-3, 0.1, 0.7}) {
      for (double v : {-2.0, 0.5, 3.0}) {
        CHECK((expansion_predict(n, 0.0, delta, v) - e1) / (e1 * v * delta * delta) ==
              doctest::Approx(c1_constant(n)).epsilon(1e-16 / (delta * delta) + 1e-12));
      }
    }
    CHECK_THROWS_AS(expansion_predict(n, 1.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(expansion_predict(n, 1.0, 0.0, 0.0), DomainError);
  }
  const double e1 = bubble_energy_constant(6);
  const double d = std::exp(-1.0);
  CHECK((e1 - expansion_predict(6, 2.0, d, 0.0)) / e1 == doctest::Approx(2.0 * std::exp(-4.0) / 64.0).epsilon(1e-13));
}

TEST_CASE("F_n values") {
  const ReducedEnergyParams p7{7, 1.0, single_bump(7, 2.0)};
  const std::vector<double> origin(7, 0.0);
  CHECK(p7.H(origin) == 1.0);
  // 4/5 - 1/72 = 283/360.
  CHECK(F_n_eval(p7, 1.0, origin) == doctest::Approx(283.0 / 360.0).epsilon(1e-15));
  CHECK(std::fabs(F_n_eval(p7, 1e-9, origin)) < 1e-17);
  std::vector<double> far(7, 0.0);
  far[0] = 1.5;
  for (double t : {1e-3, 0.5, 2.0, 19.0}) CHECK(F_n_eval(p7, t, far) < 0.0);
}

TEST_CASE("F_n critical point") {
  const ReducedEnergyParams p7{7, 1.0, single_bump(7, 2.0)};
  const auto c = F_n_critical(p7, 0);
  CHECK(c.t_star == doctest::Approx(std::sqrt(28.8)).epsilon(1e-14));
  CHECK(c.value == doctest::Approx(0.64 * 72.0 / 4.0).epsilon(1e-14));
  CHECK(c.d2t < 0.0);
  CHECK(c.p_star == p7.H.maxima[0]);
  CHECK(F_n_eval(p7, c.t_star, c.p_star) == doctest::Approx(c.value).epsilon(1e-14));

  const ReducedEnergyParams doubled{7, 1.0, single_bump(7, 3.0)};
  const auto d = F_n_critical(doubled, 0);
  CHECK(d.value == doctest::Approx(4.0 * c.value).epsilon(1e-14));
  CHECK(d.t_star == doctest::Approx(std::sqrt(2.0) * c.t_star).epsilon(1e-14));

  CHECK_THROWS_AS(F_n_critical(ReducedEnergyParams{7, 0.0, single_bump(7, 2.0)}, 0), DegenerateError);
  auto flat = single_bump(7, 2.0);
  flat.amplitudes = {1.0};
  CHECK_THROWS_AS(F_n_critical(ReducedEnergyParams{7, 1.0, flat}, 0), DegenerateError);
}

TEST_CASE("F_n critical point is the maximum over a (t, p) grid") {
  // Independent 2-D scan: t on a fine grid in (0, 20], p along rays through
  // the bump maximum at radius up to 2 r_tilde.
  BumpRequest r;
  r.k = 3;
  r.n = 6;
  const ReducedEnergyParams p6{6, 72.0 / 5.0, build_H(r)};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto c = F_n_critical(p6, i);
    double best = -1e300;
    double best_t = 0.0;
    std::vector<double> best_p;
    const double h = p6.H.r_tilde / 10.0;
    for (int a = 0; a <= 20; ++a) {
      for (int dir = 0; dir < 12; ++dir) {
        auto p = p6.H.maxima[i];
        p[dir / 2] += (dir % 2 ? -1.0 : 1.0) * a * h;
        for (int j = 1; j <= 20000; ++j) {
          const double t = 20.0 * j / 20000;
          const double v = F_n_eval(p6, t, p);
          if (v > best) {
            best = v;
            best_t = t;
            best_p = p;
          }
        }
      }
    }
    CHECK(best_p == p6.H.maxima[i]);
    CHECK(std::fabs(best_t - c.t_star) <= 1e-3);
    CHECK(best <= c.value);
    CHECK(best == doctest::Approx(c.value).epsilon(1e-6));
  }
}

TEST_CASE("delta_eps schedules") {
  CHECK(delta_eps(7, 1e-4) == doctest::Approx(1e-2).epsilon(1e-15));
  CHECK(delta_eps(6, 1e-3) == doctest::Approx(1.547e-2).epsilon(1e-3));
  CHECK(delta_eps(6, 1e-3) == doctest::Approx(static_cast<double>(delta6_oracle(1e-3L))).epsilon(1e-14));
  CHECK_THROWS_AS(delta_eps(6, 1.0), DomainError);
  CHECK_THROWS_AS(delta_eps(6, 0.5 / std::numbers::e), DomainError);
  CHECK_THROWS_AS(delta_eps(6, 0.0), DomainError);
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-30.0, std::log10(0.18));
  for (int trial = 0; trial < 100; ++trial) {
    const double eps = std::pow(10.0, u(rng));
    const double d = delta_eps(6, eps);
    CHECK(d < std::exp(-0.5));
    CHECK(std::fabs(d * d * std::log(1.0 / d) - eps) <= 1e-14 * eps);
  }
}

TEST_CASE("mu_eps schedules and margins") {
  const auto s7 = mu_eps({7, 1e-10, 1});
  CHECK(s7.theta == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(s7.mu == doctest::Approx(std::pow(10.0, -0.5)).epsilon(1e-14));
  for (double m : s7.margins) CHECK(m < 1.0);
  const auto s6 = mu_eps({6, std::exp(-16.0), 1});
  CHECK(s6.mu == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  // r = 20 makes the C^r constraint binding: theta = 1/40.
  CHECK(mu_eps({9, 1e-6, 20}).theta == doctest::Approx(1.0 / 40.0).epsilon(1e-15));
  CHECK_THROWS_AS(mu_eps({7, 1.0, 1}), DomainError);
  CHECK_THROWS_AS(mu_eps({6, 2.0, 1}), DomainError);
  for (int n : {6, 7, 8, 12}) {
    for (int r : {0, 1, 3}) {
      Schedule prev = mu_eps({n, 1e-4, r});
      for (int j = 5; j <= 12; ++j) {
        const auto s = mu_eps({n, std::pow(10.0, -j), r});
        for (int k = 0; k < 3; ++k) CHECK(s.margins[k] < prev.margins[k]);
        prev = s;
      }
    }
  }
}

TEST_CASE("bump builder examples") {
  const auto h1 = single_bump(6, 2.0);
  const std::vector<double> origin(6, 0.0);
  CHECK(h1(origin) == 1.0);
  CHECK(h1.sigma == doctest::Approx(1.0 / 3.0));
  std::vector<double> x(6, 0.0);
  x[3] = h1.sigma * 1.0000001;
  CHECK(h1(x) == -1.0);
  x[3] = h1.sigma * 0.9;
  CHECK(h1(x) > -1.0);

  BumpRequest r;
  r.k = 5;
  r.n = 6;
  const auto h5 = build_H(r);
  REQUIRE(h5.k() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(h5.amplitudes[i] == doctest::Approx(2.0 + (i + 1) / 5.0));
    CHECK(h5(h5.maxima[i]) == doctest::Approx(h5.peak_value(i)).epsilon(1e-15));
    for (std::size_t j = i + 1; j < 5; ++j) {
      double d2 = 0.0;
      for (int c = 0; c < 6; ++c) d2 += std::pow(h5.maxima[i][c] - h5.maxima[j][c], 2);
      CHECK(std::sqrt(d2) >= 3.0 * h5.r_tilde * (1 - 1e-12));
    }
  }
  CHECK(h5.sigma <= h5.r_tilde);
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    auto y = testing_support::random_coords(rng, 6, 10.0);
    double norm = 0.0;
    for (double v : y) norm += v * v;
    if (std::sqrt(norm) > 2.0) CHECK(h5(y) == -1.0);
  }
  r.seed = 7;
  const auto rotated = build_H(r);
  CHECK(rotated.maxima != h5.maxima);
  CHECK(build_H(r).maxima == rotated.maxima);

  BumpRequest crowded;
  crowded.k = 2000;
  crowded.min_r_tilde = 1e-3;
  CHECK_THROWS_AS(build_H(crowded), CapacityError);
}

TEST_CASE("h_eps field values") {
  const auto m = ManifoldModel::product_spheres(3, 3);
  const auto xi0 = base_point(m);
  const auto H = single_bump(6, 3.0);
  const double eps = 1e-4;
  const double mu = 0.5;
  const auto h = h_eps_field(m, xi0, eps, mu, H);
  const double cnr = 12.0 / 5.0;
  CHECK(h.field(xi0) == doctest::Approx(cnr + 2.0 * eps).epsilon(1e-15));
  std::vector<double> c(6, 0.0);
  c[4] = 2.1 * mu;
  CHECK(h.field(exp_in_frame(m, xi0, tangent_frame(m, xi0), c)) == doctest::Approx(cnr - eps).epsilon(1e-15));
  CHECK(h.sup_perturbation == doctest::Approx(2.0 * eps));
  CHECK(h.cr_proxy == doctest::Approx(eps / mu));
  CHECK(h.bump_radius == doctest::Approx(mu * H.sigma));
  CHECK(h.warnings.empty());
  CHECK_FALSE(h_eps_field(m, xi0, eps, 1e-3, H, 1, 0.01).warnings.empty());

  // The sup norm is linear in eps.
  std::vector<double> e;
  std::vector<double> s;
  for (int j = 2; j <= 9; ++j) {
    e.push_back(std::pow(10.0, -j));
    s.push_back(h_eps_field(m, xi0, e.back(), mu, H).sup_perturbation);
  }
  for (std::size_t i = 1; i < e.size(); ++i)
    CHECK(std::log(s[i] / s[i - 1]) / std::log(e[i] / e[i - 1]) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("h_eps maximum sits at the largest bump") {
  const auto m = ManifoldModel::round_sphere(6);
  const auto xi0 = base_point(m);
  BumpRequest r;
  r.k = 3;
  r.n = 6;
  const auto H = build_H(r);
  const double mu = 0.3;
  const auto h = h_eps_field(m, xi0, 1e-3, mu, H);
  const auto frame = tangent_frame(m, xi0);
  // Largest amplitude is the last one; scan the plane of the maxima.
  const auto& p = H.maxima.back();
  const double step = H.sigma / 20.0;
  double best = -1e300;
  std::vector<double> arg;
  for (int a = -40; a <= 40; ++a) {
    for (int b = -40; b <= 40; ++b) {
      std::vector<double> y{p[0] + a * step, p[1] + b * step, 0, 0, 0, 0};
      std::vector<double> v = y;
      for (auto& z : v) z *= mu;
      const double val = h.field(exp_in_frame(m, xi0, frame, v));
      if (val > best) {
        best = val;
        arg = y;
      }
    }
  }
  CHECK(std::hypot(arg[0] - p[0], arg[1] - p[1]) <= step);
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> v = H.maxima[i];
    for (auto& z : v) z *= mu;
    const auto x = exp_in_frame(m, xi0, frame, v);
    CHECK(distance(m, x, h.bump_centers[i]) < 1e-14);
  }
}

TEST_CASE("reduced configurations follow the schedule") {
  const auto m = ManifoldModel::product_spheres(3, 3);
  const auto xi0 = base_point(m);
  BumpRequest r;
  r.k = 2;
  r.n = 6;
  const auto H = build_H(r);
  const auto s = mu_eps({6, 1e-8, 1});
  const std::vector<double> t{1.0, 1.3};
  const auto cfg = reduced_configuration(m, xi0, t, H.maxima, s.delta, s.mu);
  REQUIRE(cfg.bubbles.size() == 2);
  CHECK(cfg.bubbles[1].delta == doctest::Approx(1.3 * s.delta));
  CHECK(distance(m, xi0, cfg.bubbles[0].center) == doctest::Approx(0.5 * s.mu).epsilon(1e-12));
  CHECK(is_admissible(m, cfg).admissible);
}

TEST_CASE("reduced limit ratio tracks F_n") {
  const auto m = ManifoldModel::product_spheres(3, 3);
  const auto xi0 = base_point(m);
  const double weyl = weyl_norm_sq(m, xi0);
  const auto cut = CutoffSpec::with_radius(0.9 * std::numbers::pi);
  ReducedLimitOptions opts;
  opts.quadrature.cutoff_panels = 8;
  const double eps = 1e-9;
  const auto s = mu_eps({6, eps, 1});

  const auto H1 = single_bump(6, 3.0);
  const ReducedEnergyParams fp{6, weyl, H1};
  const auto h1 = h_eps_field(m, xi0, eps, s.mu, H1);
  const std::vector<std::vector<double>> origin{std::vector<double>(6, 0.0)};
  const std::vector<double> one{1.0};
  const auto cfg1 = reduced_configuration(m, xi0, one, origin, s.delta, s.mu);
  const double single = reduced_limit_ratio(m, h1, cfg1, cut, eps, s.delta, opts).ratio;
  CHECK(single == doctest::Approx(F_n_eval(fp, 1.0, origin[0])).epsilon(0.1));

  // Doubling t: the gap to F_n(2, 0) is larger at fixed eps but closes as eps shrinks.
  const std::vector<double> two{2.0};
  std::vector<double> gaps;
  for (double e : {1e-6, 1e-8, 1e-10}) {
    const auto se = mu_eps({6, e, 1});
    const auto he = h_eps_field(m, xi0, e, se.mu, H1);
    const auto cfg = reduced_configuration(m, xi0, two, origin, se.delta, se.mu);
    const double ratio = reduced_limit_ratio(m, he, cfg, cut, e, se.delta, opts).ratio;
    gaps.push_back(std::fabs(ratio / F_n_eval(fp, 2.0, origin[0]) - 1.0));
  }
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);

  // Two bumps of the same height: without the pair interaction the ratio
  // doubles, since every bubble sees the same local geometry.
  BumpRequest r;
  r.k = 2;
  r.n = 6;
  r.amplitudes = {3.0, 3.0};
  const auto H2 = build_H(r);
  const auto h2 = h_eps_field(m, xi0, eps, s.mu, H2);
  const std::vector<double> t2{1.0, 1.0};
  const auto cfg2 = reduced_configuration(m, xi0, t2, H2.maxima, s.delta, s.mu);
  const auto res2 = reduced_limit_ratio(m, h2, cfg2, cut, eps, s.delta, opts);
  const double norm = bubble_energy_constant(6) * eps * s.delta * s.delta;
  CHECK(res2.interaction < 0.0);
  CHECK((res2.deviation - res2.interaction) / norm == doctest::Approx(2.0 * single).epsilon(1e-3));
  MESSAGE("k = 2 pair interaction / (E1 eps delta^2) = " << res2.interaction / norm);
}
