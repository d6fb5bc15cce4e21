#include <cmath>
#include <random>

#include "../support.hpp"
#include "blowup/diagnostics.hpp"
#include "blowup/errors.hpp"
#include "blowup/reduced.hpp"
#include "doctest.h"

using namespace blowup;

namespace {

BubbleParams make_bubble(const Point& c, double delta) {
  BubbleParams b;
  b.center = c;
  b.delta = delta;
  return b;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return out;
}

}  // namespace

TEST_CASE("order fit on synthetic power laws") {
  const auto x = log_grid(1e-3, 1e-1, 6);
  std::vector<double> y;
  std::vector<double> yl;
  for (double v : x) {
    y.push_back(3.0 * v * v);
    yl.push_back(v * v * std::log(1.0 / v));
  }
  const auto f = order_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.max_residual < 1e-12);
  const auto fl = order_fit(x, yl, 1.0);
  CHECK(std::fabs(fl.slope - 2.0) < 1e-6);
  CHECK(fl.log_power == 1.0);
  // Without the log division the slope is visibly off.
  CHECK(std::fabs(order_fit(x, yl).slope - 2.0) > 0.05);

  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> noisy;
    for (double v : x) noisy.push_back(std::pow(v, 1.5) * std::exp(0.1 * u(rng)));
    const double c = std::exp(5.0 * u(rng));
    std::vector<double> scaled;
    for (double v : noisy) scaled.push_back(c * v);
    const auto a = order_fit(x, noisy);
    const auto b = order_fit(x, scaled);
    CHECK(b.slope == doctest::Approx(a.slope).epsilon(1e-10));
    CHECK(b.intercept == doctest::Approx(a.intercept + std::log(c)).scale(1.0).epsilon(1e-10));
  }
}

TEST_CASE("order fit guards") {
  CHECK_THROWS_AS(order_fit({1e-3, 1e-1}, {1.0, 2.0}), ContractError);
  CHECK_THROWS_AS(order_fit({1e-3, 2e-3, 3e-3, 5e-3}, {1.0, 2.0, 3.0, 4.0}), ContractError);
  CHECK_THROWS_AS(order_fit({1e-3, 1e-2, 1e-1, 1.0}, {1.0, -2.0, 3.0, 4.0}), DomainError);
  CHECK_THROWS_AS(order_fit({1e-3, 1e-2, 1e-1, 2.0}, {1.0, 2.0, 3.0, 4.0}, 1.0), DomainError);
  CHECK_NOTHROW(order_fit({1e-3, 1e-2, 1e-1, 2.0}, {1.0, 2.0, 3.0, 4.0}));
}

TEST_CASE("rescaled flat bubble is the standard bubble") {
  const auto m = ManifoldModel::flat_ball(6, 10.0);
  const auto o = base_point(m);
  const std::vector<double> radii{0.0, 0.3, 1.0, 2.5, 10.0};
  std::vector<std::vector<ProfileSample>> runs;
  for (double delta : {1e-1, 1e-2, 1e-3}) {
    const auto b = make_bubble(o, delta);
    const auto s = rescale_peak(m, [&](const Point& x) { return bubble_eval(m, b, CutoffSpec::none(), x); }, o, delta,
                                radii);
    CHECK(s.size() == radii.size() * 12);
    CHECK(profile_sup_deviation(s, 6) < 1e-14);
    runs.push_back(s);
  }
  for (std::size_t i = 0; i < runs[0].size(); ++i) {
    CHECK(std::fabs(runs[1][i].value - runs[0][i].value) <= 1e-12 * runs[0][i].value);
    CHECK(std::fabs(runs[2][i].value - runs[0][i].value) <= 1e-12 * runs[0][i].value);
  }
  CHECK(standard_bubble(6, 0.0) == doctest::Approx(24.0));
  CHECK(scale_from_height(6, 24.0 / 4.0) == doctest::Approx(2.0));

  // A mis-scaled rescaling lands on another member of the family.
  const auto b = make_bubble(o, 1e-2);
  const auto s = rescale_peak(m, [&](const Point& x) { return bubble_eval(m, b, CutoffSpec::none(), x); }, o, 2e-2,
                              radii);
  for (const auto& p : s) CHECK(p.value == doctest::Approx(bubble_profile(6, 0.5, p.radius).value).epsilon(1e-13));
  CHECK(profile_sup_deviation(s, 6) > 0.5);
  CHECK_THROWS_AS(rescale_peak(m, [](const Point&) { return 1.0; }, o, 2.0, radii), DomainError);
}

TEST_CASE("rescaled product bubble is close to the standard bubble") {
  const auto m = ManifoldModel::product_spheres(3, 3);
  const auto c = base_point(m);
  const auto b = make_bubble(c, 1e-3);
  const auto cut = CutoffSpec::standard(m);
  std::vector<double> radii;
  for (int i = 0; i <= 20; ++i) radii.push_back(0.5 * i);
  const auto s = rescale_peak(m, [&](const Point& x) { return bubble_eval(m, b, cut, x); }, c, 1e-3, radii);
  CHECK(profile_sup_deviation(s, 6) < 0.01);
}

TEST_CASE("peak extraction on synthetic bubbles") {
  const auto m = ManifoldModel::flat_ball(6, 1.0);
  const auto o = base_point(m);
  SUBCASE("single bubble") {
    const double delta = 1e-2;
    const auto b = make_bubble(Point{{0.3 * delta, -0.2 * delta, 0.1 * delta, 0, 0, 0}}, delta);
    const auto u = [&](const Point& x) { return bubble_eval(m, b, CutoffSpec::none(), x); };
    const auto r = extract_peaks(m, u, 1, {o, 2 * delta, 4});
    REQUIRE(r.success);
    REQUIRE(r.peaks.size() == 1);
    CHECK(distance(m, r.peaks[0].center, b.center) < 1e-3 * delta);
    CHECK(r.peaks[0].mu == doctest::Approx(delta).epsilon(1e-6));
    CHECK(r.residual_after_subtraction < 1e-6);
    const double h = std::pow(24.0, 1.0) * std::pow(r.peaks[0].mu, -2.0);
    CHECK(r.peaks[0].height == doctest::Approx(h).epsilon(0.01));
  }
  SUBCASE("two bubbles ten scales apart") {
    const double delta = 1e-2;
    Configuration cfg{{make_bubble(Point{{-5 * delta, 0.4 * delta, 0, 0, 0, 0}}, delta),
                       make_bubble(Point{{5 * delta, 0, -0.3 * delta, 0, 0, 0}}, 1.2 * delta)}};
    const auto u = [&](const Point& x) { return multi_bubble_eval(m, cfg, CutoffSpec::none(), x); };
    const auto r = extract_peaks(m, u, 2, {o, delta, 8});
    REQUIRE(r.success);
    REQUIRE(r.peaks.size() == 2);
    // Lexicographic order puts the left bubble first.
    for (int i = 0; i < 2; ++i) {
      const auto& b = cfg.bubbles[i];
      CHECK(distance(m, r.peaks[i].center, b.center) < 0.1 * b.delta);
      CHECK(r.peaks[i].mu == doctest::Approx(b.delta).epsilon(0.01));
    }
  }
  SUBCASE("constant field") {
    const auto r = extract_peaks(m, [](const Point&) { return 2.0; }, 1, {o, 0.1, 2});
    CHECK_FALSE(r.success);
    CHECK(r.peaks.empty());
    CHECK_FALSE(r.message.empty());
  }
}

TEST_CASE("isolation ratios") {
  const auto m = ManifoldModel::flat_ball(7, 1.0);
  const auto xi0 = base_point(m);
  BumpRequest req;
  req.k = 2;
  req.n = 7;
  const auto H = build_H(req);
  double gap = 0.0;
  for (int c = 0; c < 7; ++c) gap += std::pow(H.maxima[0][c] - H.maxima[1][c], 2);
  gap = std::sqrt(gap);
  double prev = 0.0;
  for (int j = 4; j <= 10; ++j) {
    const double eps = std::pow(10.0, -j);
    const auto s = mu_eps({7, eps, 1});
    const std::vector<double> t{1.0, 1.0};
    const auto cfg = reduced_configuration(m, xi0, t, H.maxima, s.delta, s.mu);
    const auto r = isolation_ratios(m, cfg, xi0, s.mu, eps);
    REQUIRE(r.pairs.size() == 1);
    // Flat normal coordinates: the separation is mu |p1 - p2| exactly.
    CHECK(r.min_sep_over_delta == doctest::Approx(gap * std::pow(eps, s.theta - 0.5)).epsilon(1e-12));
    CHECK(r.min_sep_over_delta > prev);
    CHECK(r.max_dist_to_xi0 <= 2 * s.mu);
    prev = r.min_sep_over_delta;
  }
  const Configuration one{{make_bubble(xi0, 1e-3)}};
  const auto r1 = isolation_ratios(m, one, xi0, 0.1, 1e-6);
  CHECK(r1.pairs.empty());
  REQUIRE(r1.dist_to_xi0.size() == 1);
  CHECK(r1.dist_to_xi0[0] == 0.0);
  const auto j = to_json(r1);
  CHECK(j.contains("dist_to_xi0"));
}

TEST_CASE("weighted bound is scale free") {
  const auto m = ManifoldModel::flat_ball(6, 1.0);
  const auto o = base_point(m);
  std::vector<double> values;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto b = make_bubble(o, delta);
    std::vector<double> radii;
    for (int i = 1; i <= 400; ++i) radii.push_back(delta * std::pow(10.0, -2.0 + 4.0 * i / 400));
    const auto w = weighted_bound(m, [&](const Point& x) { return bubble_eval(m, b, CutoffSpec::none(), x); }, o,
                                  radii);
    // d^2 * 24 delta^2 / (delta^2 + d^2)^2 peaks at d = delta with value 6.
    CHECK(w.distance == doctest::Approx(delta).epsilon(0.05));
    values.push_back(w.value);
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  CHECK((*hi - *lo) / *lo < 0.05);
  CHECK(*hi == doctest::Approx(6.0).epsilon(1e-3));
}
