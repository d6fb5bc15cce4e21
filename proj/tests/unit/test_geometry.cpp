#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "../support.hpp"
#include "blowup/errors.hpp"
#include "blowup/geometry.hpp"
#include "doctest.h"

using namespace blowup;
using testing_support::all_models;
using testing_support::random_coords;
using testing_support::random_point;

namespace {

constexpr double kPi = std::numbers::pi;

// Riemann tensor of S^p x S^q (unit factors) in an orthonormal frame adapted to
// the factors, then Ricci, scalar and Weyl parts by explicit contraction.
struct TensorOracle {
  double scalar = 0.0;
  double weyl_sq = 0.0;
};

TensorOracle tensor_oracle(int p, int q) {
  const int n = p + q;
  auto factor = [&](int a) { return a < p ? 0 : 1; };
  auto g = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  auto R = [&](int a, int b, int c, int d) {
    if (factor(a) != factor(b) || factor(a) != factor(c) || factor(a) != factor(d)) return 0.0;
    return g(a, c) * g(b, d) - g(a, d) * g(b, c);
  };
  std::vector<double> ric(n * n, 0.0);
  for (int b = 0; b < n; ++b) {
    for (int d = 0; d < n; ++d) {
      for (int a = 0; a < n; ++a) ric[b * n + d] += R(a, b, a, d);
    }
  }
  TensorOracle out;
  for (int a = 0; a < n; ++a) out.scalar += ric[a * n + a];
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
          const double w = R(a, b, c, d) -
                           (ric[a * n + c] * g(b, d) - ric[a * n + d] * g(b, c) + ric[b * n + d] * g(a, c) -
                            ric[b * n + c] * g(a, d)) /
                               (n - 2.0) +
                           out.scalar / ((n - 1.0) * (n - 2.0)) * (g(a, c) * g(b, d) - g(a, d) * g(b, c));
          out.weyl_sq += w * w;
        }
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("distance examples") {
  const auto ball = ManifoldModel::flat_ball(6, 1.0);
  CHECK(distance(ball, base_point(ball), base_point(ball)) == 0.0);

  const auto s3 = ManifoldModel::round_sphere(3);
  CHECK(distance(s3, Point{{1, 0, 0, 0}}, Point{{-1, 0, 0, 0}}) == doctest::Approx(kPi).epsilon(1e-15));

  // Chord sums along the explicit great circle (cos t, sin t) in the first factor.
  const auto prod = ManifoldModel::product_spheres(3, 3);
  const Point a{{1, 0, 0, 0, 1, 0, 0, 0}};
  const Point b{{0, 1, 0, 0, 1, 0, 0, 0}};
  double length = 0.0;
  const int steps = 20000;
  for (int i = 0; i < steps; ++i) {
    const double t0 = 0.5 * kPi * i / steps;
    const double t1 = 0.5 * kPi * (i + 1) / steps;
    length += std::hypot(std::cos(t1) - std::cos(t0), std::sin(t1) - std::sin(t0));
  }
  CHECK(distance(prod, a, b) == doctest::Approx(length).epsilon(1e-8));
  CHECK(distance(prod, a, b) == doctest::Approx(kPi / 2).epsilon(1e-15));
}

TEST_CASE("mismatched models are rejected") {
  const auto prod = ManifoldModel::product_spheres(3, 3);
  const auto s6 = ManifoldModel::round_sphere(6);
  CHECK_THROWS_AS(distance(prod, base_point(s6), base_point(prod)), InvalidArgument);
  CHECK_THROWS_AS(ManifoldModel::product_spheres(2, 3), InvalidArgument);
  CHECK_THROWS_AS(ManifoldModel::flat_ball(6, -1.0), InvalidArgument);
}

TEST_CASE("distance is a metric on random triples") {
  std::mt19937_64 rng(11);
  for (const auto& m : all_models()) {
    for (int i = 0; i < 1000; ++i) {
      const auto a = random_point(rng, m);
      const auto b = random_point(rng, m);
      const auto c = random_point(rng, m);
      const double ab = distance(m, a, b);
      CHECK(ab == doctest::Approx(distance(m, b, a)).epsilon(1e-14));
      CHECK(distance(m, a, a) <= 1e-12);
      CHECK(distance(m, a, c) <= ab + distance(m, b, c) + 1e-12);
    }
  }
}

TEST_CASE("exp examples") {
  const auto s3 = ManifoldModel::round_sphere(3);
  const Point e1{{1, 0, 0, 0}};
  const std::vector<double> zero(4, 0.0);
  CHECK(distance(s3, exp_map(s3, e1, zero), e1) == 0.0);
  const std::vector<double> v{0, kPi / 2, 0, 0};
  const auto x = exp_map(s3, e1, v);
  CHECK(x.coords[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(x.coords[0]) < 1e-15);
}

TEST_CASE("exp and log round trip inside half the injectivity radius") {
  std::mt19937_64 rng(12);
  for (const auto& m : all_models()) {
    for (int i = 0; i < 100; ++i) {
      const auto x = random_point(rng, m, 0.3);
      const auto frame = tangent_frame(m, x);
      const double reach = m.compact() ? 0.5 * m.injectivity_radius() : 0.3 * m.radius();
      const auto c = random_coords(rng, m.dimension(), reach);
      const auto y = exp_in_frame(m, x, frame, c);
      const auto v = log_map(m, x, y);
      const auto back = exp_map(m, x, v);
      CHECK(distance(m, back, y) < 1e-10);
      double cn = 0.0;
      for (double t : c) cn += t * t;
      CHECK(v.norm() == doctest::Approx(std::sqrt(cn)).epsilon(1e-10));
      CHECK(distance(m, x, y) == doctest::Approx(std::sqrt(cn)).epsilon(1e-10));
    }
  }
}

TEST_CASE("product log round trip for 100 random vectors below 1") {
  std::mt19937_64 rng(13);
  const auto m = ManifoldModel::product_spheres(3, 3);
  const auto base = base_point(m);
  const auto frame = tangent_frame(m, base);
  for (int i = 0; i < 100; ++i) {
    const auto c = random_coords(rng, 6, 1.0);
    const auto v = log_map(m, base, exp_in_frame(m, base, frame, c));
    const auto back = frame_coordinates(frame, v.components);
    for (int j = 0; j < 6; ++j) CHECK(std::fabs(back[j] - c[j]) < 1e-10);
  }
}

TEST_CASE("log map beyond the injectivity radius is a domain error") {
  const auto s3 = ManifoldModel::round_sphere(3);
  CHECK_THROWS_AS(log_map(s3, Point{{1, 0, 0, 0}}, Point{{-1, 0, 0, 0}}), DomainError);
  const auto prod = ManifoldModel::product_spheres(3, 3);
  CHECK_THROWS_AS(log_map(prod, Point{{1, 0, 0, 0, 1, 0, 0, 0}}, Point{{-1, 0, 0, 0, 1, 0, 0, 0}}), DomainError);
}

TEST_CASE("curvature matches the tensor oracle") {
  const auto o33 = tensor_oracle(3, 3);
  CHECK(o33.scalar == 12.0);
  CHECK(o33.weyl_sq == doctest::Approx(kWeylNormSqS3xS3).epsilon(1e-14));
  const auto prod = ManifoldModel::product_spheres(3, 3);
  CHECK(scalar_curvature(prod, base_point(prod)) == 12.0);
  CHECK(weyl_norm_sq(prod, base_point(prod)) == doctest::Approx(o33.weyl_sq).epsilon(1e-14));
  for (auto [p, q] : {std::array{3, 4}, std::array{4, 4}, std::array{3, 6}}) {
    const auto o = tensor_oracle(p, q);
    const auto m = ManifoldModel::product_spheres(p, q);
    CHECK(scalar_curvature(m, base_point(m)) == doctest::Approx(o.scalar));
    CHECK(weyl_norm_sq(m, base_point(m)) == doctest::Approx(o.weyl_sq).epsilon(1e-12));
  }
  // A single round factor is the p + q = n, q = 0 case of the same oracle.
  for (int n : {6, 7}) {
    const auto s = ManifoldModel::round_sphere(n);
    CHECK(scalar_curvature(s, base_point(s)) == doctest::Approx(tensor_oracle(n, 0).scalar));
    CHECK(weyl_norm_sq(s, base_point(s)) == 0.0);
    CHECK(std::fabs(tensor_oracle(n, 0).weyl_sq) < 1e-20);
  }
  const auto ball = ManifoldModel::flat_ball(6, 1.0);
  CHECK(scalar_curvature(ball, base_point(ball)) == 0.0);
  CHECK(weyl_norm_sq(ball, base_point(ball)) == 0.0);
}

TEST_CASE("curvature invariants do not depend on the point") {
  std::mt19937_64 rng(14);
  for (const auto& m : all_models()) {
    const double s0 = scalar_curvature(m, base_point(m));
    const double w0 = weyl_norm_sq(m, base_point(m));
    for (int i = 0; i < 100; ++i) {
      const auto x = random_point(rng, m);
      CHECK(std::fabs(scalar_curvature(m, x) - s0) < 1e-10);
      CHECK(std::fabs(weyl_norm_sq(m, x) - w0) < 1e-10);
    }
  }
}

TEST_CASE("unit sphere volumes") {
  for (int k = 0; k <= 12; ++k) {
    const double expected = 2.0 * std::pow(kPi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
    CHECK(unit_sphere_volume(k) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("tangent frames are orthonormal and tangent") {
  std::mt19937_64 rng(15);
  for (const auto& m : all_models()) {
    const auto x = random_point(rng, m);
    const auto f = tangent_frame(m, x);
    REQUIRE(static_cast<int>(f.size()) == m.dimension());
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t j = 0; j < f.size(); ++j) {
        double dot = 0.0;
        for (std::size_t c = 0; c < f[i].size(); ++c) dot += f[i][c] * f[j][c];
        CHECK(std::fabs(dot - (i == j ? 1.0 : 0.0)) < 1e-12);
      }
      const auto t = project_to_tangent(m, x, f[i]);
      for (std::size_t c = 0; c < t.size(); ++c) CHECK(std::fabs(t[c] - f[i][c]) < 1e-12);
    }
  }
}

TEST_CASE("distance gradient and Laplacian agree with differences along geodesics") {
  // Along unit-speed geodesics through x, d^2/dt^2 f(exp_x(t e_i)) summed over
  // an orthonormal frame is the Laplacian of f at x.
  std::mt19937_64 rng(16);
  for (const auto& m : all_models()) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto center = random_point(rng, m, 0.2);
      const auto cframe = tangent_frame(m, center);
      const double reach = m.compact() ? 1.0 : 0.3 * m.radius();
      const auto x = exp_in_frame(m, center, cframe, random_coords(rng, m.dimension(), reach));
      const auto f = tangent_frame(m, x);
      const double h = 1e-4;
      double lap = 0.0;
      std::vector<double> grad(x.coords.size(), 0.0);
      for (int i = 0; i < m.dimension(); ++i) {
        std::vector<double> c(m.dimension(), 0.0);
        c[i] = h;
        const double fp = distance(m, center, exp_in_frame(m, x, f, c));
        c[i] = -h;
        const double fm = distance(m, center, exp_in_frame(m, x, f, c));
        const double f0 = distance(m, center, x);
        lap += (fp - 2.0 * f0 + fm) / (h * h);
        for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += (fp - fm) / (2.0 * h) * f[i][k];
      }
      CHECK(distance_laplacian(m, center, x) == doctest::Approx(lap).epsilon(1e-5));
      const auto g = distance_gradient(m, center, x);
      // Central differences of a unit gradient field carry an O(h^2 / d^2) error.
      const double d = distance(m, center, x);
      for (std::size_t k = 0; k < grad.size(); ++k) CHECK(std::fabs(g[k] - grad[k]) < 10.0 * h * h / (d * d));
    }
  }
}
