#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "blowup/geometry.hpp"

namespace testing_support {

using blowup::ManifoldModel;
using blowup::Point;

/// Uniform point on the unit sphere S^k in R^{k+1}.
inline std::vector<double> sphere_point(std::mt19937_64& rng, int k) {
  std::normal_distribution<double> g;
  std::vector<double> v(k + 1);
  double s = 0.0;
  for (auto& x : v) {
    x = g(rng);
    s += x * x;
  }
  for (auto& x : v) x /= std::sqrt(s);
  return v;
}

/// Random point of the model; on the ball it stays inside `fill` times the radius.
inline Point random_point(std::mt19937_64& rng, const ManifoldModel& m, double fill = 0.9) {
  switch (m.kind()) {
    case blowup::ModelKind::RoundSphere:
      return Point{sphere_point(rng, m.dimension())};
    case blowup::ModelKind::ProductSpheres: {
      auto a = sphere_point(rng, m.p());
      auto b = sphere_point(rng, m.q());
      a.insert(a.end(), b.begin(), b.end());
      return Point{a};
    }
    case blowup::ModelKind::FlatBall: {
      auto v = sphere_point(rng, m.dimension() - 1);
      const double r = fill * m.radius() * std::pow(std::uniform_real_distribution<double>()(rng), 1.0 / m.dimension());
      for (auto& x : v) x *= r;
      return Point{v};
    }
  }
  return {};
}

/// Random frame coordinates of length below `max_norm`.
inline std::vector<double> random_coords(std::mt19937_64& rng, int n, double max_norm) {
  auto v = sphere_point(rng, n - 1);
  const double r = max_norm * std::uniform_real_distribution<double>(0.05, 1.0)(rng);
  for (auto& x : v) x *= r;
  return v;
}

inline std::vector<ManifoldModel> all_models() {
  return {ManifoldModel::product_spheres(3, 3), ManifoldModel::product_spheres(3, 4),
          ManifoldModel::round_sphere(6), ManifoldModel::round_sphere(7), ManifoldModel::flat_ball(6, 2.0),
          ManifoldModel::flat_ball(7, 1.0)};
}

}  // namespace testing_support
