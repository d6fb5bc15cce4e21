#include "blowup/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitTolerance = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// x cot x, equal to 1 at the origin.
double x_cot_x(double x) {
  if (std::fabs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 3.0 - x2 * x2 / 45.0;
  }
  return x / std::tan(x);
}

// Great-circle distance between unit vectors.
double sphere_distance(std::span<const double> a, std::span<const double> b) {
  // Stored points are unit only to rounding; identical points must still be 0 apart.
  if (std::equal(a.begin(), a.end(), b.begin(), b.end())) return 0.0;
  const double c = dot(a, b);
  double s2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double w = b[i] - c * a[i];
    s2 += w * w;
  }
  return std::atan2(std::sqrt(s2), std::clamp(c, -1.0, 1.0));
}

void sphere_exp(std::span<const double> base, std::span<const double> v, std::span<double> out) {
  const double t = norm(v);
  double sinc;
  if (t < 1e-6) {
    sinc = 1.0 - t * t / 6.0;
  } else {
    sinc = std::sin(t) / t;
  }
  const double c = std::cos(t);
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = c * base[i] + sinc * v[i];
  const double r = norm(out);
  for (auto& o : out) o /= r;
}

// Returns the factor angle; writes the log vector into out.
double sphere_log(std::span<const double> base, std::span<const double> target,
                  std::span<double> out) {
  const double c = dot(base, target);
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = target[i] - c * base[i];
  const double s = norm(out);
  const double theta = std::atan2(s, std::clamp(c, -1.0, 1.0));
  if (s == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return theta;
  }
  for (auto& o : out) o *= theta / s;
  return theta;
}

// Orthonormal basis of the orthogonal complement of `normals` inside R^dim,
// `count` vectors long. Candidates are visited in a fixed order.
std::vector<std::vector<double>> complete_basis(int dim, std::vector<std::vector<double>> seeds,
                                                const std::vector<std::vector<double>>& normals,
                                                int count) {
  std::vector<std::vector<double>> out;
  auto try_add = [&](std::vector<double> v) {
    for (const auto& nrm : normals) {
      const double c = dot(v, nrm);
      for (int i = 0; i < dim; ++i) v[i] -= c * nrm[i];
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : out) {
        const double c = dot(v, u);
        for (int i = 0; i < dim; ++i) v[i] -= c * u[i];
      }
    }
    const double r = norm(v);
    if (r < 1e-6) return;
    for (auto& x : v) x /= r;
    out.push_back(std::move(v));
  };
  for (auto& s : seeds) {
    if (static_cast<int>(out.size()) == count) break;
    try_add(std::move(s));
  }
  for (int j = 0; j < dim && static_cast<int>(out.size()) < count; ++j) {
    std::vector<double> e(dim, 0.0);
    e[j] = 1.0;
    try_add(std::move(e));
  }
  return out;
}

void require_same_model(const ManifoldModel& m, const Point& a) {
  if (static_cast<int>(a.coords.size()) != m.ambient_dimension()) {
    throw InvalidArgument("point has " + std::to_string(a.coords.size()) +
                          " coordinates, model " + m.name() + " expects " +
                          std::to_string(m.ambient_dimension()));
  }
}

}  // namespace

double TangentVector::norm() const { return blowup::norm(components); }

ManifoldModel ManifoldModel::product_spheres(int p, int q) {
  if (p < 3 || q < 3) throw InvalidArgument("ProductSpheres requires p >= 3 and q >= 3");
  return ManifoldModel(ModelKind::ProductSpheres, p + q, p, q, 1.0);
}

ManifoldModel ManifoldModel::round_sphere(int n) {
  if (n < 3) throw InvalidArgument("RoundSphere requires n >= 3");
  return ManifoldModel(ModelKind::RoundSphere, n, 0, 0, 1.0);
}

ManifoldModel ManifoldModel::flat_ball(int n, double radius) {
  if (n < 3) throw InvalidArgument("FlatBall requires n >= 3");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("FlatBall radius must be positive and finite");
  }
  return ManifoldModel(ModelKind::FlatBall, n, 0, 0, radius);
}

int ManifoldModel::ambient_dimension() const noexcept {
  switch (kind_) {
    case ModelKind::ProductSpheres: return p_ + q_ + 2;
    case ModelKind::RoundSphere: return n_ + 1;
    case ModelKind::FlatBall: return n_;
  }
  return n_;
}

double ManifoldModel::injectivity_radius() const noexcept {
  return kind_ == ModelKind::FlatBall ? radius_ : kPi;
}

double ManifoldModel::volume() const {
  switch (kind_) {
    case ModelKind::ProductSpheres: return unit_sphere_volume(p_) * unit_sphere_volume(q_);
    case ModelKind::RoundSphere: return unit_sphere_volume(n_);
    case ModelKind::FlatBall:
      return unit_sphere_volume(n_ - 1) * std::pow(radius_, n_) / n_;
  }
  return 0.0;
}

std::string ManifoldModel::name() const {
  std::ostringstream os;
  switch (kind_) {
    case ModelKind::ProductSpheres: os << "ProductSpheres(" << p_ << "," << q_ << ")"; break;
    case ModelKind::RoundSphere: os << "RoundSphere(" << n_ << ")"; break;
    case ModelKind::FlatBall: os << "FlatBall(" << n_ << "," << radius_ << ")"; break;
  }
  return os.str();
}

double unit_sphere_volume(int k) {
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

void validate_point(const ManifoldModel& m, const Point& x) {
  require_same_model(m, x);
  for (double c : x.coords) {
    if (!std::isfinite(c)) throw InvalidArgument("point has non-finite coordinates");
  }
  std::span<const double> c(x.coords);
  switch (m.kind()) {
    case ModelKind::ProductSpheres:
      if (std::fabs(norm(c.first(m.p() + 1)) - 1.0) > kUnitTolerance ||
          std::fabs(norm(c.subspan(m.p() + 1)) - 1.0) > kUnitTolerance) {
        throw InvalidArgument("product point components must be unit vectors");
      }
      break;
    case ModelKind::RoundSphere:
      if (std::fabs(norm(c) - 1.0) > kUnitTolerance) {
        throw InvalidArgument("sphere point must be a unit vector");
      }
      break;
    case ModelKind::FlatBall: break;
  }
}

Point base_point(const ManifoldModel& m) {
  Point x{std::vector<double>(m.ambient_dimension(), 0.0)};
  switch (m.kind()) {
    case ModelKind::ProductSpheres:
      x.coords[0] = 1.0;
      x.coords[m.p() + 1] = 1.0;
      break;
    case ModelKind::RoundSphere: x.coords[0] = 1.0; break;
    case ModelKind::FlatBall: break;
  }
  return x;
}

double distance(const ManifoldModel& m, const Point& a, const Point& b) {
  require_same_model(m, a);
  require_same_model(m, b);
  std::span<const double> ca(a.coords);
  std::span<const double> cb(b.coords);
  switch (m.kind()) {
    case ModelKind::ProductSpheres: {
      const std::size_t k = m.p() + 1;
      const double r1 = sphere_distance(ca.first(k), cb.first(k));
      const double r2 = sphere_distance(ca.subspan(k), cb.subspan(k));
      return std::hypot(r1, r2);
    }
    case ModelKind::RoundSphere: return sphere_distance(ca, cb);
    case ModelKind::FlatBall: {
      double s = 0.0;
      for (std::size_t i = 0; i < ca.size(); ++i) s += (ca[i] - cb[i]) * (ca[i] - cb[i]);
      return std::sqrt(s);
    }
  }
  return 0.0;
}

Point exp_map(const ManifoldModel& m, const Point& base, std::span<const double> v) {
  require_same_model(m, base);
  if (static_cast<int>(v.size()) != m.ambient_dimension()) {
    throw InvalidArgument("tangent vector size does not match the model");
  }
  Point out{std::vector<double>(base.coords.size())};
  std::span<const double> b(base.coords);
  std::span<double> o(out.coords);
  switch (m.kind()) {
    case ModelKind::ProductSpheres: {
      const std::size_t k = m.p() + 1;
      sphere_exp(b.first(k), v.first(k), o.first(k));
      sphere_exp(b.subspan(k), v.subspan(k), o.subspan(k));
      break;
    }
    case ModelKind::RoundSphere: sphere_exp(b, v, o); break;
    case ModelKind::FlatBall:
      for (std::size_t i = 0; i < b.size(); ++i) o[i] = b[i] + v[i];
      break;
  }
  return out;
}

Point exp_map(const ManifoldModel& m, const Point& base, const TangentVector& v) {
  return exp_map(m, base, std::span<const double>(v.components));
}

TangentVector log_map(const ManifoldModel& m, const Point& base, const Point& target) {
  require_same_model(m, base);
  require_same_model(m, target);
  TangentVector out{base, std::vector<double>(base.coords.size())};
  std::span<const double> b(base.coords);
  std::span<const double> t(target.coords);
  std::span<double> o(out.components);
  double d = 0.0;
  switch (m.kind()) {
    case ModelKind::ProductSpheres: {
      const std::size_t k = m.p() + 1;
      const double r1 = sphere_log(b.first(k), t.first(k), o.first(k));
      const double r2 = sphere_log(b.subspan(k), t.subspan(k), o.subspan(k));
      d = std::hypot(r1, r2);
      break;
    }
    case ModelKind::RoundSphere: d = sphere_log(b, t, o); break;
    case ModelKind::FlatBall:
      for (std::size_t i = 0; i < b.size(); ++i) o[i] = t[i] - b[i];
      return out;
  }
  if (d >= m.injectivity_radius() - 1e-12) {
    throw DomainError("log_map: target at distance " + std::to_string(d) +
                      " is not inside the injectivity radius of " + m.name());
  }
  return out;
}

double scalar_curvature(const ManifoldModel& m, const Point& x) {
  (void)x;
  switch (m.kind()) {
    case ModelKind::ProductSpheres: return m.p() * (m.p() - 1.0) + m.q() * (m.q() - 1.0);
    case ModelKind::RoundSphere: return m.dimension() * (m.dimension() - 1.0);
    case ModelKind::FlatBall: return 0.0;
  }
  return 0.0;
}

double weyl_norm_sq(const ManifoldModel& m, const Point& x) {
  (void)x;
  if (m.kind() != ModelKind::ProductSpheres) return 0.0;
  if (m.p() == 3 && m.q() == 3) return kWeylNormSqS3xS3;
  // Orthogonal decomposition |Rm|^2 = |W|^2 + 4/(n-2)|Ric|^2 - 2/((n-1)(n-2)) R^2
  // with the unit-sphere factor invariants.
  const double p = m.p();
  const double q = m.q();
  const double n = m.dimension();
  const double rm2 = 2.0 * p * (p - 1.0) + 2.0 * q * (q - 1.0);
  const double ric2 = p * (p - 1.0) * (p - 1.0) + q * (q - 1.0) * (q - 1.0);
  const double r = p * (p - 1.0) + q * (q - 1.0);
  return rm2 - 4.0 / (n - 2.0) * ric2 + 2.0 / ((n - 1.0) * (n - 2.0)) * r * r;
}

std::vector<std::vector<double>> tangent_frame(const ManifoldModel& m, const Point& x) {
  return tangent_frame(m, x, {});
}

std::vector<std::vector<double>> tangent_frame(const ManifoldModel& m, const Point& x,
                                               std::span<const double> axis) {
  require_same_model(m, x);
  const int dim = m.ambient_dimension();
  auto seed_from = [&](std::size_t off, std::size_t len) {
    std::vector<std::vector<double>> seeds;
    if (axis.size() != static_cast<std::size_t>(dim)) return seeds;
    std::vector<double> v(axis.begin() + off, axis.begin() + off + len);
    if (norm(v) > 1e-14) seeds.push_back(std::move(v));
    return seeds;
  };
  switch (m.kind()) {
    case ModelKind::FlatBall: return complete_basis(dim, seed_from(0, dim), {}, m.dimension());
    case ModelKind::RoundSphere:
      return complete_basis(dim, seed_from(0, dim), {x.coords}, m.dimension());
    case ModelKind::ProductSpheres: {
      const int k1 = m.p() + 1;
      const int k2 = m.q() + 1;
      std::vector<double> a(x.coords.begin(), x.coords.begin() + k1);
      std::vector<double> b(x.coords.begin() + k1, x.coords.end());
      auto fa = complete_basis(k1, seed_from(0, k1), {a}, m.p());
      auto fb = complete_basis(k2, seed_from(k1, k2), {b}, m.q());
      std::vector<std::vector<double>> out;
      for (auto& v : fa) {
        std::vector<double> e(dim, 0.0);
        std::copy(v.begin(), v.end(), e.begin());
        out.push_back(std::move(e));
      }
      for (auto& v : fb) {
        std::vector<double> e(dim, 0.0);
        std::copy(v.begin(), v.end(), e.begin() + k1);
        out.push_back(std::move(e));
      }
      return out;
    }
  }
  return {};
}

Point exp_in_frame(const ManifoldModel& m, const Point& x,
                   const std::vector<std::vector<double>>& frame, std::span<const double> c) {
  std::vector<double> v(m.ambient_dimension(), 0.0);
  for (std::size_t j = 0; j < frame.size() && j < c.size(); ++j) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += c[j] * frame[j][i];
  }
  return exp_map(m, x, v);
}

std::vector<double> frame_coordinates(const std::vector<std::vector<double>>& frame,
                                      std::span<const double> v) {
  std::vector<double> c(frame.size());
  for (std::size_t j = 0; j < frame.size(); ++j) c[j] = dot(frame[j], v);
  return c;
}

double distance_laplacian(const ManifoldModel& m, const Point& center, const Point& x) {
  const int n = m.dimension();
  switch (m.kind()) {
    case ModelKind::FlatBall: return (n - 1.0) / distance(m, center, x);
    case ModelKind::RoundSphere: {
      const double d = distance(m, center, x);
      return (n - 1.0) / std::tan(d);
    }
    case ModelKind::ProductSpheres: {
      const std::size_t k = m.p() + 1;
      std::span<const double> c(center.coords);
      std::span<const double> y(x.coords);
      const double r1 = sphere_distance(c.first(k), y.first(k));
      const double r2 = sphere_distance(c.subspan(k), y.subspan(k));
      const double d = std::hypot(r1, r2);
      return ((m.p() - 1.0) * x_cot_x(r1) + (m.q() - 1.0) * x_cot_x(r2) + 1.0) / d;
    }
  }
  return 0.0;
}

std::vector<double> distance_gradient(const ManifoldModel& m, const Point& center, const Point& x) {
  require_same_model(m, center);
  require_same_model(m, x);
  std::vector<double> g(x.coords.size(), 0.0);
  std::span<const double> c(center.coords);
  std::span<const double> y(x.coords);
  std::span<double> o(g);
  double d = 0.0;
  switch (m.kind()) {
    case ModelKind::ProductSpheres: {
      const std::size_t k = m.p() + 1;
      const double r1 = sphere_log(y.first(k), c.first(k), o.first(k));
      const double r2 = sphere_log(y.subspan(k), c.subspan(k), o.subspan(k));
      d = std::hypot(r1, r2);
      break;
    }
    case ModelKind::RoundSphere: d = sphere_log(y, c, o); break;
    case ModelKind::FlatBall:
      for (std::size_t i = 0; i < g.size(); ++i) o[i] = c[i] - y[i];
      d = norm(g);
      break;
  }
  if (d == 0.0) return std::vector<double>(g.size(), 0.0);
  for (auto& v : g) v = -v / d;
  return g;
}

std::vector<double> project_to_tangent(const ManifoldModel& m, const Point& x,
                                       std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  auto strip = [&](std::size_t off, std::size_t len) {
    double c = 0.0;
    for (std::size_t i = 0; i < len; ++i) c += x.coords[off + i] * out[off + i];
    for (std::size_t i = 0; i < len; ++i) out[off + i] -= c * x.coords[off + i];
  };
  switch (m.kind()) {
    case ModelKind::ProductSpheres:
      strip(0, m.p() + 1);
      strip(m.p() + 1, m.q() + 1);
      break;
    case ModelKind::RoundSphere: strip(0, m.dimension() + 1); break;
    case ModelKind::FlatBall: break;
  }
  return out;
}

}  // namespace blowup
