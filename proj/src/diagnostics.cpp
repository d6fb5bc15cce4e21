#include "blowup/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "blowup/errors.hpp"

namespace blowup {
namespace {

// Maximiser of f on [a, b] by golden-section search.
double golden_max(const std::function<double(double)>& f, double a, double b, int iterations = 80) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iterations && b - a > 0.0; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

}  // namespace

double standard_bubble(int n, double r) { return bubble_profile(n, 1.0, r).value; }

double scale_from_height(int n, double height) {
  if (!(height > 0.0)) throw DomainError("peak height must be positive");
  return std::pow(std::pow(n * (n - 2.0), 0.25 * (n - 2.0)) / height, 2.0 / (n - 2.0));
}

std::vector<ProfileSample> rescale_peak(const ManifoldModel& m, const std::function<double(const Point&)>& u,
                                        const Point& center, double scale,
                                        const std::vector<double>& sample_radii) {
  if (!(scale > 0.0)) throw InvalidArgument("rescale_peak needs a positive scale");
  double rmax = 0.0;
  for (double r : sample_radii) {
    if (r < 0.0) throw InvalidArgument("sample radii must be nonnegative");
    rmax = std::max(rmax, r);
  }
  if (scale * rmax >= m.injectivity_radius()) {
    throw DomainError("rescaled sampling radius " + std::to_string(scale * rmax) +
                      " reaches the injectivity radius");
  }
  const int n = m.dimension();
  const double factor = std::pow(scale, 0.5 * (n - 2.0));
  const auto frame = tangent_frame(m, center);
  std::vector<ProfileSample> out;
  std::vector<double> c(n, 0.0);
  for (int dir = 0; dir < 2 * n; ++dir) {
    const double sign = dir % 2 == 0 ? 1.0 : -1.0;
    for (double r : sample_radii) {
      std::fill(c.begin(), c.end(), 0.0);
      c[dir / 2] = sign * scale * r;
      const Point x = exp_in_frame(m, center, frame, c);
      out.push_back({r, dir, factor * u(x), standard_bubble(n, r)});
    }
  }
  return out;
}

double profile_sup_deviation(const std::vector<ProfileSample>& samples, int n) {
  double worst = 0.0;
  for (const auto& s : samples) worst = std::max(worst, std::fabs(s.value - s.reference));
  return worst / standard_bubble(n, 0.0);
}

PeakReport extract_peaks(const ManifoldModel& m, const std::function<double(const Point&)>& u,
                         int expected_k, const SearchGrid& grid) {
  if (expected_k < 1) throw InvalidArgument("expected_k must be at least 1");
  if (!(grid.spacing > 0.0) || grid.half_width < 1) {
    throw InvalidArgument("search grid needs positive spacing and half width");
  }
  const int n = m.dimension();
  const auto frame = tangent_frame(m, grid.base);
  const int side = 2 * grid.half_width + 1;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= side;

  auto coords_of = [&](std::size_t idx) {
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) {
      c[i] = grid.spacing * (static_cast<int>(idx % side) - grid.half_width);
      idx /= side;
    }
    return c;
  };
  std::vector<Point> points(total);
  std::vector<double> values(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    points[idx] = exp_in_frame(m, grid.base, frame, coords_of(idx));
    values[idx] = u(points[idx]);
  }

  struct Candidate {
    std::vector<double> y;
    double value;
  };
  std::vector<Candidate> found;
  for (std::size_t idx = 0; idx < total; ++idx) {
    bool is_max = true;
    std::size_t stride = 1;
    for (int i = 0; i < n && is_max; ++i, stride *= side) {
      const int j = static_cast<int>((idx / stride) % side);
      if (j > 0 && !(values[idx] > values[idx - stride])) is_max = false;
      if (j + 1 < side && !(values[idx] > values[idx + stride])) is_max = false;
    }
    if (is_max) found.push_back({coords_of(idx), values[idx]});
  }

  PeakReport report;
  if (static_cast<int>(found.size()) < expected_k) {
    report.message = "found " + std::to_string(found.size()) + " local maxima, expected " +
                     std::to_string(expected_k);
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
  if (static_cast<int>(found.size()) > expected_k) {
    report.message = "dropped " + std::to_string(found.size() - expected_k) + " lower maxima";
    found.resize(expected_k);
  }

  for (auto& cand : found) {
    auto f = [&](const std::vector<double>& y) { return u(exp_in_frame(m, grid.base, frame, y)); };
    std::vector<double> y = cand.y;
    double half = grid.spacing;
    for (int sweep = 0; sweep < 3; ++sweep) {
      for (int i = 0; i < n; ++i) {
        const double y0 = y[i];
        y[i] = golden_max(
            [&](double t) {
              std::vector<double> z(y);
              z[i] = t;
              return f(z);
            },
            y0 - half, y0 + half);
      }
      half *= 0.25;
    }
    Peak p;
    p.center = exp_in_frame(m, grid.base, frame, y);
    p.height = f(y);
    p.mu = scale_from_height(n, p.height);
    report.peaks.push_back(std::move(p));
  }
  std::sort(report.peaks.begin(), report.peaks.end(),
            [](const Peak& a, const Peak& b) { return a.center.coords < b.center.coords; });

  double r2 = 0.0;
  double u2 = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    double model = 0.0;
    for (const auto& p : report.peaks) {
      model += bubble_profile(n, p.mu, distance(m, points[idx], p.center)).value;
    }
    r2 += (values[idx] - model) * (values[idx] - model);
    u2 += values[idx] * values[idx];
  }
  report.residual_after_subtraction = u2 > 0.0 ? std::sqrt(r2 / u2) : 0.0;
  report.success = static_cast<int>(report.peaks.size()) == expected_k &&
                   static_cast<int>(found.size()) >= expected_k;
  if (report.peaks.size() < static_cast<std::size_t>(expected_k)) report.success = false;
  return report;
}

IsolationReport isolation_ratios(const ManifoldModel& m, const Configuration& cfg, const Point& xi0,
                                 double mu, double eps) {
  IsolationReport r;
  r.eps = eps;
  r.mu = mu;
  const auto& b = cfg.bubbles;
  bool first = true;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      const double d = distance(m, b[i].center, b[j].center);
      const double over = d / std::sqrt(b[i].delta * b[j].delta);
      r.pairs.push_back({static_cast<int>(i), static_cast<int>(j), d, over});
      if (first || d < r.min_sep) r.min_sep = d;
      if (first || over < r.min_sep_over_delta) r.min_sep_over_delta = over;
      first = false;
    }
  }
  r.min_sep_over_mu = mu > 0.0 ? r.min_sep / mu : 0.0;
  for (const auto& bi : b) {
    const double d = distance(m, bi.center, xi0);
    r.dist_to_xi0.push_back(d);
    r.max_dist_to_xi0 = std::max(r.max_dist_to_xi0, d);
  }
  r.max_dist_over_mu = mu > 0.0 ? r.max_dist_to_xi0 / mu : 0.0;
  return r;
}

WeightedBound weighted_bound(const ManifoldModel& m, const std::function<double(const Point&)>& u,
                             const Point& center, const std::vector<double>& radii) {
  const int n = m.dimension();
  const auto frame = tangent_frame(m, center);
  WeightedBound best;
  std::vector<double> c(n);
  for (int dir = 0; dir < 2 * n; ++dir) {
    for (double r : radii) {
      std::fill(c.begin(), c.end(), 0.0);
      c[dir / 2] = (dir % 2 == 0 ? 1.0 : -1.0) * r;
      const Point x = exp_in_frame(m, center, frame, c);
      const double d = distance(m, x, center);
      const double v = std::pow(d, 0.5 * (n - 2.0)) * u(x);
      if (v > best.value) best = {v, d};
    }
  }
  return best;
}

SlopeFit order_fit(const std::vector<double>& x, const std::vector<double>& y, double log_power) {
  if (x.size() != y.size()) throw InvalidArgument("order_fit needs matching abscissae and ordinates");
  if (x.size() < 4) throw ContractError("order_fit needs at least 4 points");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (!(*lo > 0.0)) throw DomainError("order_fit needs positive abscissae");
  if (*hi / *lo < 10.0 * (1.0 - 1e-12)) throw ContractError("order_fit needs at least one decade of data");
  SlopeFit fit;
  fit.abscissae = x;
  fit.log_power = log_power;
  std::vector<double> lx(x.size());
  std::vector<double> ly(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) throw DomainError("order_fit needs positive ordinates");
    double yi = y[i];
    if (log_power != 0.0) {
      if (!(x[i] < 1.0)) throw DomainError("log division needs abscissae below 1");
      yi /= std::pow(std::log(1.0 / x[i]), log_power);
    }
    fit.ordinates.push_back(yi);
    lx[i] = std::log(x[i]);
    ly[i] = std::log(yi);
  }
  const double nx = static_cast<double>(x.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / nx;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / nx;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::expm1(fit.intercept + fit.slope * lx[i] - ly[i]);
    fit.max_residual = std::max(fit.max_residual, std::fabs(r));
  }
  return fit;
}

nlohmann::json to_json(const PeakReport& r) {
  nlohmann::json j;
  j["success"] = r.success;
  j["message"] = r.message;
  j["residual_after_subtraction"] = r.residual_after_subtraction;
  j["peaks"] = nlohmann::json::array();
  for (const auto& p : r.peaks) {
    j["peaks"].push_back({{"center", p.center.coords}, {"mu", p.mu}, {"height", p.height}});
  }
  return j;
}

nlohmann::json to_json(const IsolationReport& r) {
  nlohmann::json j;
  j["eps"] = r.eps;
  j["mu"] = r.mu;
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : r.pairs) {
    j["pairs"].push_back({{"i", p.i}, {"j", p.j}, {"distance", p.distance}, {"over_delta", p.over_delta}});
  }
  j["dist_to_xi0"] = r.dist_to_xi0;
  j["min_sep"] = r.min_sep;
  j["min_sep_over_delta"] = r.min_sep_over_delta;
  j["min_sep_over_mu"] = r.min_sep_over_mu;
  j["max_dist_to_xi0"] = r.max_dist_to_xi0;
  j["max_dist_over_mu"] = r.max_dist_over_mu;
  return j;
}

nlohmann::json to_json(const SlopeFit& f) {
  return {{"abscissae", f.abscissae}, {"ordinates", f.ordinates}, {"slope", f.slope},
          {"intercept", f.intercept}, {"max_residual", f.max_residual}, {"log_power", f.log_power}};
}

}  // namespace blowup
