#pragma once

#include <functional>
#include <string>
#include <vector>

#include "blowup/bubble.hpp"
#include "json.hpp"

namespace blowup {

/// U(r) = (sqrt(n(n-2)) / (1 + r^2))^((n-2)/2).
double standard_bubble(int n, double r);

/// Scale whose standard bubble has the given centre height:
/// ((n(n-2))^((n-2)/4) / height)^(2/(n-2)).
double scale_from_height(int n, double height);

struct ProfileSample {
  double radius = 0.0;     ///< |x| in rescaled units
  int direction = 0;       ///< index into +-e_1, ..., +-e_n of the normal frame
  double value = 0.0;      ///< scale^((n-2)/2) u(exp_center(scale x))
  double reference = 0.0;  ///< U(|x|)
};

/// Samples the rescaled field along the 2n signed frame directions at `center`.
/// Throws DomainError when scale * max radius reaches the injectivity radius.
std::vector<ProfileSample> rescale_peak(const ManifoldModel& m, const std::function<double(const Point&)>& u,
                                        const Point& center, double scale,
                                        const std::vector<double>& sample_radii);

/// Largest |value - reference| / U(0) over the samples.
double profile_sup_deviation(const std::vector<ProfileSample>& samples, int n);

/// Cubic lattice in normal coordinates at `base`: points base + spacing * j,
/// j in {-half_width, ..., half_width}^n.
struct SearchGrid {
  Point base;
  double spacing = 0.0;
  int half_width = 0;
};

struct Peak {
  Point center;
  double mu = 0.0;
  double height = 0.0;
};

struct PeakReport {
  std::vector<Peak> peaks;
  double residual_after_subtraction = 0.0;  ///< discrete L2 ratio |u - sum U| / |u| on the grid
  bool success = false;
  std::string message;
};

/// Lattice local maxima (strict against all axis neighbours), polished by
/// coordinate-wise golden-section search within one cell, scales inferred from
/// the heights. Fewer than expected_k maxima yields success = false; surplus
/// maxima beyond the expected_k highest are dropped and mentioned in message.
PeakReport extract_peaks(const ManifoldModel& m, const std::function<double(const Point&)>& u,
                         int expected_k, const SearchGrid& grid);

struct PairSeparation {
  int i = 0;
  int j = 0;
  double distance = 0.0;
  double over_delta = 0.0;  ///< distance / sqrt(delta_i delta_j)
};

struct IsolationReport {
  double eps = 0.0;
  double mu = 0.0;
  std::vector<PairSeparation> pairs;
  std::vector<double> dist_to_xi0;
  double min_sep = 0.0;
  double min_sep_over_delta = 0.0;
  double min_sep_over_mu = 0.0;
  double max_dist_to_xi0 = 0.0;
  double max_dist_over_mu = 0.0;
};

IsolationReport isolation_ratios(const ManifoldModel& m, const Configuration& cfg, const Point& xi0,
                                 double mu, double eps);

struct WeightedBound {
  double value = 0.0;     ///< max of d^((n-2)/2) u over the samples
  double distance = 0.0;  ///< where it is attained
};

/// max over x = exp_center(r e), r in radii, e in +-frame, of d(x, center)^((n-2)/2) u(x).
WeightedBound weighted_bound(const ManifoldModel& m, const std::function<double(const Point&)>& u,
                             const Point& center, const std::vector<double>& radii);

struct SlopeFit {
  std::vector<double> abscissae;
  std::vector<double> ordinates;  ///< after division by (ln 1/x)^log_power
  double slope = 0.0;
  double intercept = 0.0;     ///< natural log
  double max_residual = 0.0;  ///< max |fit / data - 1|
  double log_power = 0.0;
};

/// Least-squares line through (ln x, ln(y / (ln 1/x)^log_power)). Needs >= 4
/// points spanning >= one decade (ContractError) and positive ordinates
/// (DomainError); log_power != 0 additionally needs x < 1.
SlopeFit order_fit(const std::vector<double>& x, const std::vector<double>& y, double log_power = 0.0);

nlohmann::json to_json(const PeakReport& r);
nlohmann::json to_json(const IsolationReport& r);
nlohmann::json to_json(const SlopeFit& f);

}  // namespace blowup
