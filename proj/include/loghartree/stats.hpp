#ifndef LOGHARTREE_STATS_HPP
#define LOGHARTREE_STATS_HPP

#include <cmath>
#include <vector>

#include "loghartree/grid.hpp"

namespace loghartree {

struct DecayFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  int points = 0;
};

// Least-squares fit of ln f against r over the radial window [r_lo, r_hi],
// using the binned profile. Bins at or below `floor` are excluded.
inline DecayFit decay_fit(const Field& f, double r_lo, double r_hi, int n_bins = 192,
                          double floor = 1e-14) {
  RadialProfile prof = radial_profile(f, n_bins);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < prof.r.size(); ++k) {
    if (prof.r[k] < r_lo || prof.r[k] > r_hi) continue;
    if (!(prof.mean[k] > floor)) continue;
    xs.push_back(prof.r[k]);
    ys.push_back(std::log(prof.mean[k]));
  }
  DecayFit fit;
  fit.points = static_cast<int>(xs.size());
  if (xs.size() < 3) return fit;
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0, ybar = sy / n;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double pred = fit.slope * xs[k] + fit.intercept;
    ss_res += (ys[k] - pred) * (ys[k] - pred);
    ss_tot += (ys[k] - ybar) * (ys[k] - ybar);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
  return fit;
}

// Number of adjacent radial-bin increases above `tol`, over bins within r <= r_max.
inline int monotonicity_violations(const Field& f, int n_bins = 128, double tol = 1e-10,
                                   double r_max_frac = 1.0) {
  RadialProfile prof = radial_profile(f, n_bins);
  double r_max = r_max_frac * f.spec.half_width;
  int violations = 0;
  for (std::size_t k = 0; k + 1 < prof.r.size(); ++k) {
    if (prof.r[k + 1] > r_max) break;
    if (prof.mean[k + 1] - prof.mean[k] > tol) ++violations;
  }
  return violations;
}

// Relative L2 distance to the exact-radius annulus average.
inline double radial_asymmetry(const Field& f) {
  double denom = l2_norm_sq(f);
  if (!(denom > 0)) return 0.0;
  Field rad = radialize(f);
  double num = 0.0, c = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    double d = f.values[i] - rad.values[i];
    double y = d * d - c;
    double t = num + y;
    c = (t - num) - y;
    num = t;
  }
  double h = f.spec.spacing();
  return std::sqrt(h * h * num / denom);
}

}  // namespace loghartree

#endif
