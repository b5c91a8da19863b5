#pragma once

#include <string>
#include <vector>

namespace ans {

/// (t, value) samples of one diagnostic. scaled holds value * t^power when a
/// scaling was requested, otherwise it mirrors value.
struct DecaySeries {
  std::string label;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> scaled;
  double scale_power = 0.0;

  std::size_t size() const { return times.size(); }
  void push(double t, double v) {
    times.push_back(t);
    values.push_back(v);
    scaled.push_back(v);
  }
  /// Restriction to t_min <= t <= t_max.
  DecaySeries window(double t_min, double t_max) const;
  /// Fills scaled = value * t^power.
  DecaySeries scaled_by(double power) const;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::size_t samples = 0;
};

struct FitWindow {
  double t_min = 0.0;
  double t_max = 1e300;
};

/// Least squares line through (log t, log value) inside the window. Throws on
/// fewer than 5 samples or nonpositive values.
RateFit fit_rate(const DecaySeries& series, FitWindow window = {});
/// Same fit applied to the scaled column.
RateFit fit_scaled_rate(const DecaySeries& series, FitWindow window = {});

}  // namespace ans
