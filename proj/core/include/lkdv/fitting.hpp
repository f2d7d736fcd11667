#pragma once
// Small least-squares helpers shared by the analysis harness.

#include <span>

namespace lkdv {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double residual_rms = 0.0;
};

/// Ordinary least squares y ~ intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// log y = log_c - q log t - r t, fitted over t in [t_min, t_max]; samples
/// with y <= floor are excluded (noise floor).
struct DecayLawFit {
  double log_c = 0.0;
  double q = 0.0;
  double r = 0.0;
  double residual_rms = 0.0;
  int samples_used = 0;
};

DecayLawFit fit_decay_law(std::span<const double> t, std::span<const double> y,
                          double t_min, double t_max, double floor = 1e-13);

/// Slope of log y vs t over the window (exponential-rate estimate).
LineFit fit_log_slope(std::span<const double> t, std::span<const double> y,
                      double t_min, double t_max, double floor = 1e-13);

}  // namespace lkdv
