#include "lkdv/fitting.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lkdv {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matched samples");
  const size_t n = x.size();
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double det = n * sxx - sx * sx;
  LineFit f;
  f.slope = static_cast<double>((n * sxy - sx * sy) / det);
  f.intercept = static_cast<double>((sy - f.slope * sx) / n);
  long double rss = 0;
  for (size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    rss += static_cast<long double>(e) * e;
  }
  f.residual_rms = std::sqrt(static_cast<double>(rss / n));
  return f;
}

DecayLawFit fit_decay_law(std::span<const double> t, std::span<const double> y,
                          double t_min, double t_max, double floor) {
  std::vector<double> ti, li;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (!(y[i] > floor)) continue;
    ti.push_back(t[i]);
    li.push_back(std::log(y[i]));
  }
  if (ti.size() < 4)
    throw std::invalid_argument("fit_decay_law: too few samples in window");
  Eigen::MatrixXd A(static_cast<long>(ti.size()), 3);
  Eigen::VectorXd b(static_cast<long>(ti.size()));
  for (size_t i = 0; i < ti.size(); ++i) {
    A(static_cast<long>(i), 0) = 1.0;
    A(static_cast<long>(i), 1) = -std::log(ti[i]);
    A(static_cast<long>(i), 2) = -ti[i];
    b(static_cast<long>(i)) = li[i];
  }
  const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
  DecayLawFit f;
  f.log_c = sol(0);
  f.q = sol(1);
  f.r = sol(2);
  f.residual_rms = std::sqrt((A * sol - b).squaredNorm() / ti.size());
  f.samples_used = static_cast<int>(ti.size());
  return f;
}

LineFit fit_log_slope(std::span<const double> t, std::span<const double> y,
                      double t_min, double t_max, double floor) {
  std::vector<double> ti, li;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (!(y[i] > floor)) continue;
    ti.push_back(t[i]);
    li.push_back(std::log(y[i]));
  }
  return fit_line(ti, li);
}

}  // namespace lkdv
