#pragma once
// Flow diagnostics: stability scans, smoothing integrals, decay-rate
// fits, and wave-operator convergence checks.

#include <optional>

#include "lkdv/fitting.hpp"
#include "lkdv/propagator.hpp"
#include "lkdv/seeds.hpp"

namespace lkdv {

// ---------------------------------------------------------------------------
// Reports

struct StabilityReport {
  double L = 0;
  int N = 0;
  double T = 0;
  double dt = 0;
  GeneratorTag generator = GeneratorTag::H;
  double coupling = 1.0;
  struct PerSeed {
    std::string id;
    double max_ratio = 0;       // empirical C0 candidate
    double min_ratio = 0;       // empirical c0 candidate
    double growth_rate = 0;     // fitted rho (1/time)
    double crude_bound_margin = 0;
    bool resolution_warning = false;
    std::vector<double> t;      // downsampled ratio curve
    std::vector<double> ratio;
  };
  std::vector<PerSeed> seeds;
};

struct SmoothingReport {
  std::string kind;  // "interacting" or "free"
  GeneratorTag generator = GeneratorTag::H;  // interacting only
  Branch branch = Branch::plus;              // interacting only
  double alpha = 0;                          // weight e^{-alpha|x|}
  double theta = 0;                          // free variant <xi>^theta
  bool abs_p = false;                        // free variant |xi| factor
  bool derivative = false;                   // interacting p-factor
  double coupling = 1.0;
  double L = 0;
  int N = 0;
  double dt = 0;
  std::string seed_id;
  double seed_norm2 = 0;
  std::vector<double> ladder;      // T_k
  std::vector<double> partial;     // S(T_k)
  std::vector<double> tail;        // S(T_k) - S(T_{k-1})
  double constant_estimate = 0;    // S(T_last) / ||phi||^2
  std::vector<double> t_curve;     // downsampled S(t)
  std::vector<double> s_curve;
  double crude_bound_margin = 0;   // from the underlying trajectory
};

struct DecayFitReport {
  double alpha = 0;
  int n = 0;
  double t_min = 0, t_max = 0;
  double fitted_rate = 0;    // r
  double target_rate = 0;    // alpha (4 - alpha^2)
  double fitted_power = 0;   // q
  double target_power = 0;   // n / 2
  double residual_rms = 0;
  double L = 0;
  int N = 0;
  std::string seed_id;
  std::vector<double> t_curve, norm_curve;
};

struct WaveOperatorReport {
  int direction = +1;  // sign of t -> +-infinity
  std::string kind;    // "cook" or "inverse"
  double L = 0;
  int N = 0;
  double dt = 0;
  double coupling = 1.0;
  std::string seed_id;
  std::vector<double> checkpoints;
  std::vector<double> increments;  // ||Omega(t_{k+1}) - Omega(t_k)||
  double seed_norm = 0;
  // Cook integrand ||pV e^{-itH0} phi|| samples and its fitted decay
  std::vector<double> integrand_t, integrand;
  double integrand_rate = 0;  // from log-linear fit over [1, 10]
  // inverse variant: residual || u(t_last) - e^{-i t_last H0} u_pm_prev ||
  double scattering_residual = -1.0;
  double limit_norm = 0;            // ||u_pm estimate||
  WaveField limit_state;            // u_pm estimate (last checkpoint)
  double crude_bound_margin = 0;    // worst across the stepped runs
};

// ---------------------------------------------------------------------------
// Operations

/// Evolves every seed under tag in {H, Hstar}, records the norm ratio at each
/// step, fits log ratio vs t.  Unitary control tags (H0, Htilde0) are
/// accepted for the control experiments.
StabilityReport stability_scan(const std::vector<Seed>& seeds, double T,
                               double dt, GeneratorTag tag,
                               double coupling = 1.0, int curve_points = 512);

/// Partial integrals S(T_k) of ||e^{-alpha|x|} p^{0|1} u(t)||^2 along one
/// interacting trajectory; branch selects e^{-itG} vs e^{+itG}.
SmoothingReport smoothing_integral(const WaveField& phi, double alpha,
                                   Branch branch, bool derivative,
                                   std::vector<double> T_ladder,
                                   GeneratorTag tag, double dt,
                                   double coupling = 1.0,
                                   const std::string& seed_id = "");

/// Same trajectory measured under several (alpha, derivative) pairs at once;
/// one report per pair, in the given order.
std::vector<SmoothingReport> smoothing_integral_multi(
    const WaveField& phi, std::span<const double> alphas,
    std::span<const bool> derivatives, Branch branch,
    std::vector<double> T_ladder, GeneratorTag tag, double dt,
    double coupling = 1.0, const std::string& seed_id = "");

struct FreqFactor {
  enum Kind { bracket_theta, abs_p } kind = bracket_theta;
  double theta = 0.0;  // for bracket_theta, in [0, 1]
};

/// Free-flow ladder with weight <x>^{-1} and Fourier factor <xi>^theta or
/// |xi|; the two-sided time integral runs both branches and sums them.
SmoothingReport free_smoothing_integral(const WaveField& phi, FreqFactor factor,
                                        std::vector<double> T_ladder,
                                        double dt_quad = 5e-3,
                                        const std::string& seed_id = "");

/// y(t) = ||p^n conjugated_free_evolve(psi, t, alpha)||; fits
/// log y = log C - q log t - r t over [t_min, t_max] within t_grid.
DecayFitReport decay_fit(double alpha, int n, const WaveField& psi,
                         std::span<const double> t_grid, double t_min = 1.0,
                         double t_max = 10.0, Branch branch = Branch::plus,
                         const std::string& seed_id = "");

/// Closed-form symbol-level decay rate of the conjugated flow operator norm,
/// measured from two times; equals alpha (4 - alpha^2) up to roundoff.
double symbol_level_decay_rate(const Grid& g, double alpha, double t1 = 1.0,
                               double t2 = 2.0, Branch branch = Branch::plus);

struct WaveOperatorOptions {
  double dt = 2e-3;
  double coupling = 1.0;
  double integrand_t_max = 12.0;
  double integrand_dt = 0.05;
  double fit_t_min = 1.0;
  double fit_t_max = 10.0;
};

/// Omega(t) phi = e^{+itH} e^{-itH0} phi at the checkpoints (direction -1
/// mirrors t -> -t); one fresh run per checkpoint, Cauchy increments between
/// consecutive checkpoint states, plus Cook integrand samples and fit.
WaveOperatorReport cook_wave_operator(const WaveField& phi, int direction,
                                      std::vector<double> checkpoints,
                                      const WaveOperatorOptions& opt = {},
                                      const std::string& seed_id = "");

/// Omega_In(t) phi = e^{+itH0} e^{-itH} phi along a single stepped
/// trajectory with checkpoint snapshots; also evaluates the composed
/// scattering residual at the last checkpoint against the previous one.
WaveOperatorReport inverse_wave_check(const WaveField& phi, int direction,
                                      std::vector<double> checkpoints,
                                      const WaveOperatorOptions& opt = {},
                                      const std::string& seed_id = "");

}  // namespace lkdv
