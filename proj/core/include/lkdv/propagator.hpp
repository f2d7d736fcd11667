#pragma once
// Exact Fourier-multiplier flows, the interacting Lawson-RK4 stepper, and a
// dense matrix-exponential oracle for cross-validation.

#include <Eigen/Dense>
#include <functional>

#include "lkdv/operators.hpp"

namespace lkdv {

enum class Scheme { lawson_rk4, dense_oracle };
const char* to_string(Scheme s);
Scheme scheme_from_string(std::string_view s);

struct EvolveConfig {
  GeneratorTag generator = GeneratorTag::H;
  double T = 1.0;
  double dt = 1e-3;
  Scheme scheme = Scheme::lawson_rk4;
  int record_every = 0;    // snapshot stride in steps; 0 keeps endpoints only
  double coupling = 1.0;   // scales the potential terms
};

/// Raised when the norm outruns the e^{5|t|} envelope certified for the flow
/// (threshold 6t, so a genuinely blown-up run aborts before producing NaNs).
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(double t, double log_ratio);
  double t() const { return t_; }
  double log_ratio() const { return log_ratio_; }

 private:
  double t_;
  double log_ratio_;
};

struct Trajectory {
  std::vector<double> times;      // snapshot times
  std::vector<WaveField> states;  // snapshots (position representation)
  std::vector<double> step_times; // every step boundary, starting at 0
  std::vector<double> norms;      // l2 norm at step_times
  EvolveConfig config;
  bool resolution_warning = false;
  // max over steps of log(||u||/||u0||) - 5 t; <= 0 iff the crude bound held
  double crude_bound_margin = 0.0;
};

/// Per-step view handed to observers; position-space materializations are
/// computed on demand.
class StepProbe {
 public:
  StepProbe(double t, const Grid& g, std::span<const cplx> freq);
  double t() const { return t_; }
  const Grid& grid() const { return grid_; }
  std::span<const cplx> freq() const { return freq_; }  // native order
  double norm() const;
  WaveField position() const;
  WaveField momentum_position() const;  // p u in position space

 private:
  double t_;
  const Grid& grid_;
  std::span<const cplx> freq_;
};

using StepObserver = std::function<void(const StepProbe&)>;

/// e^{-itH0} f, exact multiplier; any real t.
WaveField free_evolve(const WaveField& f, double t);

/// Contracting conjugated free flow at elapsed time t >= 0 (see the branch
/// conventions in operators.hpp); rejects t < 0.
WaveField conjugated_free_evolve(const WaveField& f, double t, double alpha,
                                 Branch branch);

/// Operator norm of the conjugated flow on the grid = max_k |multiplier|,
/// attained at xi = 0, equal to exp(-alpha (4 - alpha^2) t).
double conjugated_flow_opnorm(const Grid& g, double t, double alpha,
                              Branch branch);

Trajectory evolve(const WaveField& f, const EvolveConfig& cfg,
                  const StepObserver& observer = {});

/// N x N matrix of apply(tag, .) built column-by-column; N <= 2048.
Eigen::MatrixXcd dense_generator(const Grid& g, GeneratorTag tag,
                                 double coupling = 1.0);

/// e^{M} by Pade-13 with scaling and squaring; refuses > 60 squarings.
Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& M);

/// e^{-itA} f through matrix_exponential; independent of the stepper path.
WaveField matrix_exponential_oracle(const Eigen::MatrixXcd& A, double t,
                                    const WaveField& f);

}  // namespace lkdv
