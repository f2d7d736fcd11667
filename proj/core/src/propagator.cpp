#include "lkdv/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lkdv {

const char* to_string(Scheme s) {
  return s == Scheme::lawson_rk4 ? "lawson_rk4" : "dense_oracle";
}

Scheme scheme_from_string(std::string_view s) {
  if (s == "lawson_rk4") return Scheme::lawson_rk4;
  if (s == "dense_oracle") return Scheme::dense_oracle;
  throw PreconditionError("unknown scheme: " + std::string(s));
}

InstabilityError::InstabilityError(double t, double log_ratio)
    : std::runtime_error("instability detected at t = " + std::to_string(t) +
                         " (log norm ratio " + std::to_string(log_ratio) +
                         " exceeds 6t)"),
      t_(t),
      log_ratio_(log_ratio) {}

StepProbe::StepProbe(double t, const Grid& g, std::span<const cplx> freq)
    : t_(t), grid_(g), freq_(freq) {}

double StepProbe::norm() const { return l2_norm_freq(grid_, freq_); }

WaveField StepProbe::position() const {
  std::vector<cplx> buf(freq_.begin(), freq_.end());
  return from_freq(grid_, std::move(buf));
}

WaveField StepProbe::momentum_position() const {
  const auto xi = grid_.xi();
  std::vector<cplx> buf(freq_.size());
  for (size_t k = 0; k < buf.size(); ++k) buf[k] = xi[k] * freq_[k];
  return from_freq(grid_, std::move(buf));
}

WaveField free_evolve(const WaveField& f, double t) {
  if (t == 0.0) return f;
  const auto xi = f.grid.xi();
  std::vector<cplx> m(f.values.size());
  for (size_t k = 0; k < m.size(); ++k)
    m[k] = std::exp(cplx{0.0, -t * h0_symbol(xi[k])});
  return apply_multiplier(f, m);
}

namespace {

cplx conjugated_multiplier(double xi, double t, double alpha, Branch branch) {
  const cplx sym = conjugated_symbol(xi, alpha, branch);
  // plus branch: e^{-it c+}; minus branch: e^{+it c-}.  Both contract.
  const double s = (branch == Branch::plus) ? -1.0 : 1.0;
  return std::exp(cplx{0.0, s * t} * sym);
}

}  // namespace

WaveField conjugated_free_evolve(const WaveField& f, double t, double alpha,
                                 Branch branch) {
  if (t < 0.0)
    throw PreconditionError(
        "conjugated_free_evolve: t must be >= 0 (the contracting direction)");
  if (t == 0.0) return f;
  const auto xi = f.grid.xi();
  std::vector<cplx> m(f.values.size());
  for (size_t k = 0; k < m.size(); ++k)
    m[k] = conjugated_multiplier(xi[k], t, alpha, branch);
  return apply_multiplier(f, m);
}

double conjugated_flow_opnorm(const Grid& g, double t, double alpha,
                              Branch branch) {
  if (t < 0.0) throw PreconditionError("conjugated_flow_opnorm: t must be >= 0");
  double best = 0.0;
  for (double xi : g.xi())
    best = std::max(best, std::abs(conjugated_multiplier(xi, t, alpha, branch)));
  return best;
}

namespace {

// One Lawson-RK4 macro-step expressed with relative multipliers only:
//   A = N(u);       U2 = E2 (u + h/2 A);   B = N(U2)
//   U3 = E2 u + h/2 B;                     C = N(U3)
//   U4 = E u + h E2 C;                     D = N(U4)
//   u' = E u + h/6 (E A + 2 E2 (B + C) + D)
// where E = exp(h Lhat), E2 = exp(h/2 Lhat), Lhat(xi) = -i s h0(xi), and
// N(u) = -i s (potential part); s = +1 for H-family, -1 for Neg tags.
struct LawsonStepper {
  const OperatorTable& op;
  GeneratorTag tag;
  double sign;  // s above
  std::vector<cplx> E, E2;
  std::vector<cplx> a, b, c, d, u2, scratch;
  double h = 0.0;

  LawsonStepper(const OperatorTable& table, GeneratorTag t)
      : op(table), tag(t) {
    sign = (t == GeneratorTag::NegH || t == GeneratorTag::NegHstar) ? -1.0 : 1.0;
    const size_t n = static_cast<size_t>(op.grid().N());
    E.resize(n);
    E2.resize(n);
    a.resize(n);
    b.resize(n);
    c.resize(n);
    d.resize(n);
    u2.resize(n);
    scratch.resize(n);
  }

  void set_step(double step) {
    if (step == h) return;
    h = step;
    const auto h0 = op.h0();
    for (size_t k = 0; k < E.size(); ++k) {
      E[k] = std::exp(cplx{0.0, -sign * h * h0[k]});
      E2[k] = std::exp(cplx{0.0, -sign * 0.5 * h * h0[k]});
    }
  }

  // dst = N(src): -i s (interaction)
  void rhs(std::span<const cplx> src, std::span<cplx> dst) {
    op.interaction_freq(tag, src, dst, scratch);
    const cplx factor{0.0, -sign};
    for (auto& v : dst) v *= factor;
  }

  void step(std::vector<cplx>& u) {
    const size_t n = u.size();
    rhs(u, a);
    for (size_t k = 0; k < n; ++k) u2[k] = E2[k] * (u[k] + 0.5 * h * a[k]);
    rhs(u2, b);
    for (size_t k = 0; k < n; ++k) u2[k] = E2[k] * u[k] + 0.5 * h * b[k];
    rhs(u2, c);
    for (size_t k = 0; k < n; ++k)
      u2[k] = E[k] * u[k] + h * E2[k] * c[k];
    rhs(u2, d);
    for (size_t k = 0; k < n; ++k)
      u[k] = E[k] * u[k] +
             h / 6.0 * (E[k] * a[k] + 2.0 * E2[k] * (b[k] + c[k]) + d[k]);
  }
};

}  // namespace

Trajectory evolve(const WaveField& f, const EvolveConfig& cfg,
                  const StepObserver& observer) {
  if (!(cfg.dt > 0.0)) throw PreconditionError("evolve: dt must be positive");
  if (cfg.T < 0.0) throw PreconditionError("evolve: T must be >= 0");

  const Grid& g = f.grid;
  Trajectory traj;
  traj.config = cfg;
  traj.resolution_warning = !resolution_ok(f);

  // Step layout: n whole steps of dt; if T/dt is not an integer to 1 ULP the
  // last step is padded with the remainder.
  long long n_steps = std::llround(cfg.T / cfg.dt);
  double remainder = 0.0;
  if (std::abs(n_steps * cfg.dt - cfg.T) >
      4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, cfg.T)) {
    n_steps = static_cast<long long>(std::floor(cfg.T / cfg.dt));
    remainder = cfg.T - n_steps * cfg.dt;
    if (remainder < 1e-14 * std::max(1.0, cfg.T)) remainder = 0.0;
  }

  if (cfg.scheme == Scheme::dense_oracle) {
    if (g.N() > 2048)
      throw PreconditionError("evolve: dense_oracle guarded to N <= 2048");
    const Eigen::MatrixXcd A = dense_generator(g, cfg.generator, cfg.coupling);
    const int stride = cfg.record_every > 0 ? cfg.record_every : 0;
    WaveField u = f;
    const double n0 = l2_norm(u);
    traj.step_times.push_back(0.0);
    traj.norms.push_back(n0);
    traj.times.push_back(0.0);
    traj.states.push_back(u);
    if (observer) observer(StepProbe(0.0, g, to_freq(u)));
    // march in record-stride chunks, all through the one exponential
    double t = 0.0;
    const double chunk = stride > 0 ? stride * cfg.dt : cfg.T;
    const Eigen::MatrixXcd U = matrix_exponential(cplx{0.0, -chunk} * A);
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(
        u.values.data(), static_cast<long>(u.values.size()));
    while (t < cfg.T - 1e-12 * std::max(1.0, cfg.T)) {
      const double next = std::min(cfg.T, t + chunk);
      if (next - t < chunk - 1e-12) {
        const Eigen::MatrixXcd Ulast =
            matrix_exponential(cplx{0.0, -(next - t)} * A);
        v = (Ulast * v).eval();
      } else {
        v = (U * v).eval();
      }
      t = next;
      std::copy(v.data(), v.data() + v.size(), u.values.begin());
      traj.step_times.push_back(t);
      traj.norms.push_back(l2_norm(u));
      traj.times.push_back(t);
      traj.states.push_back(u);
      if (observer) observer(StepProbe(t, g, to_freq(u)));
    }
    return traj;
  }

  OperatorTable table(g, cfg.coupling);
  LawsonStepper stepper(table, cfg.generator);
  stepper.set_step(cfg.dt);

  std::vector<cplx> u = to_freq(f);
  const double n0 = l2_norm_freq(g, u);
  const double log_n0 = (n0 > 0.0) ? std::log(n0) : 0.0;

  traj.step_times.reserve(static_cast<size_t>(n_steps) + 2);
  traj.norms.reserve(static_cast<size_t>(n_steps) + 2);
  traj.step_times.push_back(0.0);
  traj.norms.push_back(n0);

  auto record_state = [&](double t) {
    std::vector<cplx> buf = u;
    traj.times.push_back(t);
    traj.states.push_back(from_freq(g, std::move(buf)));
  };
  record_state(0.0);
  if (observer) observer(StepProbe(0.0, g, u));

  double t = 0.0;
  double margin = (n0 > 0.0) ? -0.0 : 0.0;
  const long long total = n_steps + (remainder > 0.0 ? 1 : 0);
  for (long long i = 1; i <= total; ++i) {
    if (i == n_steps + 1) stepper.set_step(remainder);
    stepper.step(u);
    t = (i <= n_steps) ? i * cfg.dt : cfg.T;

    const double norm = l2_norm_freq(g, u);
    traj.step_times.push_back(t);
    traj.norms.push_back(norm);
    if (n0 > 0.0) {
      const double log_ratio =
          std::isfinite(norm) && norm > 0.0 ? std::log(norm) - log_n0
                                            : std::numeric_limits<double>::infinity();
      if (!std::isfinite(norm) || log_ratio > 6.0 * t + 1e-2)
        throw InstabilityError(t, log_ratio);
      margin = std::max(margin, log_ratio - 5.0 * t);
    }

    const bool last = (i == total);
    if ((cfg.record_every > 0 && i % cfg.record_every == 0 && !last) || last)
      record_state(t);
    if (observer) observer(StepProbe(t, g, u));
  }
  traj.crude_bound_margin = margin;
  return traj;
}

Eigen::MatrixXcd dense_generator(const Grid& g, GeneratorTag tag,
                                 double coupling) {
  const int n = g.N();
  if (n > 2048)
    throw PreconditionError("dense_generator: guarded to N <= 2048");
  OperatorTable table(g, coupling);
  Eigen::MatrixXcd A(n, n);
  WaveField basis = zero_field(g);
  for (int j = 0; j < n; ++j) {
    basis.values[static_cast<size_t>(j)] = 1.0;
    const WaveField col = table.apply(tag, basis);
    for (int i = 0; i < n; ++i) A(i, j) = col.values[static_cast<size_t>(i)];
    basis.values[static_cast<size_t>(j)] = 0.0;
  }
  return A;
}

Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& M) {
  // Pade-13 with scaling and squaring (Higham 2005).
  static constexpr double kTheta13 = 5.371920351148152;
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0,
                                 7771770303897600.0,  1187353796428800.0,
                                 129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,
                                 1323241920.0,        40840800.0,
                                 960960.0,            16380.0,
                                 182.0,               1.0};
  const long n = M.rows();
  if (M.cols() != n) throw PreconditionError("matrix_exponential: square only");

  const double norm1 = M.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
    if (squarings > 60)
      throw PreconditionError(
          "matrix_exponential: scaling would exceed 60 squarings");
  }
  const Eigen::MatrixXcd A = M / std::pow(2.0, squarings);

  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd A2 = A * A;
  const Eigen::MatrixXcd A4 = A2 * A2;
  const Eigen::MatrixXcd A6 = A2 * A4;
  const Eigen::MatrixXcd U =
      A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 +
           b[5] * A4 + b[3] * A2 + b[1] * I);
  const Eigen::MatrixXcd V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) +
                             b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
  Eigen::MatrixXcd R = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < squarings; ++i) R = (R * R).eval();
  return R;
}

WaveField matrix_exponential_oracle(const Eigen::MatrixXcd& A, double t,
                                    const WaveField& f) {
  if (A.rows() > 2048)
    throw PreconditionError("matrix_exponential_oracle: guarded to N <= 2048");
  if (A.rows() != static_cast<long>(f.values.size()))
    throw PreconditionError("matrix_exponential_oracle: size mismatch");
  const Eigen::MatrixXcd U = matrix_exponential(cplx{0.0, -t} * A);
  const Eigen::VectorXcd v =
      U * Eigen::Map<const Eigen::VectorXcd>(f.values.data(),
                                             static_cast<long>(f.values.size()));
  WaveField out = f;
  std::copy(v.data(), v.data() + v.size(), out.values.begin());
  return out;
}

}  // namespace lkdv
