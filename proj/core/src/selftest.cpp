#include "lkdv/selftest.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>

#include "lkdv/analysis.hpp"
#include "lkdv/spectral.hpp"

namespace lkdv {

namespace {

struct Harness {
  std::ostream& out;
  int failures = 0;

  void check(const std::string& name, bool ok) {
    out << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  }
  void close(const std::string& name, double got, double want, double tol) {
    const bool ok = std::abs(got - want) <= tol;
    out << (ok ? "[ok]   " : "[FAIL] ") << name << " (got " << got
        << ", want " << want << " +- " << tol << ")\n";
    if (!ok) ++failures;
  }
  void expect_throw(const std::string& name, const std::function<void()>& f) {
    bool threw = false;
    try {
      f();
    } catch (const PreconditionError&) {
      threw = true;
    }
    check(name, threw);
  }
};

double rel_diff(const WaveField& a, const WaveField& b) {
  WaveField d = a;
  for (size_t j = 0; j < d.values.size(); ++j) d.values[j] -= b.values[j];
  const double nb = l2_norm(b);
  return nb > 0 ? l2_norm(d) / nb : l2_norm(d);
}

}  // namespace

int run_selftest(std::ostream& out) {
  Harness h{out};
  out << std::setprecision(12);

  // grid
  {
    const Grid g = make_grid(std::numbers::pi, 8);
    h.close("grid: x spacing at L=pi,N=8", g.dx(), std::numbers::pi / 4, 1e-15);
    h.close("grid: x[0] = -L", g.x()[0], -std::numbers::pi, 1e-15);
    h.close("grid: xi spacing = pi/L", g.xi()[1] - g.xi()[0], 1.0, 1e-15);
    h.close("grid: xi at Nyquist bin = -N/2*pi/L", g.xi()[4], -4.0, 1e-15);
    const Grid g2 = make_grid(10.0, 8);
    h.close("grid: dx at L=10,N=8", g2.dx(), 2.5, 1e-15);
    h.close("grid: xi spacing at L=10", g2.xi()[1], std::numbers::pi / 10, 1e-15);
    h.expect_throw("grid: odd N rejected", [] { make_grid(10.0, 7); });
    h.expect_throw("grid: N < 8 rejected", [] { make_grid(10.0, 4); });
    h.expect_throw("grid: L <= 0 rejected", [] { make_grid(0.0, 16); });

    h.close("norm: zero field", l2_norm(zero_field(g)), 0.0, 0.0);
    WaveField ones = zero_field(make_grid(1.0, 8));
    for (auto& v : ones.values) v = 1.0;
    h.close("norm: constant 1 on L=1 gives sqrt(2)", l2_norm(ones),
            std::sqrt(2.0), 1e-14);
    h.close("weighted norm: exp_abs on zero field",
            weighted_norm(zero_field(g), ExpAbsWeight{1.0}), 0.0, 0.0);
    h.close("weighted norm: <x>^-1 weight at x=0 is 1",
            1.0 / std::sqrt(1.0 + 0.0), 1.0, 0.0);
    h.expect_throw("weighted norm: alpha <= 0 rejected",
                   [&] { weighted_norm(ones, ExpAbsWeight{0.0}); });
  }

  // operators
  {
    h.close("potential: V(0) = 1", potential(0.0), 1.0, 0.0);
    h.check("potential: decays monotonically",
            potential(1.0) > potential(2.0) && potential(2.0) > potential(3.0) &&
                potential(-1.0) > potential(-2.0));
    h.close("potential: underflow-safe at x=400", potential(400.0), 0.0, 0.0);
    h.close("potential derivative: odd, V'(0) = 0", deriv_potential(0.0), 0.0,
            0.0);
    h.close("h0 symbol: xi=0", h0_symbol(0.0), 0.0, 0.0);
    h.close("h0 symbol: xi=1 -> -5", h0_symbol(1.0), -5.0, 0.0);
    h.close("h0 symbol: xi=-2 -> 16", h0_symbol(-2.0), 16.0, 0.0);
    const cplx c0 = conjugated_symbol(0.0, 1.0, Branch::plus);
    h.close("conjugated symbol: xi=0, alpha=1 -> -3i (flow e^{-3t})",
            std::abs(c0 - cplx{0.0, -3.0}), 0.0, 1e-15);
    const cplx small = conjugated_symbol(1.5, 1e-9, Branch::plus);
    h.close("conjugated symbol: alpha->0 reduces to h0",
            std::abs(small - cplx{h0_symbol(1.5), 0.0}), 0.0, 1e-7);

    const Grid g = make_grid(30.0, 256);
    const WaveField zero = zero_field(g);
    for (GeneratorTag tag :
         {GeneratorTag::H0, GeneratorTag::H, GeneratorTag::Hstar,
          GeneratorTag::Htilde0, GeneratorTag::NegH, GeneratorTag::NegHstar})
      if (l2_norm(apply(tag, zero)) != 0.0) h.check("apply: zero field", false);
    h.check("apply: zero field stays zero", true);

    // H = Htilde0 - 6i V' pointwise; the product band must be resolved, so
    // this runs on the default desk-scale grid.
    const Grid gd = make_grid(30.0, 1024);
    const WaveField f = make_gaussian(gd, 0.0, 1.0, 1.0);
    WaveField lhs = apply(GeneratorTag::H, f);
    WaveField rhs = apply(GeneratorTag::Htilde0, f);
    for (size_t j = 0; j < rhs.values.size(); ++j)
      rhs.values[j] -= cplx{0.0, 6.0} * deriv_potential(gd.x()[j]) * f.values[j];
    h.close("decomposition H = Htilde0 - 6iV'", rel_diff(lhs, rhs), 0.0, 1e-12);

    // single-mode eigenrelation for H0
    WaveField mode = zero_field(g);
    const double k = g.xi()[3];
    for (int j = 0; j < g.N(); ++j)
      mode.values[static_cast<size_t>(j)] = std::exp(cplx{0.0, k * g.x()[j]});
    WaveField hm = apply(GeneratorTag::H0, mode);
    for (auto& v : hm.values) v /= h0_symbol(k);
    h.close("apply(H0) on e^{ikx} = h0(k) e^{ikx}", rel_diff(hm, mode), 0.0,
            1e-12);
  }

  // propagator
  {
    const Grid g = make_grid(30.0, 256);
    const WaveField f = make_gaussian(g, 0.0, 1.0);
    h.close("free flow: t=0 is the identity", rel_diff(free_evolve(f, 0.0), f),
            0.0, 0.0);
    for (double t : {-100.0, -1.0, 0.5, 100.0})
      if (std::abs(l2_norm(free_evolve(f, t)) - 1.0) > 1e-12)
        h.check("free flow norm preservation", false);
    h.check("free flow: norm preserved on [-100, 100]", true);

    // single mode k=1 picks up e^{+5it} (h0(1) = -5); k=1 is a grid frequency
    // when L is a multiple of pi
    const Grid gp = make_grid(8.0 * std::numbers::pi, 64);
    WaveField mode = zero_field(gp);
    for (int j = 0; j < gp.N(); ++j)
      mode.values[static_cast<size_t>(j)] = std::exp(cplx{0.0, gp.x()[j]});
    const WaveField moved = free_evolve(mode, 0.7);
    const cplx expect = std::exp(cplx{0.0, 0.7 * 5.0});
    h.close("free flow: mode k=1 phase e^{5it}",
            std::abs(moved.values[10] / mode.values[10] - expect), 0.0, 1e-12);

    h.close("conjugated flow: t=0 identity",
            rel_diff(conjugated_free_evolve(f, 0.0, 1.0, Branch::plus), f), 0.0,
            0.0);
    h.close("conjugated flow opnorm at alpha=1, t=2 is e^{-6}",
            conjugated_flow_opnorm(g, 2.0, 1.0, Branch::plus), std::exp(-6.0),
            1e-12);
    h.expect_throw("conjugated flow: t<0 refused", [&] {
      conjugated_free_evolve(f, -1.0, 1.0, Branch::plus);
    });

    EvolveConfig cfg{GeneratorTag::H0, 1.0, 1e-2, Scheme::lawson_rk4, 0, 1.0};
    const Trajectory traj = evolve(f, cfg);
    h.close("evolve: H0 stepper matches the exact free flow",
            rel_diff(traj.states.back(), free_evolve(f, 1.0)), 0.0, 1e-12);

    const Grid gs = make_grid(12.0, 64);
    const Eigen::MatrixXcd Ht =
        dense_generator(gs, GeneratorTag::Htilde0);
    h.close("dense Htilde0 is Hermitian",
            (Ht - Ht.adjoint()).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    // H - Hstar = -12i diag(V'): the matrix identity holds on the resolved
    // band (raw delta columns probe frequencies where the product aliases),
    // so compare the actions on band-limited plane waves; L must also keep
    // the periodization kink of V below the tolerance.
    const Grid gc = make_grid(20.0, 512);
    const Eigen::MatrixXcd Hmc = dense_generator(gc, GeneratorTag::H);
    const Eigen::MatrixXcd Hsc = dense_generator(gc, GeneratorTag::Hstar);
    Eigen::MatrixXcd D = Hmc - Hsc;
    for (int j = 0; j < gc.N(); ++j)
      D(j, j) -= cplx{0.0, -12.0} * deriv_potential(gc.x()[j]);
    double worst = 0.0;
    for (int m = -8; m <= 8; ++m) {
      Eigen::VectorXcd wave(gc.N());
      const double k = m * std::numbers::pi / gc.L();
      for (int j = 0; j < gc.N(); ++j)
        wave(j) = std::exp(cplx{0.0, k * gc.x()[j]}) / std::sqrt(double(gc.N()));
      worst = std::max(worst, (D * wave).norm());
    }
    // tolerance is relative to the operator scale |h0(xi_max)|, the dynamic
    // range the dense columns are built through
    const double scale = std::abs(h0_symbol(gc.xi()[gc.N() / 2]));
    h.close("dense H - Hstar = -12i diag(V') on the resolved band (rel)",
            worst / scale, 0.0, 1e-12);

    // coupling 0 leaves the diagonalizable free operator
    const Eigen::MatrixXcd Hm = dense_generator(gs, GeneratorTag::H);
    const Eigen::MatrixXcd H0m = dense_generator(gs, GeneratorTag::H, 0.0);
    double offcirc = 0.0;
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(gs.N());
    (void)e0;
    // eigenvalues of the free matrix are exactly the symbol values
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H0m, false);
    std::vector<double> got, want;
    for (int i = 0; i < gs.N(); ++i) got.push_back(es.eigenvalues()(i).real());
    for (int i = 0; i < gs.N(); ++i) want.push_back(h0_symbol(gs.xi()[i]));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (int i = 0; i < gs.N(); ++i)
      offcirc = std::max(offcirc, std::abs(got[static_cast<size_t>(i)] -
                                           want[static_cast<size_t>(i)]));
    h.close("dense H at coupling 0 has symbol eigenvalues", offcirc, 0.0, 1e-8);

    const WaveField fs = make_gaussian(gs, 0.0, 1.0);
    h.close("matrix exponential: t=0 identity",
            rel_diff(matrix_exponential_oracle(Hm, 0.0, fs), fs), 0.0, 1e-13);
    h.close("matrix exponential: Hermitian generator preserves norm",
            l2_norm(matrix_exponential_oracle(Ht, 1.0, fs)), l2_norm(fs), 1e-10);
    const WaveField one_go = matrix_exponential_oracle(Hm, 1.0, fs);
    const WaveField two_go = matrix_exponential_oracle(
        Hm, 0.5, matrix_exponential_oracle(Hm, 0.5, fs));
    h.close("matrix exponential: semigroup at t=s=0.5",
            rel_diff(one_go, two_go), 0.0, 1e-9);
  }

  // analysis
  {
    const Grid g = make_grid(30.0, 256);
    const std::vector<Seed> battery = {{"gauss_c0", make_gaussian(g, 0, 1)}};
    const StabilityReport free_scan =
        stability_scan(battery, 2.0, 1e-2, GeneratorTag::H, 0.0);
    h.check("stability: free flow ratios pinned to 1",
            std::abs(free_scan.seeds[0].max_ratio - 1.0) < 1e-10 &&
                std::abs(free_scan.seeds[0].min_ratio - 1.0) < 1e-10);
    h.close("stability: free flow rate ~ 0", free_scan.seeds[0].growth_rate,
            0.0, 1e-10);
    const StabilityReport tilde_scan =
        stability_scan(battery, 10.0, 2.5e-4, GeneratorTag::Htilde0);
    h.check("stability: Htilde0 control ratios 1 within 1e-8 over T=10",
            std::abs(tilde_scan.seeds[0].max_ratio - 1.0) < 1e-8 &&
                std::abs(tilde_scan.seeds[0].min_ratio - 1.0) < 1e-8);

    const SmoothingReport zs = smoothing_integral(
        zero_field(g), 1.0, Branch::plus, false, {0.5, 1.0}, GeneratorTag::H,
        1e-2);
    h.check("smoothing: zero seed gives zero integrals",
            zs.partial[0] == 0.0 && zs.partial[1] == 0.0);
    const SmoothingReport zf = free_smoothing_integral(
        zero_field(g), FreqFactor{FreqFactor::bracket_theta, 0.0}, {1.0});
    h.check("free smoothing: zero seed gives zero", zf.partial[0] == 0.0);

    // weight domination max_x e^{-|x|} <x> = 1 at x = 0
    double best = 0.0, bx = -1.0;
    for (int i = 0; i <= 4000; ++i) {
      const double x = -20.0 + 0.01 * i;
      const double v = std::exp(-std::abs(x)) * std::sqrt(1.0 + x * x);
      if (v > best) {
        best = v;
        bx = x;
      }
    }
    h.close("weight domination: max e^{-|x|}<x> = 1", best, 1.0, 1e-9);
    h.close("weight domination: attained at x=0", bx, 0.0, 1e-9);

    const WaveField phi = make_gaussian(g, 0.0, 1.0);
    const WaveOperatorReport w0 =
        cook_wave_operator(phi, +1, {0.0}, WaveOperatorOptions{1e-2, 1.0, 2.0});
    h.check("wave operator: Omega(0) phi = phi exactly",
            w0.limit_state.values == phi.values);
    const WaveOperatorReport i0 =
        inverse_wave_check(phi, +1, {0.0}, WaveOperatorOptions{1e-2, 1.0, 2.0});
    h.check("inverse wave: Omega_In(0) phi = phi exactly",
            i0.limit_state.values == phi.values);
  }

  // spectral
  {
    const Grid g = make_grid(12.0, 64);
    const EigenScanReport free_scan = eigen_scan(12.0, 32, GeneratorTag::H, 0.0);
    h.close("eigen scan: coupling 0 eigenvalues are real",
            free_scan.max_abs_imag_coarse, 0.0, 1e-9);
    const EigenScanReport tilde_scan = eigen_scan(12.0, 32, GeneratorTag::Htilde0);
    h.close("eigen scan: Htilde0 eigenvalues real to 1e-10",
            tilde_scan.max_abs_imag_coarse, 0.0, 1e-10);

    const auto sample_free = evans_function({1.0, 1.0}, 15.0, 1e-10,
                                            GeneratorTag::H, 0.0);
    h.close("evans: coupling 0 gives E = 1", std::abs(sample_free.E - 1.0), 0.0,
            1e-10);
    const auto at_i = evans_function({0.0, 1.0});
    h.check("evans: lambda=i splits n+=2, n-=1",
            at_i.n_plus == 2 && at_i.n_minus == 1);
    double cubic_residual = 0.0;
    for (const cplx& mu : at_i.roots)
      cubic_residual = std::max(
          cubic_residual,
          std::abs(mu * mu * mu - 4.0 * mu - cplx{0.0, 1.0} * at_i.lambda));
    h.close("evans: cubic residual", cubic_residual, 0.0, 1e-12);
    // lambda = 0 roots {0, +-2}: guarded out (no gap at the real axis)
    h.expect_throw("evans: real axis refused",
                   [] { evans_function({0.0, 0.0}); });

    const PseudospectrumReport far = pseudospectrum(
        ComplexBox{-1.0, 1.0, 40.0, 42.0}, 3, 3, g, GeneratorTag::H);
    h.check("pseudospectrum: sigma_min positive far from the spectrum",
            far.min_sigma > 1.0);
  }

  out << (h.failures == 0 ? "selftest: all checks passed\n"
                          : "selftest: FAILURES present\n");
  return h.failures;
}

}  // namespace lkdv
