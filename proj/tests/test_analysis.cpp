#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lkdv/analysis.hpp"
#include "support/oracles.hpp"

using namespace lkdv;

TEST_CASE("fit helpers recover known laws") {
  std::vector<double> t, y;
  for (double s = 0.5; s <= 20.0; s += 0.25) {
    t.push_back(s);
    y.push_back(2.0 - 0.125 * s);
  }
  const LineFit lf = fit_line(t, y);
  CHECK(lf.slope == doctest::Approx(-0.125).epsilon(1e-12));
  CHECK(lf.intercept == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lf.residual_rms <= 1e-12);

  std::vector<double> yy;
  for (double s : t) yy.push_back(3.0 * std::pow(s, -0.5) * std::exp(-1.25 * s));
  const DecayLawFit df = fit_decay_law(t, yy, 1.0, 10.0);
  CHECK(df.q == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(df.r == doctest::Approx(1.25).epsilon(1e-9));
  CHECK(std::exp(df.log_c) == doctest::Approx(3.0).epsilon(1e-9));

  // noise floor exclusion drops dead samples
  std::vector<double> t2 = {0.1, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> y2 = {1.0, 0.5, 0.25, 1e-15, 0.0625, 0.03125};
  const DecayLawFit df2 = fit_decay_law(t2, y2, 1.0, 5.0);
  CHECK(df2.samples_used == 4);
}

TEST_CASE("stability scan: free and unitary controls") {
  const Grid g = make_grid(30.0, 256);
  const std::vector<Seed> seeds = {{"g0", make_gaussian(g, 0.0, 1.0)},
                                   {"g1", make_gaussian(g, 2.0, 1.0, 1.0)}};
  const StabilityReport free_run =
      stability_scan(seeds, 2.0, 1e-2, GeneratorTag::H, 0.0);
  for (const auto& s : free_run.seeds) {
    CHECK(std::abs(s.max_ratio - 1.0) <= 1e-10);
    CHECK(std::abs(s.min_ratio - 1.0) <= 1e-10);
    CHECK(std::abs(s.growth_rate) <= 1e-10);
    CHECK(s.max_ratio >= s.min_ratio);
    CHECK(s.min_ratio > 0.0);
    CHECK(s.crude_bound_margin <= 0.0);
  }
  const StabilityReport tilde =
      stability_scan(seeds, 5.0, 2.5e-4, GeneratorTag::Htilde0);
  for (const auto& s : tilde.seeds) {
    CHECK(std::abs(s.max_ratio - 1.0) <= 1e-8);
    CHECK(std::abs(s.min_ratio - 1.0) <= 1e-8);
  }
  CHECK_THROWS_AS(stability_scan({{"z", zero_field(g)}}, 1.0, 1e-2,
                                 GeneratorTag::H),
                  PreconditionError);
}

TEST_CASE("smoothing integrals are nondecreasing with nonnegative tails") {
  const Grid g = make_grid(30.0, 256);
  const WaveField phi = make_gaussian(g, 0.0, 1.0);
  for (Branch b : {Branch::plus, Branch::minus}) {
    for (bool deriv : {false, true}) {
      const SmoothingReport rep = smoothing_integral(
          phi, 1.0, b, deriv, {2.0, 4.0, 8.0}, GeneratorTag::H, 2e-3, 1.0, "g");
      REQUIRE(rep.partial.size() == 3);
      CHECK(std::is_sorted(rep.partial.begin(), rep.partial.end()));
      for (double tail : rep.tail) CHECK(tail >= 0.0);
      for (size_t i = 1; i < rep.s_curve.size(); ++i)
        CHECK(rep.s_curve[i] >= rep.s_curve[i - 1]);
      CHECK(rep.constant_estimate > 0.0);
    }
  }
  const SmoothingReport z = smoothing_integral(
      zero_field(g), 0.5, Branch::plus, false, {1.0}, GeneratorTag::Hstar, 2e-3);
  CHECK(z.partial[0] == 0.0);
  CHECK_THROWS_AS(smoothing_integral(phi, 1.5, Branch::plus, false, {1.0},
                                     GeneratorTag::H, 1e-2),
                  PreconditionError);
  CHECK_THROWS_AS(smoothing_integral(phi, 1.0, Branch::plus, false, {2.0, 1.0},
                                     GeneratorTag::H, 1e-2),
                  PreconditionError);
  CHECK_THROWS_AS(smoothing_integral(phi, 1.0, Branch::plus, false, {1.0},
                                     GeneratorTag::Htilde0, 1e-2),
                  PreconditionError);
}

TEST_CASE("multi-config smoothing equals one-config runs") {
  const Grid g = make_grid(30.0, 256);
  const WaveField phi = make_gaussian(g, 0.0, 1.0);
  const double alphas[] = {0.5, 1.0};
  const bool derivs[] = {false, true};
  const auto multi = smoothing_integral_multi(phi, alphas, derivs, Branch::plus,
                                              {1.0, 2.0}, GeneratorTag::H, 2e-3);
  REQUIRE(multi.size() == 2);
  const auto single0 = smoothing_integral(phi, 0.5, Branch::plus, false,
                                          {1.0, 2.0}, GeneratorTag::H, 2e-3);
  const auto single1 = smoothing_integral(phi, 1.0, Branch::plus, true,
                                          {1.0, 2.0}, GeneratorTag::H, 2e-3);
  for (size_t k = 0; k < 2; ++k) {
    CHECK(multi[0].partial[k] == doctest::Approx(single0.partial[k]).epsilon(1e-14));
    CHECK(multi[1].partial[k] == doctest::Approx(single1.partial[k]).epsilon(1e-14));
  }
}

TEST_CASE("free smoothing: monotone in theta, converging ladder") {
  const Grid g = make_grid(60.0, 512);
  const WaveField phi = make_band_limited_random(g, 99, 3.0, 5.0);
  const std::vector<double> ladder = {5.0, 10.0, 20.0};
  const auto s0 = free_smoothing_integral(
      phi, FreqFactor{FreqFactor::bracket_theta, 0.0}, ladder, 5e-3);
  const auto s05 = free_smoothing_integral(
      phi, FreqFactor{FreqFactor::bracket_theta, 0.5}, ladder, 5e-3);
  const auto s1 = free_smoothing_integral(
      phi, FreqFactor{FreqFactor::bracket_theta, 1.0}, ladder, 5e-3);
  // pointwise multiplier monotonicity <xi>^t0 <= <xi>^t1 lifts to S
  for (size_t k = 0; k < ladder.size(); ++k) {
    CHECK(s0.partial[k] <= s05.partial[k] * (1.0 + 1e-12));
    CHECK(s05.partial[k] <= s1.partial[k] * (1.0 + 1e-12));
  }
  CHECK(std::is_sorted(s1.partial.begin(), s1.partial.end()));

  const auto sabs = free_smoothing_integral(
      phi, FreqFactor{FreqFactor::abs_p, 0.0}, ladder, 5e-3);
  // |xi| <= <xi>^1 pointwise
  for (size_t k = 0; k < ladder.size(); ++k)
    CHECK(sabs.partial[k] <= s1.partial[k] * (1.0 + 1e-12));

  CHECK(free_smoothing_integral(zero_field(g),
                                FreqFactor{FreqFactor::bracket_theta, 0.0},
                                {1.0})
            .partial[0] == 0.0);
  CHECK_THROWS_AS(free_smoothing_integral(
                      phi, FreqFactor{FreqFactor::bracket_theta, 1.2}, {1.0}),
                  PreconditionError);
}

TEST_CASE("decay fit: symbol-level rate is exact across the alpha grid") {
  const Grid g = make_grid(30.0, 256);
  for (int i = 1; i <= 10; ++i) {
    const double a = 0.1 * i;
    const double target = a * (4.0 - a * a);
    for (Branch b : {Branch::plus, Branch::minus})
      CHECK(std::abs(symbol_level_decay_rate(g, a, 1.0, 2.0, b) - target) <=
            1e-10);
  }
}

TEST_CASE("decay fit: state-level windows on the matched Gaussian") {
  const Grid g = make_grid(40.0, 512);
  std::vector<double> t_grid;
  for (double t = 0.0; t <= 10.0 + 1e-9; t += 0.1) t_grid.push_back(t);
  for (double a : {0.5, 1.0}) {
    const WaveField psi = make_gaussian(g, 0.0, std::sqrt(8.0 * a));
    for (int n : {0, 1}) {
      const DecayFitReport rep = decay_fit(a, n, psi, t_grid);
      CHECK(std::abs(rep.fitted_power - 0.5 * n) <= 0.15);
      CHECK(std::abs(rep.fitted_rate - rep.target_rate) <=
            0.05 * rep.target_rate);
    }
  }
  const WaveField psi = make_gaussian(g, 0.0, 2.0);
  CHECK_THROWS_AS(decay_fit(1.5, 0, psi, t_grid), PreconditionError);
  CHECK_THROWS_AS(decay_fit(0.5, 3, psi, t_grid), PreconditionError);
}

TEST_CASE("wave operator: t=0 is exact, increments defined") {
  const Grid g = make_grid(60.0, 512);
  const WaveField phi = make_gaussian(g, 0.0, 1.0);
  WaveOperatorOptions opt;
  opt.dt = 2e-3;
  opt.integrand_t_max = 3.0;
  const WaveOperatorReport rep = cook_wave_operator(phi, +1, {0.0, 1.0, 2.0}, opt);
  CHECK(rep.increments.size() == 2);
  for (double d : rep.increments) CHECK(d >= 0.0);
  CHECK(rep.integrand.front() > 0.0);

  const WaveOperatorReport rep0 = cook_wave_operator(phi, +1, {0.0}, opt);
  CHECK(rep0.limit_state.values == phi.values);

  const WaveOperatorReport inv = inverse_wave_check(phi, +1, {0.0, 1.0, 2.0}, opt);
  CHECK(inv.increments.size() == 2);
  CHECK(inv.scattering_residual >= 0.0);

  CHECK_THROWS_AS(cook_wave_operator(phi, +1, {2.0, 1.0}, opt), PreconditionError);
  CHECK_THROWS_AS(inverse_wave_check(phi, +1, {}, opt), PreconditionError);
}

TEST_CASE("secular zero mode: generic seeds ramp linearly, odd seeds do not") {
  // H V' = 0 carries a Jordan partner, so e^{-itH} phi grows linearly in the
  // V' direction whenever <V, phi> != 0; odd seeds are orthogonal to the
  // (even) adjoint kernel by parity and stay bounded.
  const Grid g = make_grid(30.0, 256);
  EvolveConfig cfg{GeneratorTag::H, 10.0, 1e-3, Scheme::lawson_rk4, 0, 1.0};

  const Trajectory generic = evolve(make_gaussian(g, 0.0, 1.0), cfg);
  CHECK(generic.norms.back() > 10.0);  // measured ramp ~ 4.6 t
  CHECK(generic.crude_bound_margin <= 0.0);

  WaveField odd = make_gaussian(g, 5.0, 1.0);
  const WaveField m = make_gaussian(g, -5.0, 1.0);
  for (size_t j = 0; j < odd.values.size(); ++j) odd.values[j] -= m.values[j];
  const double n = l2_norm(odd);
  for (auto& v : odd.values) v /= n;
  const Trajectory bounded = evolve(odd, cfg);
  double worst = 0;
  for (double r : bounded.norms) worst = std::max(worst, r);
  CHECK(worst < 5.0);
}

TEST_CASE("round trip through the flow is the identity (proof relation)") {
  // || phi || = || e^{+itH} e^{-itH} phi ||, run at desk scale
  const Grid g = make_grid(30.0, 256);
  const WaveField phi = make_gaussian(g, 0.0, 1.0);
  EvolveConfig fwd{GeneratorTag::H, 3.0, 5e-4, Scheme::lawson_rk4, 0, 1.0};
  EvolveConfig bwd{GeneratorTag::NegH, 3.0, 5e-4, Scheme::lawson_rk4, 0, 1.0};
  const WaveField back = evolve(evolve(phi, fwd).states.back(), bwd).states.back();
  WaveField d = back;
  for (size_t j = 0; j < d.values.size(); ++j) d.values[j] -= phi.values[j];
  CHECK(l2_norm(d) <= 1e-6);
}

TEST_CASE("seed battery is deterministic, normalized, resolved") {
  const Grid g = make_grid(30.0, 512);
  const auto b1 = make_battery(g, 7);
  const auto b2 = make_battery(g, 7);
  REQUIRE(b1.size() == b2.size());
  CHECK(b1.size() == 7);
  for (size_t i = 0; i < b1.size(); ++i) {
    CHECK(b1[i].id == b2[i].id);
    CHECK(b1[i].field.values == b2[i].field.values);
    CHECK(l2_norm(b1[i].field) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(resolution_ok(b1[i].field));
  }
  const auto b3 = make_battery(g, 8);
  CHECK(b3[5].field.values != b1[5].field.values);  // rng members move
  CHECK(b3[0].field.values == b1[0].field.values);  // deterministic members fixed
}
