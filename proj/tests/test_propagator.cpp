#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "lkdv/propagator.hpp"
#include "lkdv/seeds.hpp"

using namespace lkdv;

namespace {

double rel_diff(const WaveField& a, const WaveField& b) {
  WaveField d = a;
  for (size_t j = 0; j < d.values.size(); ++j) d.values[j] -= b.values[j];
  const double nb = l2_norm(b);
  return nb > 0 ? l2_norm(d) / nb : l2_norm(d);
}

}  // namespace

TEST_CASE("free flow: identity at t=0, unitary, invertible") {
  const Grid g = make_grid(30.0, 256);
  const WaveField f = make_gaussian(g, 0.0, 1.0, 1.0);
  CHECK(rel_diff(free_evolve(f, 0.0), f) == 0.0);
  for (double t : {-100.0, -3.7, 0.9, 100.0}) {
    const WaveField u = free_evolve(f, t);
    CHECK(l2_norm(u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rel_diff(free_evolve(u, -t), f) <= 1e-12);
  }
}

TEST_CASE("free flow: grid mode picks up the symbol phase") {
  const Grid g = make_grid(8.0 * std::numbers::pi, 64);
  WaveField mode = zero_field(g);
  for (int j = 0; j < g.N(); ++j)
    mode.values[j] = std::exp(cplx{0.0, g.x()[j]});  // k = 1 on this grid
  const WaveField moved = free_evolve(mode, 0.7);
  const cplx expected = std::exp(cplx{0.0, 5.0 * 0.7});  // h0(1) = -5
  for (int j : {0, 17, 40})
    CHECK(std::abs(moved.values[j] / mode.values[j] - expected) <= 1e-12);
}

TEST_CASE("conjugated flow: contraction, operator norm, branch symmetry") {
  const Grid g = make_grid(30.0, 256);
  const WaveField f = make_gaussian(g, 0.0, 1.0);
  CHECK(rel_diff(conjugated_free_evolve(f, 0.0, 0.7, Branch::plus), f) == 0.0);
  CHECK_THROWS_AS(conjugated_free_evolve(f, -0.1, 0.7, Branch::plus),
                  PreconditionError);

  CHECK(conjugated_flow_opnorm(g, 2.0, 1.0, Branch::plus) ==
        doctest::Approx(std::exp(-6.0)).epsilon(1e-12));
  // opnorm equals the max multiplier modulus; rate alpha(4-alpha^2) at xi=0
  for (double a : {0.25, 0.5, 1.0})
    for (double t : {0.5, 2.0})
      CHECK(conjugated_flow_opnorm(g, t, a, Branch::minus) ==
            doctest::Approx(std::exp(-a * (4.0 - a * a) * t)).epsilon(1e-12));

  // the two branch flows are conjugate multipliers: equal modulus at every
  // frequency (the phases differ by the odd real part of the symbol)
  const WaveField fp = conjugated_free_evolve(f, 1.3, 0.6, Branch::plus);
  const WaveField fm = conjugated_free_evolve(f, 1.3, 0.6, Branch::minus);
  const auto hp = to_freq(fp);
  const auto hm = to_freq(fm);
  for (size_t k = 0; k < hp.size(); ++k)
    CHECK(std::abs(hp[k]) ==
          doctest::Approx(std::abs(hm[k])).epsilon(1e-10));
}

TEST_CASE("evolve: H0 equals the exact flow, coupling 0 equals free") {
  const Grid g = make_grid(30.0, 256);
  const WaveField f = make_gaussian(g, 0.0, 1.0);
  EvolveConfig cfg{GeneratorTag::H0, 1.0, 1e-2, Scheme::lawson_rk4, 0, 1.0};
  CHECK(rel_diff(evolve(f, cfg).states.back(), free_evolve(f, 1.0)) <= 1e-12);

  EvolveConfig cfg2{GeneratorTag::H, 1.0, 1e-2, Scheme::lawson_rk4, 0, 0.0};
  CHECK(rel_diff(evolve(f, cfg2).states.back(), free_evolve(f, 1.0)) <= 1e-12);
}

TEST_CASE("evolve: Lawson-RK4 matches the dense oracle at order 4") {
  const Grid g = make_grid(12.0, 64);
  const WaveField f = make_gaussian(g, 0.0, 1.0);
  const Eigen::MatrixXcd A = dense_generator(g, GeneratorTag::H);
  const WaveField oracle = matrix_exponential_oracle(A, 1.0, f);

  EvolveConfig cfg{GeneratorTag::H, 1.0, 1e-3, Scheme::lawson_rk4, 0, 1.0};
  CHECK(rel_diff(evolve(f, cfg).states.back(), oracle) <= 1e-6);

  // dense_oracle scheme goes through the same exponential
  EvolveConfig cfg3{GeneratorTag::H, 1.0, 1e-3, Scheme::dense_oracle, 0, 1.0};
  CHECK(rel_diff(evolve(f, cfg3).states.back(), oracle) <= 1e-12);

  // adjoint flow against the adjoint oracle
  EvolveConfig cfga{GeneratorTag::Hstar, 1.0, 1e-3, Scheme::lawson_rk4, 0, 1.0};
  const WaveField oracle_star =
      matrix_exponential_oracle(A.adjoint(), 1.0, f);
  CHECK(rel_diff(evolve(f, cfga).states.back(), oracle_star) <= 1e-6);
}

TEST_CASE("evolve: snapshots, per-step norms, remainder padding") {
  const Grid g = make_grid(16.0, 128);
  const WaveField f = make_gaussian(g, 0.0, 1.0);
  EvolveConfig cfg{GeneratorTag::H, 0.35, 1e-2, Scheme::lawson_rk4, 10, 1.0};
  const Trajectory traj = evolve(f, cfg);
  // 35 whole steps: t = 0, .1, .2, .3 snapshots plus the final time
  REQUIRE(traj.times.size() >= 2);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(0.35).epsilon(1e-14));
  CHECK(traj.step_times.size() == traj.norms.size());
  CHECK(traj.step_times.size() == 36);
  CHECK(std::is_sorted(traj.times.begin(), traj.times.end()));

  // non-divisible horizon pads the final step
  EvolveConfig cfg2{GeneratorTag::H, 0.105, 1e-2, Scheme::lawson_rk4, 0, 1.0};
  const Trajectory t2 = evolve(f, cfg2);
  CHECK(t2.step_times.back() == doctest::Approx(0.105).epsilon(1e-14));
}

TEST_CASE("evolve: Htilde0 generator is unitary to 1e-8 over T=10") {
  const Grid g = make_grid(30.0, 256);
  const WaveField f = make_gaussian(g, 0.0, 1.0, 1.0);
  EvolveConfig cfg{GeneratorTag::Htilde0, 10.0, 2.5e-4, Scheme::lawson_rk4, 0, 1.0};
  const Trajectory traj = evolve(f, cfg);
  for (double n : traj.norms) CHECK(std::abs(n - 1.0) <= 1e-8);
  CHECK(traj.crude_bound_margin <= 0.0);
}

TEST_CASE("evolve: adjoint duality of the flows") {
  // <e^{-itH} u, v> = <u, e^{+itH*} v>; the right side runs NegHstar.
  const Grid g = make_grid(30.0, 256);
  const WaveField u = make_gaussian(g, 1.0, 1.2);
  const WaveField v = make_gaussian(g, -2.0, 0.9, 1.0);
  EvolveConfig cu{GeneratorTag::H, 1.0, 5e-4, Scheme::lawson_rk4, 0, 1.0};
  EvolveConfig cv{GeneratorTag::NegHstar, 1.0, 5e-4, Scheme::lawson_rk4, 0, 1.0};
  const cplx a = inner(evolve(u, cu).states.back(), v);
  const cplx b = inner(u, evolve(v, cv).states.back());
  CHECK(std::abs(a - b) <= 1e-8 * std::abs(a));
}

TEST_CASE("evolve: forward then backward returns the seed") {
  const Grid g = make_grid(30.0, 256);
  const WaveField f = make_gaussian(g, 0.0, 1.0);
  EvolveConfig fwd{GeneratorTag::H, 5.0, 5e-4, Scheme::lawson_rk4, 0, 1.0};
  EvolveConfig bwd{GeneratorTag::NegH, 5.0, 5e-4, Scheme::lawson_rk4, 0, 1.0};
  const WaveField back = evolve(evolve(f, fwd).states.back(), bwd).states.back();
  CHECK(rel_diff(back, f) <= 1e-6);
}

TEST_CASE("evolve: instability detector aborts instead of spraying NaNs") {
  // grossly overdriven coupling at a coarse step blows the scheme up
  const Grid g = make_grid(30.0, 256);
  const WaveField f = make_gaussian(g, 0.0, 1.0);
  EvolveConfig cfg{GeneratorTag::H, 50.0, 2e-2, Scheme::lawson_rk4, 0, 40.0};
  CHECK_THROWS_AS(evolve(f, cfg), InstabilityError);
}

TEST_CASE("evolve: rejects invalid configs") {
  const Grid g = make_grid(16.0, 64);
  const WaveField f = make_gaussian(g, 0.0, 1.0);
  EvolveConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(evolve(f, cfg), PreconditionError);
  cfg.dt = 1e-2;
  cfg.T = -1.0;
  CHECK_THROWS_AS(evolve(f, cfg), PreconditionError);
}

TEST_CASE("dense generator: guards, Hermitian Htilde0, circulant free case") {
  CHECK_THROWS_AS(dense_generator(make_grid(30.0, 4096), GeneratorTag::H),
                  PreconditionError);
  const Grid g = make_grid(12.0, 64);
  const Eigen::MatrixXcd Ht = dense_generator(g, GeneratorTag::Htilde0);
  CHECK((Ht - Ht.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);

  // coupling 0: exact circulant with symbol eigenvalues
  const Eigen::MatrixXcd H0m = dense_generator(g, GeneratorTag::H, 0.0);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H0m, false);
  std::vector<double> got, want;
  for (int i = 0; i < g.N(); ++i) {
    got.push_back(es.eigenvalues()(i).real());
    want.push_back(h0_symbol(g.xi()[i]));
    CHECK(std::abs(es.eigenvalues()(i).imag()) <= 1e-8);
  }
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  for (size_t i = 0; i < got.size(); ++i)
    CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));

  // matrix action equals apply()
  const WaveField f = make_gaussian(g, 0.0, 1.0);
  const Eigen::MatrixXcd Hm = dense_generator(g, GeneratorTag::H);
  const Eigen::VectorXcd col =
      Hm * Eigen::Map<const Eigen::VectorXcd>(f.values.data(), g.N());
  const WaveField via_apply = apply(GeneratorTag::H, f);
  double worst = 0;
  for (int i = 0; i < g.N(); ++i)
    worst = std::max(worst, std::abs(col(i) - via_apply.values[i]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("matrix exponential: identity, unitarity, semigroup, guard") {
  const Grid g = make_grid(12.0, 64);
  const WaveField f = make_gaussian(g, 0.0, 1.0);
  const Eigen::MatrixXcd A = dense_generator(g, GeneratorTag::H);
  CHECK(rel_diff(matrix_exponential_oracle(A, 0.0, f), f) <= 1e-13);

  const Eigen::MatrixXcd Ht = dense_generator(g, GeneratorTag::Htilde0);
  CHECK(l2_norm(matrix_exponential_oracle(Ht, 1.0, f)) ==
        doctest::Approx(1.0).epsilon(1e-10));

  const WaveField one_go = matrix_exponential_oracle(A, 1.0, f);
  const WaveField two_go = matrix_exponential_oracle(
      A, 0.5, matrix_exponential_oracle(A, 0.5, f));
  CHECK(rel_diff(one_go, two_go) <= 1e-9);

  // squaring guard: a norm beyond 2^60 theta must refuse
  Eigen::MatrixXcd huge = Eigen::MatrixXcd::Identity(4, 4) * 1e20;
  CHECK_THROWS_AS(matrix_exponential(huge), PreconditionError);
}
