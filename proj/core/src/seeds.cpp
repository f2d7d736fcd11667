#include "lkdv/seeds.hpp"

#include <cmath>
#include <random>

namespace lkdv {

namespace {
void normalize(WaveField& f) {
  const double n = l2_norm(f);
  if (n > 0.0)
    for (auto& v : f.values) v /= n;
}
}  // namespace

WaveField make_gaussian(const Grid& g, double x0, double sigma, double k) {
  WaveField f = zero_field(g);
  for (int j = 0; j < g.N(); ++j) {
    const double x = g.x()[j];
    const double env = std::exp(-(x - x0) * (x - x0) / (2.0 * sigma * sigma));
    f.values[static_cast<size_t>(j)] = env * std::exp(cplx{0.0, k * x});
  }
  normalize(f);
  return f;
}

WaveField make_sech_seed(const Grid& g, double beta) {
  if (!(beta > 0.0)) throw PreconditionError("make_sech_seed: beta > 0");
  WaveField f = zero_field(g);
  for (int j = 0; j < g.N(); ++j)
    f.values[static_cast<size_t>(j)] = 1.0 / std::cosh(beta * g.x()[j]);
  normalize(f);
  return f;
}

WaveField make_band_limited_random(const Grid& g, uint64_t rng_seed,
                                   double xi_max, double envelope) {
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = g.N();
  std::vector<cplx> freq(static_cast<size_t>(n), cplx{0.0, 0.0});
  // Draw in symmetric xi order so the sequence is stable for a fixed grid.
  for (int i = 0; i < n; ++i) {
    const int k = (i + n / 2) % n;
    const double xi = g.xi()[k];
    if (std::abs(xi) <= xi_max) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      freq[static_cast<size_t>(k)] = cplx{re, im};
    }
  }
  WaveField f = from_freq(g, std::move(freq));
  for (int j = 0; j < n; ++j) {
    const double x = g.x()[j];
    f.values[static_cast<size_t>(j)] *=
        std::exp(-x * x / (2.0 * envelope * envelope));
  }
  normalize(f);
  return f;
}

std::vector<Seed> make_battery(const Grid& g, uint64_t rng_seed) {
  std::vector<Seed> seeds;
  seeds.push_back({"gauss_c0", make_gaussian(g, 0.0, 1.0)});
  seeds.push_back({"gauss_p5", make_gaussian(g, 5.0, 1.0)});
  seeds.push_back({"gauss_m5", make_gaussian(g, -5.0, 1.0)});
  seeds.push_back({"gauss_k1", make_gaussian(g, 0.0, 1.0, 1.0)});
  seeds.push_back({"gauss_k3", make_gaussian(g, 0.0, 1.0, 3.0)});
  seeds.push_back({"rand_a", make_band_limited_random(g, 0xA11CE + rng_seed)});
  seeds.push_back({"rand_b", make_band_limited_random(g, 0xB0B00 + rng_seed)});
  return seeds;
}

}  // namespace lkdv
