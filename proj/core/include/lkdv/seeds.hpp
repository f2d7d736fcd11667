#pragma once
// The deterministic seed battery used by every experiment: centered and
// shifted Gaussians, modulated Gaussians, and band-limited random fields
// drawn from a fixed-seed PRNG under a Gaussian envelope (so every member is
// an honest proxy for a localized L2 function).  All seeds are normalized.

#include <cstdint>
#include <string>
#include <vector>

#include "lkdv/grid.hpp"

namespace lkdv {

struct Seed {
  std::string id;
  WaveField field;
};

/// exp(ikx) * exp(-(x-x0)^2 / (2 sigma^2)), normalized.
WaveField make_gaussian(const Grid& g, double x0, double sigma, double k = 0.0);

/// sech(beta x), normalized; slow spatial decay (e^{alpha x} phi in L2 only
/// for alpha < beta), used where an observable decay ladder is needed.
WaveField make_sech_seed(const Grid& g, double beta);

/// Band-limited complex noise: Gaussian coefficients on |xi| <= xi_max,
/// inverse transform, Gaussian envelope of width `envelope`, normalized.
WaveField make_band_limited_random(const Grid& g, uint64_t rng_seed,
                                   double xi_max = 3.0, double envelope = 5.0);

/// The standard battery: gauss_c0, gauss_p5, gauss_m5, gauss_k1, gauss_k3,
/// rand_a, rand_b.  rng_seed offsets the PRNG draws of the random members.
std::vector<Seed> make_battery(const Grid& g, uint64_t rng_seed = 1);

}  // namespace lkdv
