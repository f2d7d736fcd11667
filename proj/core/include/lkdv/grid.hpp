#pragma once
// Periodic grid on [-L, L), the spectral transform contract, and L2 norms.
//
// Conventions:
//   x_j  = -L + 2L j/N,  j = 0..N-1,  dx = 2L/N
//   xi_k = (pi/L) k~ with k~ in {-N/2,...,N/2-1}; stored in FFT-native order
//          (bin k holds k~ = k for k < N/2, k~ = k - N for k >= N/2).
//   forward() is the unnormalized DFT sum_j u_j e^{-2 pi i jk/N}; inverse()
//   scales by 1/N, so inverse(forward(u)) == u to roundoff.  A Fourier
//   multiplier m(xi) acts as inverse(m .* forward(u)); the continuum phase
//   dx (-1)^k cancels in that round trip and only enters spectrum().
//   l2_norm is the rectangle rule sqrt(dx sum |u_j|^2), which equals the
//   frequency-side value sqrt(dx/N sum |F_k|^2) (discrete Parseval).

#include <complex>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace lkdv {

using cplx = std::complex<double>;

/// Thrown when an operation's stated precondition is violated.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Grid {
 public:
  double L() const;
  int N() const;
  double dx() const;
  std::span<const double> x() const;
  std::span<const double> xi() const;  // FFT-native order

  // In-place DFTs on a length-N buffer.
  void forward(std::span<cplx> values) const;   // unnormalized
  void inverse(std::span<cplx> values) const;   // scales by 1/N

  bool same_as(const Grid& other) const;  // identical L and N

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  friend Grid make_grid(double L, int N);
};

/// Rejects odd N, N < 8, L <= 0.
Grid make_grid(double L, int N);

/// Complex state sampled at the grid points (position representation).
struct WaveField {
  Grid grid;
  std::vector<cplx> values;
};

WaveField zero_field(const Grid& g);

struct ExpAbsWeight {
  double alpha;  // e^{-alpha|x|}; alpha > 0 enforced at use
};
struct InvBracketWeight {};  // <x>^{-1} = (1+x^2)^{-1/2}

double l2_norm(const WaveField& f);
double l2_norm_freq(const Grid& g, std::span<const cplx> freq);
cplx inner(const WaveField& u, const WaveField& v);  // conjugates u
double weighted_norm(const WaveField& f, const ExpAbsWeight& w);
double weighted_norm(const WaveField& f, const InvBracketWeight& w);

std::vector<cplx> to_freq(const WaveField& f);
WaveField from_freq(const Grid& g, std::vector<cplx> freq);
/// inverse(m .* forward(f)) with m given in FFT-native order.
WaveField apply_multiplier(const WaveField& f, std::span<const cplx> m);

/// Continuum-normalized coefficients in symmetric (ascending xi) order, for
/// report output only.
struct Spectrum {
  std::vector<double> xi;
  std::vector<cplx> coeff;
};
Spectrum spectrum(const WaveField& f);

}  // namespace lkdv
