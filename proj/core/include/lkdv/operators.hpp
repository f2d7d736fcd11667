#pragma once
// The sech^2 potential, operator symbols, and discrete applications of the
// generator family.
//
// Sign and branch conventions (single source of truth for every module):
//   p = -i d/dx with Fourier symbol xi.
//   h0(xi) = -(xi^3 + 4 xi)                     (H0 = -p^3 - 4p)
//   H = H0 + 12 pV,  H* = H0 + 12 Vp,  Htilde0 = H0 + 6 (pV + Vp),
//   and H = Htilde0 - 6i V' with V = sech^2 x.  A coupling factor scales
//   every potential term (coupling 0 switches V off).
//   The flow of a generator G is always e^{-itG}; NegH / NegHstar realize
//   e^{+itH}, e^{+itH*} through the same stepper.
//   Branch::plus is the conjugation by e^{+alpha x} paired with e^{-itH0}:
//   its multiplier flow is e^{-it c+(xi)} with
//     c+(xi) = -xi^3 + (3 alpha^2 - 4) xi + i (-3 alpha xi^2 + alpha^3 - 4 alpha).
//   Branch::minus pairs e^{-alpha x} with e^{+itH0}; c-(xi) = conj(c+(xi))
//   and the flow is e^{+it c-(xi)}.  Both flows contract for t >= 0 with
//   multiplier modulus exp(t(-3 alpha xi^2 + alpha^3 - 4 alpha)); t < 0 is
//   the blowing-up direction and is refused.

#include <string_view>

#include "lkdv/grid.hpp"

namespace lkdv {

inline constexpr double kPotentialCoupling = 12.0;    // H = H0 + 12 pV
inline constexpr double kSymmetrizedCoupling = 6.0;   // Htilde0 = H0 + 6(pV+Vp)

enum class Branch { plus, minus };
enum class GeneratorTag { H0, H, Hstar, Htilde0, NegH, NegHstar };

const char* to_string(GeneratorTag t);
GeneratorTag generator_from_string(std::string_view s);
const char* to_string(Branch b);
Branch branch_from_string(std::string_view s);

double potential(double x);        // sech^2 x, underflow-safe for any x
double deriv_potential(double x);  // -2 sinh x / cosh^3 x, odd
double h0_symbol(double xi);
cplx conjugated_symbol(double xi, double alpha, Branch branch);  // 0 < alpha <= 1

/// Per-grid cache of potential samples and symbols; immutable after
/// construction, safe to share across threads.
class OperatorTable {
 public:
  explicit OperatorTable(const Grid& g, double coupling = 1.0);

  const Grid& grid() const { return grid_; }
  double coupling() const { return coupling_; }
  std::span<const double> v() const { return v_; }
  std::span<const double> vprime() const { return vp_; }
  std::span<const double> h0() const { return h0_; }

  WaveField apply(GeneratorTag tag, const WaveField& f) const;

  /// Stepper support: given u in frequency space (native order, unnormalized
  /// forward transform), writes the frequency coefficients of the potential
  /// part of tag (12 pV u, 12 Vp u, or 6(pV+Vp) u, times coupling; sign of
  /// Neg* tags is NOT applied here).  `scratch` must be a distinct length-N
  /// buffer.
  void interaction_freq(GeneratorTag tag, std::span<const cplx> u_freq,
                        std::span<cplx> dst, std::span<cplx> scratch) const;

 private:
  Grid grid_;
  double coupling_;
  std::vector<double> v_, vp_, h0_;
};

/// One-shot application of a generator at the given coupling.
WaveField apply(GeneratorTag tag, const WaveField& f, double coupling = 1.0);
WaveField apply_momentum(const WaveField& f);  // p f

/// True when the top third of the spectrum stays below rel_tol of the peak
/// coefficient; callers warn (never reject) on failure.
bool resolution_ok(const WaveField& f, double rel_tol = 1e-10);

}  // namespace lkdv
