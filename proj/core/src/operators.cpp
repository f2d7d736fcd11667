#include "lkdv/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lkdv {

const char* to_string(GeneratorTag t) {
  switch (t) {
    case GeneratorTag::H0: return "H0";
    case GeneratorTag::H: return "H";
    case GeneratorTag::Hstar: return "Hstar";
    case GeneratorTag::Htilde0: return "Htilde0";
    case GeneratorTag::NegH: return "NegH";
    case GeneratorTag::NegHstar: return "NegHstar";
  }
  return "?";
}

GeneratorTag generator_from_string(std::string_view s) {
  if (s == "H0") return GeneratorTag::H0;
  if (s == "H") return GeneratorTag::H;
  if (s == "Hstar") return GeneratorTag::Hstar;
  if (s == "Htilde0") return GeneratorTag::Htilde0;
  if (s == "NegH") return GeneratorTag::NegH;
  if (s == "NegHstar") return GeneratorTag::NegHstar;
  throw PreconditionError("unknown generator tag: " + std::string(s));
}

const char* to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

Branch branch_from_string(std::string_view s) {
  if (s == "plus" || s == "+") return Branch::plus;
  if (s == "minus" || s == "-") return Branch::minus;
  throw PreconditionError("unknown branch: " + std::string(s));
}

double potential(double x) {
  // sech^2 x = 4 q / (1+q)^2 with q = e^{-2|x|}; q underflows to 0 for
  // |x| > ~354, which is the exact double-precision value of sech^2 there.
  const double q = std::exp(-2.0 * std::abs(x));
  const double r = 1.0 + q;
  return 4.0 * q / (r * r);
}

double deriv_potential(double x) {
  // V' = -2 sinh x / cosh^3 x = -8 sign(x) q (1-q) / (1+q)^3, q = e^{-2|x|}.
  const double q = std::exp(-2.0 * std::abs(x));
  const double r = 1.0 + q;
  const double s = (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
  return -8.0 * s * q * (1.0 - q) / (r * r * r);
}

double h0_symbol(double xi) { return -(xi * xi * xi + 4.0 * xi); }

cplx conjugated_symbol(double xi, double alpha, Branch branch) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw PreconditionError("conjugated_symbol: alpha must lie in (0, 1]");
  const double re = -xi * xi * xi + (3.0 * alpha * alpha - 4.0) * xi;
  double im = -3.0 * alpha * xi * xi + alpha * alpha * alpha - 4.0 * alpha;
  if (branch == Branch::minus) im = -im;
  return {re, im};
}

OperatorTable::OperatorTable(const Grid& g, double coupling)
    : grid_(g), coupling_(coupling) {
  const int n = g.N();
  v_.resize(n);
  vp_.resize(n);
  h0_.resize(n);
  for (int j = 0; j < n; ++j) {
    v_[j] = potential(g.x()[j]);
    vp_[j] = deriv_potential(g.x()[j]);
  }
  for (int k = 0; k < n; ++k) h0_[k] = h0_symbol(g.xi()[k]);
}

void OperatorTable::interaction_freq(GeneratorTag tag,
                                     std::span<const cplx> u_freq,
                                     std::span<cplx> dst,
                                     std::span<cplx> scratch) const {
  const size_t n = static_cast<size_t>(grid_.N());
  if (u_freq.size() != n || dst.size() != n || scratch.size() != n)
    throw PreconditionError("interaction_freq: buffer length mismatch");
  const auto xi = grid_.xi();

  // pV u: V in position, then the xi multiplier.
  auto pv_into = [&](std::span<cplx> out, double c) {
    std::copy(u_freq.begin(), u_freq.end(), out.begin());
    grid_.inverse(out);
    for (size_t j = 0; j < n; ++j) out[j] *= v_[j];
    grid_.forward(out);
    for (size_t k = 0; k < n; ++k) out[k] *= c * xi[k];
  };
  // Vp u: xi multiplier first, then V in position.
  auto vp_into = [&](std::span<cplx> out, double c) {
    for (size_t k = 0; k < n; ++k) out[k] = u_freq[k] * xi[k];
    grid_.inverse(out);
    for (size_t j = 0; j < n; ++j) out[j] *= c * v_[j];
    grid_.forward(out);
  };

  switch (tag) {
    case GeneratorTag::H0:
      std::fill(dst.begin(), dst.end(), cplx{0.0, 0.0});
      return;
    case GeneratorTag::H:
    case GeneratorTag::NegH:
      pv_into(dst, coupling_ * kPotentialCoupling);
      return;
    case GeneratorTag::Hstar:
    case GeneratorTag::NegHstar:
      vp_into(dst, coupling_ * kPotentialCoupling);
      return;
    case GeneratorTag::Htilde0:
      pv_into(dst, coupling_ * kSymmetrizedCoupling);
      vp_into(scratch, coupling_ * kSymmetrizedCoupling);
      for (size_t k = 0; k < n; ++k) dst[k] += scratch[k];
      return;
  }
}

WaveField OperatorTable::apply(GeneratorTag tag, const WaveField& f) const {
  if (!f.grid.same_as(grid_))
    throw PreconditionError("OperatorTable::apply: grid mismatch");
  const size_t n = f.values.size();
  std::vector<cplx> freq = to_freq(f);
  std::vector<cplx> pot(n), scratch(n);
  interaction_freq(tag, freq, pot, scratch);
  const double sign =
      (tag == GeneratorTag::NegH || tag == GeneratorTag::NegHstar) ? -1.0 : 1.0;
  for (size_t k = 0; k < n; ++k) freq[k] = sign * (h0_[k] * freq[k] + pot[k]);
  return from_freq(grid_, std::move(freq));
}

WaveField apply(GeneratorTag tag, const WaveField& f, double coupling) {
  return OperatorTable(f.grid, coupling).apply(tag, f);
}

WaveField apply_momentum(const WaveField& f) {
  const auto xi = f.grid.xi();
  std::vector<cplx> freq = to_freq(f);
  for (size_t k = 0; k < freq.size(); ++k) freq[k] *= xi[k];
  return from_freq(f.grid, std::move(freq));
}

bool resolution_ok(const WaveField& f, double rel_tol) {
  const int n = f.grid.N();
  std::vector<cplx> freq = to_freq(f);
  double peak = 0.0;
  for (const auto& c : freq) peak = std::max(peak, std::abs(c));
  if (peak == 0.0) return true;
  // top third in |xi|: native bins with |k~| >= N/3
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const int ks = (k < n / 2) ? k : k - n;
    if (std::abs(ks) * 3 >= n)
      worst = std::max(worst, std::abs(freq[static_cast<size_t>(k)]));
  }
  return worst <= rel_tol * peak;
}

}  // namespace lkdv
