#pragma once
// Test-only oracles, independent of the library's computational paths:
// adaptive quadrature, closed-form cubic roots, a golden-section maximizer,
// and a naive O(N^2) DFT for checking the transform contract.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracles {

using cplx = std::complex<double>;

// Adaptive Simpson quadrature with absolute tolerance.
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-13) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Roots of mu^3 + p mu + q by Cardano's formula (complex coefficients).
inline std::vector<cplx> depressed_cubic_roots(cplx p, cplx q) {
  const cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  cplx u3 = -q / 2.0 + disc;
  if (std::abs(u3) < 1e-30) u3 = -q / 2.0 - disc;
  const cplx u = std::pow(u3, 1.0 / 3.0);
  const cplx omega{-0.5, std::sqrt(3.0) / 2.0};
  std::vector<cplx> roots;
  for (int k = 0; k < 3; ++k) {
    const cplx uk = u * std::pow(omega, k);
    roots.push_back(uk - p / (3.0 * uk));
  }
  return roots;
}

// Golden-section maximizer on [a, b] for unimodal f.
inline double maximize(const std::function<double(double)>& f, double a,
                       double b, double tol = 1e-12) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  while (b - a > tol) {
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - phi * (b - a);
    d = a + phi * (b - a);
  }
  return 0.5 * (a + b);
}

// Naive O(N^2) DFT matching the unnormalized FFTW-forward convention.
inline std::vector<cplx> naive_dft(const std::vector<cplx>& u) {
  const size_t n = u.size();
  std::vector<cplx> out(n);
  for (size_t k = 0; k < n; ++k) {
    cplx s = 0.0;
    for (size_t j = 0; j < n; ++j)
      s += u[j] * std::exp(cplx{0.0, -2.0 * M_PI * double(j * k % n) / double(n)});
    out[k] = s;
  }
  return out;
}

}  // namespace oracles
