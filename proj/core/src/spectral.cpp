#include "lkdv/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <map>
#include <numbers>

namespace lkdv {

namespace {

std::vector<cplx> sorted_eigenvalues(const Eigen::MatrixXcd& A) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(A, false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error(
        "eigen_scan: dense eigensolver failed (matrix 1-norm " +
        std::to_string(A.cwiseAbs().colwise().sum().maxCoeff()) + ")");
  std::vector<cplx> eigs(static_cast<size_t>(A.rows()));
  for (long i = 0; i < A.rows(); ++i)
    eigs[static_cast<size_t>(i)] = solver.eigenvalues()(i);
  std::sort(eigs.begin(), eigs.end(), [](const cplx& a, const cplx& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return eigs;
}

}  // namespace

EigenScanReport eigen_scan(double L, int N, GeneratorTag tag, double coupling,
                           double tol_match, double imag_cut) {
  if (N > 1024)
    throw PreconditionError("eigen_scan: scan resolution guarded to N <= 1024");
  EigenScanReport rep;
  rep.L = L;
  rep.N_coarse = N;
  rep.N_fine = 2 * N;
  rep.tag = tag;
  rep.coupling = coupling;
  rep.tol_match = tol_match;
  rep.imag_cut = imag_cut;

  rep.eigs_coarse =
      sorted_eigenvalues(dense_generator(make_grid(L, N), tag, coupling));
  rep.eigs_fine =
      sorted_eigenvalues(dense_generator(make_grid(L, 2 * N), tag, coupling));

  rep.displacement.reserve(rep.eigs_coarse.size());
  for (const cplx& lam : rep.eigs_coarse) {
    double best = std::numeric_limits<double>::infinity();
    for (const cplx& mu : rep.eigs_fine) best = std::min(best, std::abs(lam - mu));
    rep.displacement.push_back(best);
    rep.max_abs_imag_coarse =
        std::max(rep.max_abs_imag_coarse, std::abs(lam.imag()));
    if (best < tol_match && std::abs(lam.imag()) > imag_cut)
      rep.persistent.push_back({lam, best});
  }
  return rep;
}

namespace {

/// sigma_min(A - zI) for many z through one Schur factorization: the shifted
/// triangular factor keeps the singular values, and inverse (power) iteration
/// on (M* M)^{-1} needs only two triangular solves per sweep.
class SigmaMinSolver {
 public:
  explicit SigmaMinSolver(const Eigen::MatrixXcd& A) {
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(A, false);
    if (schur.info() != Eigen::Success)
      throw std::runtime_error("pseudospectrum: Schur factorization failed");
    T_ = schur.matrixT();
  }

  // Block inverse iteration with Rayleigh-Ritz extraction; the block absorbs
  // clustered singular values (several eigenvalues nearly equidistant from z)
  // that stall a single power vector.
  double sigma_min(cplx z, int max_iter = 200, double tol = 1e-14) const {
    const long n = T_.rows();
    Eigen::MatrixXcd M = T_;
    M.diagonal().array() -= z;

    const int b = static_cast<int>(std::min<long>(4, n));
    Eigen::MatrixXcd V(n, b);
    for (long j = 0; j < n; ++j)
      for (int c = 0; c < b; ++c)
        V(j, c) = std::exp(cplx{0.0, 0.7 * double(j + 1) * double(c + 1)});
    V = Eigen::HouseholderQR<Eigen::MatrixXcd>(V).householderQ() *
        Eigen::MatrixXcd::Identity(n, b);

    double lambda = 0.0, prev = -1.0;
    for (int it = 0; it < max_iter; ++it) {
      const Eigen::MatrixXcd Z =
          M.adjoint().triangularView<Eigen::Lower>().solve(V);
      const Eigen::MatrixXcd Y = M.triangularView<Eigen::Upper>().solve(Z);
      if (!Y.allFinite()) return 0.0;  // shift sits on an eigenvalue
      const Eigen::MatrixXcd S = V.adjoint() * Y;  // V* (M*M)^{-1} V
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ritz(
          0.5 * (S + S.adjoint()));
      lambda = ritz.eigenvalues()(b - 1);
      V = Eigen::HouseholderQR<Eigen::MatrixXcd>(Y).householderQ() *
          Eigen::MatrixXcd::Identity(n, b);
      if (prev > 0.0 && std::abs(lambda - prev) <= tol * lambda) break;
      prev = lambda;
    }
    return lambda > 0.0 ? 1.0 / std::sqrt(lambda) : 0.0;
  }

 private:
  Eigen::MatrixXcd T_;
};

}  // namespace

PseudospectrumReport pseudospectrum(const ComplexBox& box, int nx, int ny,
                                    const Grid& g, GeneratorTag tag,
                                    double coupling) {
  if (g.N() > 512)
    throw PreconditionError("pseudospectrum: guarded to N <= 512");
  if (nx < 2 || ny < 2)
    throw PreconditionError("pseudospectrum: lattice needs nx, ny >= 2");
  if (!(box.re_max > box.re_min) || !(box.im_max > box.im_min))
    throw PreconditionError("pseudospectrum: degenerate box");

  PseudospectrumReport rep;
  rep.box = box;
  rep.nx = nx;
  rep.ny = ny;
  rep.L = g.L();
  rep.N = g.N();
  rep.tag = tag;
  rep.coupling = coupling;

  const SigmaMinSolver solver(dense_generator(g, tag, coupling));
  rep.min_sigma = std::numeric_limits<double>::infinity();
  for (int j = 0; j < ny; ++j) {
    const double im =
        box.im_min + (box.im_max - box.im_min) * j / (ny - 1.0);
    for (int i = 0; i < nx; ++i) {
      const double re =
          box.re_min + (box.re_max - box.re_min) * i / (nx - 1.0);
      const double s = solver.sigma_min({re, im});
      rep.re.push_back(re);
      rep.im.push_back(im);
      rep.sigma_min.push_back(s);
      rep.min_sigma = std::min(rep.min_sigma, s);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Evans function

namespace {

using Vec3 = std::array<cplx, 3>;

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

cplx dot(const Vec3& a, const Vec3& b) {  // bilinear, no conjugation
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// First-order system y = (u, u', u'') of the eigenvalue ODE
///   H:  u''' - 4u' + 12c (Vu)' = i lambda u
///   H*: u''' - 4u' + 12c V u'  = i lambda u
struct EvansOde {
  cplx ilambda;
  double c;
  bool adjoint;

  void matrix(double x, Eigen::Matrix3cd& A) const {
    const double V = potential(x);
    const double Vp = deriv_potential(x);
    A.setZero();
    A(0, 1) = 1.0;
    A(1, 2) = 1.0;
    A(2, 0) = ilambda - (adjoint ? 0.0 : 12.0 * c * Vp);
    A(2, 1) = 4.0 - 12.0 * c * V;
  }
};

struct SingleSystem {  // z' = (A(x) - mu) z
  const EvansOde* ode;
  cplx mu;
  void operator()(const Vec3& z, Vec3& dz, double x) const {
    Eigen::Matrix3cd A;
    ode->matrix(x, A);
    for (int i = 0; i < 3; ++i) {
      cplx s = -mu * z[static_cast<size_t>(i)];
      for (int j = 0; j < 3; ++j) s += A(i, j) * z[static_cast<size_t>(j)];
      dz[static_cast<size_t>(i)] = s;
    }
  }
};

struct WedgeSystem {  // w' = (-A(x)^T - rate) w  (rate = sum of the two mus)
  const EvansOde* ode;
  cplx rate;
  void operator()(const Vec3& w, Vec3& dw, double x) const {
    Eigen::Matrix3cd A;
    ode->matrix(x, A);
    for (int i = 0; i < 3; ++i) {
      cplx s = -rate * w[static_cast<size_t>(i)];
      for (int j = 0; j < 3; ++j) s -= A(j, i) * w[static_cast<size_t>(j)];
      dw[static_cast<size_t>(i)] = s;
    }
  }
};

template <class System>
Vec3 integrate_to_zero(const System& sys, Vec3 y, double x0, double tol) {
  namespace ode = boost::numeric::odeint;
  using stepper_t = ode::runge_kutta_dopri5<Vec3>;
  const double dx0 = (x0 < 0.0 ? 1.0 : -1.0) * 1e-3;
  ode::integrate_adaptive(ode::make_controlled<stepper_t>(tol, tol), sys, y,
                          x0, 0.0, dx0);
  return y;
}

std::array<cplx, 3> asymptotic_roots(cplx lambda) {
  // mu^3 - 4 mu - i lambda = 0 via the companion matrix, Newton-polished.
  Eigen::Matrix3cd C = Eigen::Matrix3cd::Zero();
  C(0, 2) = cplx{0.0, 1.0} * lambda;  // -q with q = -i lambda
  C(1, 0) = 1.0;
  C(1, 2) = 4.0;  // -p with p = -4
  C(2, 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(C, false);
  std::array<cplx, 3> mu;
  for (int i = 0; i < 3; ++i) {
    cplx m = solver.eigenvalues()(i);
    for (int it = 0; it < 3; ++it) {
      const cplx f = m * m * m - 4.0 * m - cplx{0.0, 1.0} * lambda;
      const cplx df = 3.0 * m * m - 4.0;
      m -= f / df;
    }
    mu[static_cast<size_t>(i)] = m;
  }
  std::sort(mu.begin(), mu.end(), [](const cplx& a, const cplx& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return mu;
}

Vec3 mode_vector(cplx mu) { return {cplx{1.0, 0.0}, mu, mu * mu}; }

}  // namespace

EvansSample evans_function(cplx lambda, double L_ode, double tol,
                           GeneratorTag tag, double coupling) {
  if (std::abs(lambda.imag()) < 0.05)
    throw PreconditionError(
        "evans_function: |Im lambda| >= 0.05 required (essential spectrum "
        "covers the real axis)");
  if (L_ode < 15.0)
    throw PreconditionError("evans_function: L_ode >= 15 required");
  if (tag != GeneratorTag::H && tag != GeneratorTag::Hstar)
    throw PreconditionError("evans_function: tag must be H or Hstar");

  EvansSample sample;
  sample.lambda = lambda;
  sample.ode_tol = tol;
  sample.roots = asymptotic_roots(lambda);

  std::vector<cplx> unstable, stable;
  for (const cplx& mu : sample.roots) {
    if (std::abs(mu.real()) < 1e-8)
      throw PreconditionError(
          "evans_function: root with |Re mu| < 1e-8, classification ambiguous");
    (mu.real() > 0.0 ? unstable : stable).push_back(mu);
  }
  sample.n_plus = static_cast<int>(unstable.size());
  sample.n_minus = static_cast<int>(stable.size());

  const EvansOde ode{cplx{0.0, 1.0} * lambda, coupling,
                     tag == GeneratorTag::Hstar};

  if (sample.n_plus == 2) {
    // two-dimensional family from -infinity as a wedge, one from +infinity
    const Vec3 va = mode_vector(unstable[0]);
    const Vec3 vb = mode_vector(unstable[1]);
    const Vec3 vc = mode_vector(stable[0]);
    const Vec3 w0 = cross(va, vb);
    const Vec3 w =
        integrate_to_zero(WedgeSystem{&ode, unstable[0] + unstable[1]}, w0,
                          -L_ode, tol);
    const Vec3 z =
        integrate_to_zero(SingleSystem{&ode, stable[0]}, vc, L_ode, tol);
    sample.E = dot(w, z) / dot(w0, vc);
  } else if (sample.n_plus == 1) {
    const Vec3 va = mode_vector(unstable[0]);
    const Vec3 vb = mode_vector(stable[0]);
    const Vec3 vc = mode_vector(stable[1]);
    const Vec3 w0 = cross(vb, vc);
    const Vec3 z =
        integrate_to_zero(SingleSystem{&ode, unstable[0]}, va, -L_ode, tol);
    const Vec3 w = integrate_to_zero(WedgeSystem{&ode, stable[0] + stable[1]},
                                     w0, L_ode, tol);
    sample.E = dot(z, w) / dot(va, w0);
  } else {
    // the roots sum to zero, so both half-planes carry at least one mode
    throw std::runtime_error("evans_function: unexpected root split");
  }
  return sample;
}

namespace {

double principal_arg_increment(cplx from, cplx to) {
  return std::arg(to / from);
}

}  // namespace

EvansSweepReport evans_sweep(const ComplexBox& box, int nx, int ny,
                             double L_ode, double tol, GeneratorTag tag,
                             double coupling) {
  if (nx < 2 || ny < 2)
    throw PreconditionError("evans_sweep: lattice needs nx, ny >= 2");
  const bool upper = box.im_min >= 0.05 && box.im_max >= box.im_min;
  const bool lower = box.im_max <= -0.05 && box.im_min <= box.im_max;
  if (!upper && !lower)
    throw PreconditionError(
        "evans_sweep: box must avoid the band |Im lambda| < 0.05");

  EvansSweepReport rep;
  rep.box = box;
  rep.nx = nx;
  rep.ny = ny;
  rep.L_ode = L_ode;
  rep.tol = tol;
  rep.tag = tag;
  rep.coupling = coupling;

  rep.min_abs_E = std::numeric_limits<double>::infinity();
  for (int j = 0; j < ny; ++j) {
    const double im = box.im_min + (box.im_max - box.im_min) * j / (ny - 1.0);
    for (int i = 0; i < nx; ++i) {
      const double re = box.re_min + (box.re_max - box.re_min) * i / (nx - 1.0);
      rep.samples.push_back(evans_function({re, im}, L_ode, tol, tag, coupling));
      rep.min_abs_E = std::min(rep.min_abs_E, std::abs(rep.samples.back().E));
    }
  }

  // normalized Cauchy-Riemann residual on interior lattice points
  const double hx = (box.re_max - box.re_min) / (nx - 1.0);
  const double hy = (box.im_max - box.im_min) / (ny - 1.0);
  auto at = [&](int i, int j) -> cplx {
    return rep.samples[static_cast<size_t>(j * nx + i)].E;
  };
  for (int j = 1; j + 1 < ny; ++j) {
    for (int i = 1; i + 1 < nx; ++i) {
      const cplx ex = (at(i + 1, j) - at(i - 1, j)) / (2.0 * hx);
      const cplx ey = (at(i, j + 1) - at(i, j - 1)) / (2.0 * hy);
      const double denom = std::abs(ex) + std::abs(ey) + 1e-300;
      rep.max_cr_residual =
          std::max(rep.max_cr_residual, std::abs(ex + cplx{0.0, 1.0} * ey) / denom);
    }
  }

  // winding of E around the boundary, with adaptive phase refinement
  struct BoundaryPoint {
    cplx lambda;
    cplx E;
  };
  auto eval = [&](cplx lam) -> BoundaryPoint {
    return {lam, evans_function(lam, L_ode, tol, tag, coupling).E};
  };

  std::vector<cplx> corners = {{box.re_min, box.im_min},
                               {box.re_max, box.im_min},
                               {box.re_max, box.im_max},
                               {box.re_min, box.im_max}};
  std::vector<BoundaryPoint> pts;
  const int per_edge_x = std::max(nx, 16);
  const int per_edge_y = std::max(ny, 8);
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[static_cast<size_t>(e)];
    const cplx b = corners[static_cast<size_t>((e + 1) % 4)];
    const int m = (e % 2 == 0) ? per_edge_x : per_edge_y;
    for (int i = 0; i < m; ++i)
      pts.push_back(eval(a + (b - a) * (static_cast<double>(i) / m)));
  }
  pts.push_back(pts.front());  // close the loop

  double total = 0.0;
  std::function<double(const BoundaryPoint&, const BoundaryPoint&, int)> segment =
      [&](const BoundaryPoint& p, const BoundaryPoint& q, int depth) -> double {
    const double d = principal_arg_increment(p.E, q.E);
    if (std::abs(d) <= std::numbers::pi / 2.0 || depth >= 20) {
      if (depth >= 20)
        throw std::runtime_error(
            "evans_sweep: phase varies too fast on the boundary (zero on or "
            "near the contour?)");
      return d;
    }
    const BoundaryPoint mid = eval(0.5 * (p.lambda + q.lambda));
    return segment(p, mid, depth + 1) + segment(mid, q, depth + 1);
  };
  int boundary_evals = static_cast<int>(pts.size());
  for (size_t i = 0; i + 1 < pts.size(); ++i) total += segment(pts[i], pts[i + 1], 0);
  rep.boundary_points = boundary_evals;

  const double turns = total / (2.0 * std::numbers::pi);
  rep.winding = static_cast<int>(std::llround(turns));
  if (std::abs(turns - rep.winding) > 0.25)
    throw std::runtime_error(
        "evans_sweep: winding number did not settle to an integer");
  return rep;
}

}  // namespace lkdv
