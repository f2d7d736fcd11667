#include "lkdv/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace lkdv {

namespace {
// FFTW's planner is not thread-safe; executing existing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Grid::Impl {
  double L = 0;
  int N = 0;
  double dx = 0;
  std::vector<double> x;
  std::vector<double> xi;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

Grid make_grid(double L, int N) {
  if (!(L > 0.0)) throw PreconditionError("make_grid: L must be positive");
  if (N < 8) throw PreconditionError("make_grid: N must be at least 8");
  if (N % 2 != 0) throw PreconditionError("make_grid: N must be even");

  auto impl = std::make_shared<Grid::Impl>();
  impl->L = L;
  impl->N = N;
  impl->dx = 2.0 * L / N;
  impl->x.resize(N);
  impl->xi.resize(N);
  for (int j = 0; j < N; ++j) impl->x[j] = -L + impl->dx * j;
  const double dxi = std::numbers::pi / L;
  for (int k = 0; k < N; ++k) {
    const int ks = (k < N / 2) ? k : k - N;
    impl->xi[k] = dxi * ks;
  }

  {
    // Plans are created once against a scratch buffer and executed with the
    // new-array interface; FFTW_UNALIGNED lifts the alignment requirement so
    // std::vector storage is valid.  FFTW_ESTIMATE keeps the plan choice
    // deterministic across runs.
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(N));
    impl->fwd = fftw_plan_dft_1d(N, buf, buf, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    impl->bwd = fftw_plan_dft_1d(N, buf, buf, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
  }

  Grid g;
  g.impl_ = std::move(impl);
  return g;
}

double Grid::L() const { return impl_->L; }
int Grid::N() const { return impl_->N; }
double Grid::dx() const { return impl_->dx; }
std::span<const double> Grid::x() const { return impl_->x; }
std::span<const double> Grid::xi() const { return impl_->xi; }

bool Grid::same_as(const Grid& other) const {
  return impl_ == other.impl_ ||
         (impl_->N == other.impl_->N && impl_->L == other.impl_->L);
}

void Grid::forward(std::span<cplx> values) const {
  if (static_cast<int>(values.size()) != impl_->N)
    throw PreconditionError("Grid::forward: length mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(values.data());
  fftw_execute_dft(impl_->fwd, p, p);
}

void Grid::inverse(std::span<cplx> values) const {
  if (static_cast<int>(values.size()) != impl_->N)
    throw PreconditionError("Grid::inverse: length mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(values.data());
  fftw_execute_dft(impl_->bwd, p, p);
  const double s = 1.0 / impl_->N;
  for (auto& v : values) v *= s;
}

WaveField zero_field(const Grid& g) {
  return WaveField{g, std::vector<cplx>(static_cast<size_t>(g.N()))};
}

double l2_norm(const WaveField& f) {
  double s = 0.0;
  for (const auto& v : f.values) s += std::norm(v);
  return std::sqrt(f.grid.dx() * s);
}

double l2_norm_freq(const Grid& g, std::span<const cplx> freq) {
  double s = 0.0;
  for (const auto& v : freq) s += std::norm(v);
  return std::sqrt(g.dx() / g.N() * s);
}

cplx inner(const WaveField& u, const WaveField& v) {
  if (!u.grid.same_as(v.grid))
    throw PreconditionError("inner: fields live on different grids");
  cplx s = 0.0;
  for (size_t j = 0; j < u.values.size(); ++j)
    s += std::conj(u.values[j]) * v.values[j];
  return u.grid.dx() * s;
}

double weighted_norm(const WaveField& f, const ExpAbsWeight& w) {
  if (!(w.alpha > 0.0))
    throw PreconditionError("weighted_norm: exp_abs weight needs alpha > 0");
  const auto x = f.grid.x();
  double s = 0.0;
  for (size_t j = 0; j < f.values.size(); ++j) {
    const double wx = std::exp(-w.alpha * std::abs(x[j]));
    s += wx * wx * std::norm(f.values[j]);
  }
  return std::sqrt(f.grid.dx() * s);
}

double weighted_norm(const WaveField& f, const InvBracketWeight&) {
  const auto x = f.grid.x();
  double s = 0.0;
  for (size_t j = 0; j < f.values.size(); ++j)
    s += std::norm(f.values[j]) / (1.0 + x[j] * x[j]);
  return std::sqrt(f.grid.dx() * s);
}

std::vector<cplx> to_freq(const WaveField& f) {
  std::vector<cplx> out = f.values;
  f.grid.forward(out);
  return out;
}

WaveField from_freq(const Grid& g, std::vector<cplx> freq) {
  g.inverse(freq);
  return WaveField{g, std::move(freq)};
}

WaveField apply_multiplier(const WaveField& f, std::span<const cplx> m) {
  if (m.size() != f.values.size())
    throw PreconditionError("apply_multiplier: multiplier length mismatch");
  std::vector<cplx> buf = f.values;
  f.grid.forward(buf);
  for (size_t k = 0; k < buf.size(); ++k) buf[k] *= m[k];
  return from_freq(f.grid, std::move(buf));
}

Spectrum spectrum(const WaveField& f) {
  const int n = f.grid.N();
  std::vector<cplx> freq = to_freq(f);
  Spectrum sp;
  sp.xi.resize(n);
  sp.coeff.resize(n);
  const auto xi = f.grid.xi();
  const double dx = f.grid.dx();
  // symmetric order: native bins N/2..N-1 (negative xi) first, then 0..N/2-1
  for (int i = 0; i < n; ++i) {
    const int k = (i + n / 2) % n;
    const double phase = (k % 2 == 0) ? 1.0 : -1.0;  // e^{i pi k~} for even N
    sp.xi[i] = xi[k];
    sp.coeff[i] = dx * phase * freq[k];
  }
  return sp;
}

}  // namespace lkdv
