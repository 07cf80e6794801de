#include "markerflow/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace markerflow {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

SpectralField::SpectralField(const Grid& grid)
    : grid_(grid), coeffs_(grid.n() * (grid.n() / 2 + 1), std::complex<double>(0.0, 0.0)) {}

bool in_retained_band(long fx, long fy, std::size_t n) {
  const auto limit = static_cast<long>(n);
  return 3 * std::max(std::labs(fx), std::labs(fy)) <= limit;
}

SpectralField dealias(SpectralField f_hat) {
  const Grid& g = f_hat.grid();
  for (std::size_t i = 0; i < f_hat.rows(); ++i) {
    const long fx = g.frequency(i);
    for (std::size_t j = 0; j < f_hat.cols(); ++j) {
      if (!in_retained_band(fx, static_cast<long>(j), g.n())) f_hat(i, j) = 0.0;
    }
  }
  return f_hat;
}

struct Spectral::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

Spectral::Spectral(const Grid& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  const int n = static_cast<int>(grid.n());
  std::vector<double> real(grid.size());
  std::vector<std::complex<double>> spec(grid.n() * (grid.n() / 2 + 1));
  {
    std::lock_guard lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans_->r2c = fftw_plan_dft_r2c_2d(n, n, real.data(), as_fftw(spec.data()), flags);
    plans_->c2r = fftw_plan_dft_c2r_2d(n, n, as_fftw(spec.data()), real.data(), flags);
  }
  if (!plans_->r2c || !plans_->c2r) throw std::runtime_error("FFTW plan creation failed");

  const std::size_t nyq = grid.n() / 2;
  kx_.resize(grid.n());
  kx2_.resize(grid.n());
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double k = grid.wavenumber(i);
    kx2_[i] = k * k;
    kx_[i] = (i == nyq) ? 0.0 : k;
  }
  ky_.resize(nyq + 1);
  ky2_.resize(nyq + 1);
  for (std::size_t j = 0; j <= nyq; ++j) {
    const double k = grid.wavenumber(j);
    ky2_[j] = k * k;
    ky_[j] = (j == nyq) ? 0.0 : k;
  }
}

Spectral::~Spectral() = default;
Spectral::Spectral(Spectral&&) noexcept = default;
Spectral& Spectral::operator=(Spectral&&) noexcept = default;

void Spectral::execute_forward(const double* in, std::complex<double>* out) const {
  // FFTW's r2c does not modify its input despite the non-const signature.
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in), as_fftw(out));
}

void Spectral::execute_inverse(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(plans_->c2r, as_fftw(in), out);
}

SpectralField Spectral::forward(const ScalarField& f) const {
  if (!(f.grid() == grid_)) throw InvalidInput("Spectral::forward: field is on a different grid");
  SpectralField out(grid_);
  execute_forward(f.values().data(), out.coeffs().data());
  return out;
}

ScalarField Spectral::inverse(const SpectralField& f_hat) const {
  std::vector<std::complex<double>> scratch = f_hat.coeffs();
  std::vector<double> values(grid_.size());
  execute_inverse(scratch.data(), values.data());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (double& v : values) v *= scale;
  return ScalarField(grid_, std::move(values));
}

ScalarField Spectral::inverse_derivative(const SpectralField& f_hat, bool along_x) const {
  SpectralField d(grid_);
  const std::complex<double> I(0.0, 1.0);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      const double k = along_x ? kx_[i] : ky_[j];
      d(i, j) = I * k * f_hat(i, j);
    }
  }
  return inverse(d);
}

VectorField Spectral::gradient(const ScalarField& f) const {
  require_finite(f, "gradient");
  const SpectralField f_hat = forward(f);
  return VectorField(inverse_derivative(f_hat, true), inverse_derivative(f_hat, false));
}

ScalarField Spectral::laplacian(const ScalarField& f) const {
  require_finite(f, "laplacian");
  SpectralField f_hat = forward(f);
  for (std::size_t i = 0; i < f_hat.rows(); ++i) {
    for (std::size_t j = 0; j < f_hat.cols(); ++j) f_hat(i, j) *= -(kx2_[i] + ky2_[j]);
  }
  return inverse(f_hat);
}

ScalarField Spectral::divergence(const VectorField& u) const {
  const SpectralField ux = forward(u.x);
  const SpectralField uy = forward(u.y);
  SpectralField d(grid_);
  const std::complex<double> I(0.0, 1.0);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) d(i, j) = I * (kx_[i] * ux(i, j) + ky_[j] * uy(i, j));
  }
  return inverse(d);
}

ScalarField Spectral::solve_stream(const ScalarField& omega) const {
  require_finite(omega, "solve_stream");
  SpectralField psi = forward(omega);
  for (std::size_t i = 0; i < psi.rows(); ++i) {
    for (std::size_t j = 0; j < psi.cols(); ++j) {
      const double k2 = kx2_[i] + ky2_[j];
      psi(i, j) = (k2 == 0.0) ? 0.0 : psi(i, j) / k2;
    }
  }
  return inverse(psi);
}

VectorField Spectral::velocity(const ScalarField& psi) const {
  require_finite(psi, "velocity");
  const SpectralField psi_hat = forward(psi);
  ScalarField u1 = inverse_derivative(psi_hat, false);
  u1 *= -1.0;
  return VectorField(std::move(u1), inverse_derivative(psi_hat, true));
}

VectorField Spectral::velocity_from_vorticity(const ScalarField& omega) const {
  require_finite(omega, "velocity_from_vorticity");
  SpectralField psi = forward(omega);
  for (std::size_t i = 0; i < psi.rows(); ++i) {
    for (std::size_t j = 0; j < psi.cols(); ++j) {
      const double k2 = kx2_[i] + ky2_[j];
      psi(i, j) = (k2 == 0.0) ? 0.0 : psi(i, j) / k2;
    }
  }
  ScalarField u1 = inverse_derivative(psi, false);
  u1 *= -1.0;
  return VectorField(std::move(u1), inverse_derivative(psi, true));
}

ScalarField Spectral::advection(const VectorField& u, const ScalarField& f) const {
  const VectorField df = gradient(f);
  ScalarField product(grid_);
  for (std::size_t k = 0; k < product.size(); ++k) product[k] = u.x[k] * df.x[k] + u.y[k] * df.y[k];
  return inverse(dealias(forward(product)));
}

double grad_u_sup_norm(const Spectral& ops, const VectorField& u) {
  const VectorField d1 = ops.gradient(u.x);
  const VectorField d2 = ops.gradient(u.y);
  return std::max({d1.x.max_abs(), d1.y.max_abs(), d2.x.max_abs(), d2.y.max_abs()});
}

}  // namespace markerflow
