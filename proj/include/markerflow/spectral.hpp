#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "markerflow/grid.hpp"

namespace markerflow {

/// Half-spectrum coefficients of a real field (n x (n/2 + 1), FFT ordering on
/// the first axis). Unnormalized forward transform.
class SpectralField {
 public:
  explicit SpectralField(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t rows() const { return grid_.n(); }
  std::size_t cols() const { return grid_.n() / 2 + 1; }

  std::complex<double>& operator()(std::size_t i, std::size_t j) { return coeffs_[i * cols() + j]; }
  std::complex<double> operator()(std::size_t i, std::size_t j) const { return coeffs_[i * cols() + j]; }

  std::vector<std::complex<double>>& coeffs() { return coeffs_; }
  const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }

 private:
  Grid grid_;
  std::vector<std::complex<double>> coeffs_;
};

/// 2/3-rule truncation: zeroes every mode with max(|k_x|, |k_y|) > n/3.
SpectralField dealias(SpectralField f_hat);

/// True when integer frequencies (fx, fy) survive the 2/3 rule on an n grid.
bool in_retained_band(long fx, long fy, std::size_t n);

/// FFT-backed differential operators on one periodic grid.
///
/// Plans are created once (under a process-wide lock, FFTW's planner is not
/// reentrant) and executed through the new-array interface, so a const
/// Spectral can be shared between threads.
class Spectral {
 public:
  explicit Spectral(const Grid& grid);
  ~Spectral();
  Spectral(Spectral&&) noexcept;
  Spectral& operator=(Spectral&&) noexcept;
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const Grid& grid() const { return grid_; }

  SpectralField forward(const ScalarField& f) const;
  ScalarField inverse(const SpectralField& f_hat) const;

  /// (d/dx f, d/dy f). Nyquist modes are dropped from first derivatives.
  VectorField gradient(const ScalarField& f) const;
  /// Spectral Laplacian.
  ScalarField laplacian(const ScalarField& f) const;
  /// Spectral divergence of a vector field.
  ScalarField divergence(const VectorField& u) const;

  /// Zero-mean psi with -Laplacian(psi) = omega - <omega>.
  ScalarField solve_stream(const ScalarField& omega) const;
  /// u = perp-grad psi = (-d/dy psi, d/dx psi).
  VectorField velocity(const ScalarField& psi) const;
  /// velocity(solve_stream(omega)) with one forward transform.
  VectorField velocity_from_vorticity(const ScalarField& omega) const;

  /// Dealiased advection term P_{2/3}(u . grad f).
  ScalarField advection(const VectorField& u, const ScalarField& f) const;

 private:
  void execute_forward(const double* in, std::complex<double>* out) const;
  /// Destroys `in`.
  void execute_inverse(std::complex<double>* in, double* out) const;
  ScalarField inverse_derivative(const SpectralField& f_hat, bool along_x) const;

  struct Plans;
  Grid grid_;
  std::unique_ptr<Plans> plans_;
  std::vector<double> kx_;  // first-derivative multipliers, Nyquist zeroed
  std::vector<double> ky_;
  std::vector<double> kx2_;  // squared wavenumbers, Nyquist kept
  std::vector<double> ky2_;
};

/// Max over the grid of the four velocity-gradient entries, |du_a/dx_b|.
///
/// Stand-in for ||grad u||_inf: the entrywise max is within a factor 2 of the
/// pointwise matrix 2-norm.
double grad_u_sup_norm(const Spectral& ops, const VectorField& u);

}  // namespace markerflow
