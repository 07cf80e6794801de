#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace markerflow {

/// Raised for inputs that violate a documented precondition (non-finite
/// values, mismatched grids, bad parameters).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform n x n periodic grid on the torus [0, L)^2.
///
/// Point (i, j) sits at (x_i, y_j) = (i h, j h) with h = L / n. Wavenumbers
/// are the usual FFT ordering 0, 1, ..., n/2, -n/2 + 1, ..., -1 scaled by
/// 2 pi / L, so the default period 2 pi gives unscaled integer modes.
class Grid {
 public:
  explicit Grid(std::size_t n, double length = 2.0 * std::numbers::pi);

  std::size_t n() const { return n_; }
  std::size_t size() const { return n_ * n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / static_cast<double>(n_); }
  double coord(std::size_t i) const { return static_cast<double>(i) * spacing(); }

  /// Signed integer frequency of FFT index `idx` (full-length axis).
  long frequency(std::size_t idx) const;
  /// Physical wavenumber of FFT index `idx`.
  double wavenumber(std::size_t idx) const;

  std::size_t index(std::size_t i, std::size_t j) const { return i * n_ + j; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  std::size_t n_;
  double length_;
};

/// Real field sampled on a Grid. Row-major: value (i, j) is f(x_i, y_j).
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double fill = 0.0);
  ScalarField(const Grid& grid, std::vector<double> values);

  /// Samples `f(x, y)` at every grid point.
  template <typename F>
  static ScalarField from_function(const Grid& grid, F&& f) {
    ScalarField out(grid);
    for (std::size_t i = 0; i < grid.n(); ++i) {
      for (std::size_t j = 0; j < grid.n(); ++j) {
        out(i, j) = f(grid.coord(i), grid.coord(j));
      }
    }
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[grid_.index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;
  double max() const;
  double min() const;
  double max_abs() const;
  double mean() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Sup norm of a - b.
double sup_distance(const ScalarField& a, const ScalarField& b);

/// Two components on a shared grid.
struct VectorField {
  ScalarField x;
  ScalarField y;

  VectorField(ScalarField x_component, ScalarField y_component);

  const Grid& grid() const { return x.grid(); }
  double sup_magnitude() const;
};

void require_finite(const ScalarField& f, const char* what);
void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what);

}  // namespace markerflow
