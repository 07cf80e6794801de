#include "markerflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace markerflow {

Grid::Grid(std::size_t n, double length) : n_(n), length_(length) {
  if (n < 16 || (n & (n - 1)) != 0) {
    throw InvalidInput("grid size must be a power of two >= 16, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidInput("grid period must be positive and finite");
  }
}

long Grid::frequency(std::size_t idx) const {
  const auto k = static_cast<long>(idx);
  const auto half = static_cast<long>(n_ / 2);
  return k <= half ? k : k - static_cast<long>(n_);
}

double Grid::wavenumber(std::size_t idx) const {
  return 2.0 * std::numbers::pi / length_ * static_cast<double>(frequency(idx));
}

ScalarField::ScalarField(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidInput("field size " + std::to_string(values_.size()) + " does not match grid " +
                       std::to_string(grid_.n()) + "x" + std::to_string(grid_.n()));
  }
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(*this, other, "field addition");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(*this, other, "field subtraction");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

double sup_distance(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b, "sup_distance");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

VectorField::VectorField(ScalarField x_component, ScalarField y_component)
    : x(std::move(x_component)), y(std::move(y_component)) {
  require_same_grid(x, y, "vector field components");
}

double VectorField::sup_magnitude() const {
  double m = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, std::hypot(x[k], y[k]));
  return m;
}

void require_finite(const ScalarField& f, const char* what) {
  if (!f.all_finite()) throw InvalidInput(std::string(what) + ": field contains non-finite values");
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!(a.grid() == b.grid())) throw InvalidInput(std::string(what) + ": fields live on different grids");
}

}  // namespace markerflow
