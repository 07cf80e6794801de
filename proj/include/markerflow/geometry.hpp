#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "markerflow/gating.hpp"
#include "markerflow/spectral.hpp"

namespace markerflow {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Ordered vertices on the torus, each wrapped into [0, L)^2. Consecutive
/// vertices are joined by the shortest periodic displacement.
struct Polyline {
  std::vector<Point> points;
  bool closed = false;
};

/// Zero set of phi_i - phi_j (0-based i < j).
struct TieSet {
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<Polyline> polylines;
};

struct TieSetNetwork {
  std::vector<TieSet> pairs;
  bool restricted = false;

  /// All polylines resampled at spacing <= `spacing`, concatenated.
  std::vector<Point> sample_points(double spacing, double length) const;
};

/// Fat tie set: phi_i - phi_j vanishes identically.
class DegenerateTieSet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Mask {
  Grid grid;
  std::vector<std::uint8_t> values;

  bool operator[](std::size_t p) const { return values[p] != 0; }
  std::size_t count() const;
};

/// Shortest distance between two points on the torus of period `length`.
double periodic_distance(Point a, Point b, double length);

/// Points where phi_i and phi_j both are >= every other marker.
Mask top_two_mask(const MarkerSet& m, std::size_t i, std::size_t j);

/// Marching-squares contour of phi_i - phi_j = 0 with linear edge
/// interpolation. Saddle cells are split by the sign of the cell-center
/// average. With `restricted`, cells with no corner in the top-two mask are
/// skipped.
TieSet extract_tie_set(const MarkerSet& m, std::size_t i, std::size_t j, bool restricted = false);

/// Every pair i < j. Pairs whose difference vanishes identically throw.
TieSetNetwork extract_network(const MarkerSet& m, bool restricted = false);

/// Resamples polylines so consecutive points are at most `spacing` apart.
std::vector<Point> resample(std::span<const Polyline> polylines, double spacing, double length);

struct DistanceField {
  ScalarField distance;
  /// The point set was empty; `distance` is +inf everywhere.
  bool empty = false;
};

/// Periodic distance from every grid point to the nearest point of `pts`.
DistanceField distance_to_set(const Grid& grid, std::span<const Point> pts);

/// Distance to a tie network, polylines resampled at h/2 first.
DistanceField distance_to_network(const Grid& grid, const TieSetNetwork& network);

/// Symmetric Hausdorff distance under the periodic metric. Uses a bucket grid
/// with early exit; +inf when either set is empty.
double hausdorff(std::span<const Point> a, std::span<const Point> b, double length);

/// Plain O(|a||b|) evaluation of the same quantity.
double hausdorff_brute_force(std::span<const Point> a, std::span<const Point> b, double length);

/// Minimum of |grad(phi_i - phi_j)| over the strip {|phi_i - phi_j| <= delta}
/// intersected with the top-two region; +inf if the strip is empty.
///
/// Grid points are scanned, and the strip boundary |f| = delta is located on
/// every grid line by root-finding the band-limited interpolant, so the
/// boundary minimum is not quantized to the grid.
double min_gradient_on_strip(const Spectral& ops, const MarkerSet& m, std::size_t i, std::size_t j, double delta);

}  // namespace markerflow
