#pragma once

#include <span>
#include <vector>

#include "markerflow/grid.hpp"

namespace markerflow {

/// Vorticity levels c_1..c_K and the softmax sharpness beta.
struct PhaseConfig {
  std::vector<double> levels;
  double beta = 1.0;

  std::size_t k() const { return levels.size(); }
  double level_spread() const;  // max_{i,j} |c_i - c_j|
  void validate() const;
};

/// K transported marker fields phi_k sharing one grid.
struct MarkerSet {
  Grid grid;
  std::vector<ScalarField> markers;
  PhaseConfig config;

  MarkerSet(Grid g, std::vector<ScalarField> fields, PhaseConfig cfg);

  std::size_t k() const { return markers.size(); }
  void validate() const;
  /// Scores phi_1(x)..phi_K(x) at flat grid index `p`.
  void scores_at(std::size_t p, std::span<double> out) const;
};

/// Softmax weights pi_1..pi_K; sum to one at every point.
struct WeightField {
  std::vector<ScalarField> weights;
};

/// Weights below this are flushed to zero.
inline constexpr double kUnderflowFlush = 1e-300;

/// pi_k = exp(beta phi_k) / sum_j exp(beta phi_j), evaluated after
/// subtracting max_j phi_j.
std::vector<double> softmax_weights(std::span<const double> scores, double beta);

/// Unchecked kernel behind softmax_weights; `out` must have scores.size().
void softmax_into(std::span<const double> scores, double beta, std::span<double> out);

/// First index of the maximal score (ties go to the lowest index).
std::size_t argmax_index(std::span<const double> scores);

WeightField compute_weights(const MarkerSet& m);

/// omega(x) = sum_k c_k pi_k(x).
ScalarField assemble_soft_vorticity(const MarkerSet& m);

/// omega(x) = c_{k*(x)}, k* the argmax marker, lowest index on ties.
ScalarField assemble_sharp_vorticity(const MarkerSet& m);

/// Largest minus second-largest marker value at every point.
ScalarField winner_gap(const MarkerSet& m);

/// Infimum of the winner gap over points with dist_to_tie >= delta.
/// Returns +infinity when no grid point qualifies.
double gap_infimum(const MarkerSet& m, const ScalarField& dist_to_tie, double delta);

}  // namespace markerflow
