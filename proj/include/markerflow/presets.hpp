#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "markerflow/config.hpp"
#include "markerflow/gating.hpp"
#include "markerflow/spectral.hpp"

namespace markerflow {

struct PresetInfo {
  std::string name;
  std::size_t k = 0;
  std::string description;
};

/// shear2, cells3, bands3.
const std::vector<PresetInfo>& preset_catalog();

/// Markers and levels of a named preset, sampled on `grid`, at sharpness beta.
MarkerSet build_preset(const std::string& name, const Grid& grid, double beta = 1.0);

/// sum_t amplitude cos(kx x + ky y + phase) per marker.
MarkerSet build_explicit(const std::vector<std::vector<MarkerTerm>>& markers, const std::vector<double>& levels,
                         const Grid& grid, double beta = 1.0);

/// Initial markers described by a config (preset or explicit, level override,
/// seeded perturbation).
MarkerSet build_initial(const ExperimentConfig& cfg, const Grid& grid, double beta);

/// Adds a seeded random trigonometric polynomial (modes |kx|, |ky| <= 2,
/// coefficients uniform in [-amplitude, amplitude]) to every marker.
void apply_perturbation(MarkerSet& m, double amplitude, std::uint64_t seed);

/// Measured nondegeneracy constant for one pair.
struct PairConstant {
  std::size_t i = 0;
  std::size_t j = 0;
  double strip_delta = 0.0;
  /// min |grad(phi_i - phi_j)| on the restricted strip; +inf if the strip is
  /// empty (the pair never competes).
  double m = 0.0;
  /// Points of the restricted tie set found by the contour extractor.
  std::size_t tie_vertices = 0;
};

std::vector<PairConstant> measure_nondegeneracy(const Spectral& ops, const MarkerSet& m, double strip_delta);

}  // namespace markerflow
