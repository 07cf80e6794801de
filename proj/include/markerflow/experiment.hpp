#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "markerflow/config.hpp"
#include "markerflow/diagnostics.hpp"

namespace markerflow {

inline constexpr const char* kVersion = "1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIntegration = 2;

struct RunOptions {
  /// Overrides cfg.out_dir.
  std::optional<std::filesystem::path> out_dir;
  unsigned threads = 1;
};

struct ComparisonOptions {
  double delta = 0.7853981633974483;
  /// Tie-set variant for Hausdorff distances. The distance used with
  /// `delta` is always to the phase boundary (the restricted network).
  bool restricted = false;
  bool hausdorff = true;
};

/// Soft markers against the reference (sharp) markers at one time: marker
/// error E_beta, L1 and away-from-interface sup errors of the vorticity, the
/// delta-gap of the reference, the pointwise bound check and per-pair
/// Hausdorff distances between the two tie networks.
DiagnosticRecord compare_to_reference(const MarkerSet& soft, const MarkerSet& reference,
                                      double t, const ComparisonOptions& opts);

/// Numeric code stored in records for a BoundStatus: pass 1, fail 0,
/// degenerate 2, skipped -1.
double status_code(BoundStatus status);

/// Runs one configured experiment and writes manifest.json, records.csv and
/// any tie-set / heatmap files into the output directory. Returns kExitOk,
/// kExitValidation or kExitIntegration (partial artifacts are kept).
int run_experiment(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log);

}  // namespace markerflow
