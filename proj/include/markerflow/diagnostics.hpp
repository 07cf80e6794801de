#pragma once

#include <span>
#include <string>
#include <vector>

#include "markerflow/geometry.hpp"
#include "markerflow/record.hpp"
#include "markerflow/transport.hpp"

namespace markerflow {

/// h^2 sum |a - b| (rectangle rule on the periodic grid).
double l1_error(const ScalarField& a, const ScalarField& b);

/// max |a - b| over grid points with dist >= delta; plain sup norm for
/// delta <= 0, +inf if no point qualifies.
double sup_error_away(const ScalarField& a, const ScalarField& b, const DistanceField& dist, double delta);

/// max_k ||phi_k^soft - phi_k^sharp||_inf.
double marker_sup_error(const MarkerSet& soft, const MarkerSet& sharp);

/// sup |direct_omega - assemble_soft_vorticity(m)|.
double closure_residual(const ScalarField& direct_omega, const MarkerSet& m);

enum class BoundStatus { pass, fail, degenerate, skipped };

const char* to_string(BoundStatus status);

struct BoundCheck {
  BoundStatus status = BoundStatus::skipped;
  double bound = 0.0;
  double measured = 0.0;
  /// bound / measured; +inf when measured is zero.
  double margin = 0.0;
  std::string note;
};

/// Checks sup_error_delta <= (K-1) spread(levels) exp(-beta (c_delta - 2 E))
/// using the record entries sup_error_delta, c_delta and marker_sup_error.
/// A measured value may exceed the bound by the grid slack factor (1 + 10h).
/// When c_delta - 2E <= 0 the bound carries no information and the check is
/// reported as degenerate instead of pass/fail.
BoundCheck verify_pointwise_bound(const DiagnosticRecord& record, std::span<const double> levels, double spacing);

enum class RateModel { reciprocal, exponential };

struct RateFit {
  std::vector<double> xs;
  std::vector<double> ys;
  RateModel model = RateModel::reciprocal;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<std::string> notes;
};

/// Least squares in (log x, log y) for the reciprocal model or (x, log y) for
/// the exponential one. Zero samples are dropped with a note.
RateFit fit_rate(std::span<const double> xs, std::span<const double> ys, RateModel model);

struct ConservationReport {
  double mean_omega = 0.0;
  double enstrophy = 0.0;  // ||omega||_{L2}^2
  double energy = 0.0;     // 0.5 ||u||_{L2}^2
};

ConservationReport conservation_report(const Spectral& ops, const ScalarField& omega);
/// Uses the vorticity assembled in the state's own mode.
ConservationReport conservation_report(const Spectral& ops, const SimState& state);

}  // namespace markerflow
