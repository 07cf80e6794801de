#include "markerflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace markerflow {

double l1_error(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b, "l1_error");
  const double h = a.grid().spacing();
  double s = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) s += std::abs(a[p] - b[p]);
  return h * h * s;
}

double sup_error_away(const ScalarField& a, const ScalarField& b, const DistanceField& dist, double delta) {
  require_same_grid(a, b, "sup_error_away");
  require_same_grid(a, dist.distance, "sup_error_away");
  double best = -1.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (delta <= 0.0 || dist.distance[p] >= delta) best = std::max(best, std::abs(a[p] - b[p]));
  }
  return best < 0.0 ? kEmptySentinel : best;
}

double marker_sup_error(const MarkerSet& soft, const MarkerSet& sharp) {
  if (soft.k() != sharp.k()) throw InvalidInput("marker_sup_error: marker counts differ");
  double e = 0.0;
  for (std::size_t k = 0; k < soft.k(); ++k) e = std::max(e, sup_distance(soft.markers[k], sharp.markers[k]));
  return e;
}

double closure_residual(const ScalarField& direct_omega, const MarkerSet& m) {
  return sup_distance(direct_omega, assemble_soft_vorticity(m));
}

const char* to_string(BoundStatus status) {
  switch (status) {
    case BoundStatus::pass:
      return "pass";
    case BoundStatus::fail:
      return "fail";
    case BoundStatus::degenerate:
      return "degenerate";
    case BoundStatus::skipped:
      return "skipped";
  }
  return "unknown";
}

BoundCheck verify_pointwise_bound(const DiagnosticRecord& record, std::span<const double> levels, double spacing) {
  BoundCheck out;
  for (const char* key : {"sup_error_delta", "c_delta", "marker_sup_error"}) {
    if (!record.has(key)) {
      out.note = std::string("missing entry ") + key;
      return out;
    }
  }
  const double measured = record.get("sup_error_delta");
  const double c_delta = record.get("c_delta");
  const double e_beta = record.get("marker_sup_error");
  if (is_sentinel(measured) || is_sentinel(c_delta) || !std::isfinite(e_beta)) {
    out.note = "sentinel input (empty exclusion region)";
    return out;
  }
  const auto K = static_cast<double>(levels.size());
  const auto [lo, hi] = std::minmax_element(levels.begin(), levels.end());
  const double prefactor = (K - 1.0) * (*hi - *lo);
  const double exponent = c_delta - 2.0 * e_beta;

  out.measured = measured;
  out.bound = prefactor * std::exp(-record.beta * exponent);
  out.margin = measured == 0.0 ? std::numeric_limits<double>::infinity() : out.bound / measured;
  if (exponent <= 0.0) {
    out.status = BoundStatus::degenerate;
    out.note = "degenerate regime: c_delta - 2 E_beta <= 0";
    return out;
  }
  out.status = measured <= out.bound * (1.0 + 10.0 * spacing) ? BoundStatus::pass : BoundStatus::fail;
  return out;
}

RateFit fit_rate(std::span<const double> xs, std::span<const double> ys, RateModel model) {
  if (xs.size() != ys.size()) throw InvalidInput("fit_rate: xs and ys differ in length");
  RateFit fit;
  fit.model = model;
  std::vector<double> u, v;
  for (std::size_t s = 0; s < xs.size(); ++s) {
    if (!(xs[s] > 0.0) || !std::isfinite(xs[s])) throw InvalidInput("fit_rate: sample positions must be positive");
    if (ys[s] < 0.0 || !std::isfinite(ys[s])) throw InvalidInput("fit_rate: errors must be finite and >= 0");
    if (ys[s] == 0.0) {
      fit.notes.push_back("dropped exact zero at x = " + std::to_string(xs[s]));
      continue;
    }
    fit.xs.push_back(xs[s]);
    fit.ys.push_back(ys[s]);
    u.push_back(model == RateModel::reciprocal ? std::log(xs[s]) : xs[s]);
    v.push_back(std::log(ys[s]));
  }
  if (u.size() < 3) throw InvalidInput("fit_rate: fewer than 3 usable samples");

  const auto count = static_cast<double>(u.size());
  double mu = 0.0, mv = 0.0;
  for (std::size_t s = 0; s < u.size(); ++s) {
    mu += u[s];
    mv += v[s];
  }
  mu /= count;
  mv /= count;
  double suu = 0.0, suv = 0.0, svv = 0.0;
  for (std::size_t s = 0; s < u.size(); ++s) {
    suu += (u[s] - mu) * (u[s] - mu);
    suv += (u[s] - mu) * (v[s] - mv);
    svv += (v[s] - mv) * (v[s] - mv);
  }
  if (suu == 0.0) throw InvalidInput("fit_rate: sample positions are all equal");
  fit.slope = suv / suu;
  fit.intercept = mv - fit.slope * mu;
  double ss_res = 0.0;
  for (std::size_t s = 0; s < u.size(); ++s) {
    const double r = v[s] - (fit.intercept + fit.slope * u[s]);
    ss_res += r * r;
  }
  fit.r2 = svv == 0.0 ? 1.0 : 1.0 - ss_res / svv;
  return fit;
}

ConservationReport conservation_report(const Spectral& ops, const ScalarField& omega) {
  const double h = omega.grid().spacing();
  const VectorField u = ops.velocity_from_vorticity(omega);
  ConservationReport r;
  r.mean_omega = omega.mean();
  double ens = 0.0, ke = 0.0;
  for (std::size_t p = 0; p < omega.size(); ++p) {
    ens += omega[p] * omega[p];
    ke += u.x[p] * u.x[p] + u.y[p] * u.y[p];
  }
  r.enstrophy = h * h * ens;
  r.energy = 0.5 * h * h * ke;
  return r;
}

ConservationReport conservation_report(const Spectral& ops, const SimState& state) {
  return conservation_report(ops, assemble_vorticity(state.markers, state.mode));
}

}  // namespace markerflow
