#include "markerflow/gating.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace markerflow {

double PhaseConfig::level_spread() const {
  if (levels.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(levels.begin(), levels.end());
  return *hi - *lo;
}

void PhaseConfig::validate() const {
  if (levels.size() < 2) throw InvalidInput("phase count must be >= 2");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidInput("beta must be positive and finite");
  for (double c : levels) {
    if (!std::isfinite(c)) throw InvalidInput("phase levels must be finite");
  }
}

MarkerSet::MarkerSet(Grid g, std::vector<ScalarField> fields, PhaseConfig cfg)
    : grid(g), markers(std::move(fields)), config(std::move(cfg)) {
  validate();
}

void MarkerSet::validate() const {
  config.validate();
  if (markers.size() != config.k()) {
    throw InvalidInput("marker count " + std::to_string(markers.size()) + " does not match " +
                       std::to_string(config.k()) + " phase levels");
  }
  for (const auto& phi : markers) {
    if (!(phi.grid() == grid)) throw InvalidInput("markers must share one grid");
  }
}

void MarkerSet::scores_at(std::size_t p, std::span<double> out) const {
  for (std::size_t k = 0; k < markers.size(); ++k) out[k] = markers[k][p];
}

void softmax_into(std::span<const double> scores, double beta, std::span<double> out) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    out[k] = std::exp(beta * (scores[k] - top));
    total += out[k];
  }
  for (double& w : out) {
    w /= total;
    if (w < kUnderflowFlush) w = 0.0;
  }
}

std::vector<double> softmax_weights(std::span<const double> scores, double beta) {
  if (scores.empty()) throw InvalidInput("softmax_weights: no scores");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidInput("softmax_weights: beta must be positive");
  for (double s : scores) {
    if (!std::isfinite(s)) throw InvalidInput("softmax_weights: non-finite score");
  }
  std::vector<double> out(scores.size());
  softmax_into(scores, beta, out);
  return out;
}

std::size_t argmax_index(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

WeightField compute_weights(const MarkerSet& m) {
  m.validate();
  const std::size_t K = m.k();
  WeightField out;
  out.weights.assign(K, ScalarField(m.grid));
  std::vector<double> s(K), w(K);
  for (std::size_t p = 0; p < m.grid.size(); ++p) {
    m.scores_at(p, s);
    softmax_into(s, m.config.beta, w);
    for (std::size_t k = 0; k < K; ++k) out.weights[k][p] = w[k];
  }
  return out;
}

ScalarField assemble_soft_vorticity(const MarkerSet& m) {
  m.validate();
  for (const auto& phi : m.markers) require_finite(phi, "assemble_soft_vorticity");
  const std::size_t K = m.k();
  ScalarField omega(m.grid);
  std::vector<double> s(K), w(K);
  for (std::size_t p = 0; p < m.grid.size(); ++p) {
    m.scores_at(p, s);
    softmax_into(s, m.config.beta, w);
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) acc += m.config.levels[k] * w[k];
    omega[p] = acc;
  }
  return omega;
}

ScalarField assemble_sharp_vorticity(const MarkerSet& m) {
  m.validate();
  const std::size_t K = m.k();
  ScalarField omega(m.grid);
  std::vector<double> s(K);
  for (std::size_t p = 0; p < m.grid.size(); ++p) {
    m.scores_at(p, s);
    omega[p] = m.config.levels[argmax_index(s)];
  }
  return omega;
}

ScalarField winner_gap(const MarkerSet& m) {
  m.validate();
  ScalarField gap(m.grid);
  for (std::size_t p = 0; p < m.grid.size(); ++p) {
    double first = -std::numeric_limits<double>::infinity();
    double second = first;
    for (const auto& phi : m.markers) {
      const double v = phi[p];
      if (v > first) {
        second = first;
        first = v;
      } else if (v > second) {
        second = v;
      }
    }
    gap[p] = first - second;
  }
  return gap;
}

double gap_infimum(const MarkerSet& m, const ScalarField& dist_to_tie, double delta) {
  if (!(delta > 0.0)) throw InvalidInput("gap_infimum: delta must be positive");
  if (!(dist_to_tie.grid() == m.grid)) throw InvalidInput("gap_infimum: distance field on a different grid");
  const ScalarField gap = winner_gap(m);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < gap.size(); ++p) {
    if (dist_to_tie[p] >= delta) best = std::min(best, gap[p]);
  }
  return best;
}

}  // namespace markerflow
