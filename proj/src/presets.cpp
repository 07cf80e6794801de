#include "markerflow/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "markerflow/geometry.hpp"

namespace markerflow {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = {
      {"shear2", 2, "phi1 = sin y, phi2 = 0, levels (1, -1); steady shear with tie lines y = 0, pi"},
      {"cells3", 3,
       "phi_k = cos(x - a_k) + cos(y - a_k), a_k = 0, 2pi/3, 4pi/3, levels (1, 0, -1); cellular partition with "
       "junctions"},
      {"bands3", 3, "phi_k = cos(y - 2 pi k / 3), k = 1..3, levels (1, 0, -1); steady y-only three-band stack"},
  };
  return catalog;
}

MarkerSet build_preset(const std::string& name, const Grid& grid, double beta) {
  std::vector<ScalarField> fields;
  std::vector<double> levels;
  if (name == "shear2") {
    fields.push_back(ScalarField::from_function(grid, [](double, double y) { return std::sin(y); }));
    fields.emplace_back(grid, 0.0);
    levels = {1.0, -1.0};
  } else if (name == "cells3") {
    for (int k = 0; k < 3; ++k) {
      const double a = 2.0 * kPi * k / 3.0;
      fields.push_back(
          ScalarField::from_function(grid, [a](double x, double y) { return std::cos(x - a) + std::cos(y - a); }));
    }
    levels = {1.0, 0.0, -1.0};
  } else if (name == "bands3") {
    for (int k = 1; k <= 3; ++k) {
      const double shift = 2.0 * kPi * k / 3.0;
      fields.push_back(ScalarField::from_function(grid, [shift](double, double y) { return std::cos(y - shift); }));
    }
    levels = {1.0, 0.0, -1.0};
  } else {
    throw InvalidInput("unknown preset '" + name + "'");
  }
  return MarkerSet(grid, std::move(fields), PhaseConfig{std::move(levels), beta});
}

MarkerSet build_explicit(const std::vector<std::vector<MarkerTerm>>& markers, const std::vector<double>& levels,
                         const Grid& grid, double beta) {
  std::vector<ScalarField> fields;
  for (const auto& terms : markers) {
    fields.push_back(ScalarField::from_function(grid, [&terms](double x, double y) {
      double v = 0.0;
      for (const auto& t : terms) v += t.amplitude * std::cos(t.kx * x + t.ky * y + t.phase);
      return v;
    }));
  }
  return MarkerSet(grid, std::move(fields), PhaseConfig{levels, beta});
}

MarkerSet build_initial(const ExperimentConfig& cfg, const Grid& grid, double beta) {
  MarkerSet m = cfg.preset.empty() ? build_explicit(cfg.markers, *cfg.levels, grid, beta)
                                   : build_preset(cfg.preset, grid, beta);
  if (cfg.levels) {
    if (cfg.levels->size() != m.k()) throw InvalidInput("levels count does not match preset marker count");
    m.config.levels = *cfg.levels;
  }
  if (cfg.perturbation > 0.0) apply_perturbation(m, cfg.perturbation, cfg.seed);
  return m;
}

void apply_perturbation(MarkerSet& m, double amplitude, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  // 53 random bits -> [0, 1); std::uniform_real_distribution is not
  // reproducible across standard libraries.
  auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  for (auto& phi : m.markers) {
    for (int kx = -2; kx <= 2; ++kx) {
      for (int ky = 0; ky <= 2; ++ky) {
        if (ky == 0 && kx <= 0) continue;
        const double a = amplitude * (2.0 * uniform() - 1.0);
        const double phase = 2.0 * kPi * uniform();
        phi += ScalarField::from_function(
            m.grid, [=](double x, double y) { return a * std::cos(kx * x + ky * y + phase); });
      }
    }
  }
}

std::vector<PairConstant> measure_nondegeneracy(const Spectral& ops, const MarkerSet& m, double strip_delta) {
  std::vector<PairConstant> out;
  for (std::size_t i = 0; i < m.k(); ++i) {
    for (std::size_t j = i + 1; j < m.k(); ++j) {
      PairConstant c;
      c.i = i;
      c.j = j;
      c.strip_delta = strip_delta;
      c.m = min_gradient_on_strip(ops, m, i, j, strip_delta);
      for (const auto& line : extract_tie_set(m, i, j, true).polylines) c.tie_vertices += line.points.size();
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace markerflow
