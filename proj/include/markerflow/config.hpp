#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "markerflow/transport.hpp"

namespace markerflow {

/// Parse or validation failure in an experiment config. `line` is 0 for
/// validation errors; `field` names the offending key when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line, std::string field)
      : std::runtime_error(what), line(line), field(std::move(field)) {}

  std::size_t line;
  std::string field;
};

enum class ExperimentKind { init_approx, evolve, closure, hausdorff_sweep, pointwise_sweep, nondegeneracy };

const char* to_string(ExperimentKind kind);

/// Which run stands in for the sharp Yudovich solution.
enum class ReferenceKind { sharp, beta_ref };

const char* to_string(ReferenceKind kind);

/// One term amplitude * cos(kx x + ky y + phase) of an explicit marker.
struct MarkerTerm {
  double amplitude = 0.0;
  double kx = 0.0;
  double ky = 0.0;
  double phase = 0.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::init_approx;
  std::string preset;                           // empty when markers are explicit
  std::vector<std::vector<MarkerTerm>> markers;  // explicit marker terms
  std::optional<std::vector<double>> levels;     // required with explicit markers
  std::size_t n = 128;
  std::vector<double> betas;
  double delta = 0.7853981633974483;  // pi / 4
  double strip_delta = 0.5;
  StepControl step;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  double perturbation = 0.0;
  ReferenceKind reference = ReferenceKind::sharp;
  VelocityMode mode = VelocityMode::soft;
  bool restricted = false;
  bool write_pgm = false;

  /// Throws ConfigError naming the field.
  void validate() const;
};

/// `key = value` lines, `#` comments, comma-separated lists. Unknown keys are
/// rejected. Explicit markers use keys marker1, marker2, ... whose values are
/// comma-separated `amplitude:kx:ky:phase` terms.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical `key = value` rendering; parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace markerflow
