#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "markerflow/gating.hpp"
#include "markerflow/record.hpp"
#include "markerflow/spectral.hpp"

namespace markerflow {

/// Which vorticity assembly drives the velocity.
enum class VelocityMode { soft, sharp };

const char* to_string(VelocityMode mode);

struct StepControl {
  double cfl = 0.5;
  double dt_max = 0.05;
  double t_end = 1.0;
  int save_every = 10;
  /// Times the integrator must land on exactly; each one is a save point.
  std::vector<double> sample_times;

  void validate() const;
};

/// Sign of the velocity used by a step. Backward runs the same scheme with
/// u -> -u and decreases time.
enum class Direction { forward, backward };

struct SimState {
  double time = 0.0;
  MarkerSet markers;
  VelocityMode mode = VelocityMode::soft;
  /// Trapezoidal integral of ||grad u||_inf over the run so far.
  double accumulated_gradu = 0.0;
  long step_count = 0;
  /// ||grad u||_inf at `time`, NaN until first computed.
  double gradu_now = std::numeric_limits<double>::quiet_NaN();

  explicit SimState(MarkerSet m, VelocityMode md = VelocityMode::soft) : markers(std::move(m)), mode(md) {}
};

/// Transported vorticity for the direct (single-scalar) path.
struct VorticityState {
  double time = 0.0;
  ScalarField omega;
  double accumulated_gradu = 0.0;
  long step_count = 0;
  double gradu_now = std::numeric_limits<double>::quiet_NaN();

  explicit VorticityState(ScalarField w) : omega(std::move(w)) {}
};

/// Step produced non-finite values. Carries the last finite state and
/// whatever a run had collected up to that point.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::optional<SimState> last_good)
      : std::runtime_error(what), last_good(std::move(last_good)) {}

  std::optional<SimState> last_good;
  std::vector<SimState> partial_snapshots;
  std::vector<DiagnosticRecord> partial_records;
};

ScalarField assemble_vorticity(const MarkerSet& m, VelocityMode mode);

VectorField induced_velocity(const Spectral& ops, const SimState& s);

/// min(dt_max, cfl h / max(|u|_sup, 1e-12)), clamped to `remaining`.
double cfl_dt(const VectorField& u, const StepControl& ctrl, const Grid& grid, double remaining);

/// One classical RK4 step of the coupled marker system.
SimState advect_step(const Spectral& ops, const SimState& s, double dt, Direction dir = Direction::forward);

VorticityState advect_vorticity_step(const Spectral& ops, const VorticityState& s, double dt,
                                     Direction dir = Direction::forward);

/// Evolves omega as a transported scalar under its own velocity with the same
/// scheme as advect_step. Returns the initial state, every save_every-th step,
/// each sample time and the final state.
std::vector<VorticityState> evolve_vorticity_direct(const Spectral& ops, const ScalarField& omega0,
                                                    const StepControl& ctrl);

/// Invoked at every save point; may append records.
using DiagnosticHook = std::function<void(const SimState&, std::vector<DiagnosticRecord>&)>;

struct RunResult {
  std::vector<SimState> snapshots;
  std::vector<DiagnosticRecord> records;
};

/// Steps `initial` to ctrl.t_end. Save points are t = 0, every save_every
/// steps, each sample time, and t_end.
RunResult run(const Spectral& ops, const MarkerSet& initial, VelocityMode mode, const StepControl& ctrl,
              const DiagnosticHook& hook = {});

/// Save-point callback for run_with_direct.
using PairedHook = std::function<void(const SimState&, const VorticityState&, std::vector<DiagnosticRecord>&)>;

/// Advances the marker system and the directly transported vorticity
/// omega_0 = assemble(initial) in lockstep: every step uses the same dt, taken
/// from the marker state's velocity. Snapshots hold the marker states.
RunResult run_with_direct(const Spectral& ops, const MarkerSet& initial, VelocityMode mode, const StepControl& ctrl,
                          const PairedHook& hook);

/// Continues an existing state to `t_end` with the same save-point rules.
RunResult run_from(const Spectral& ops, SimState state, const StepControl& ctrl, const DiagnosticHook& hook = {});

}  // namespace markerflow
