#include "markerflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace markerflow {

const char* to_string(VelocityMode mode) { return mode == VelocityMode::soft ? "soft" : "sharp"; }

void StepControl::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidInput("cfl must lie in (0, 1]");
  if (!(dt_max > 0.0)) throw InvalidInput("dt_max must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidInput("t_end must be finite and >= 0");
  if (save_every < 1) throw InvalidInput("save_every must be >= 1");
  for (double t : sample_times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("sample times must be finite and >= 0");
  }
}

ScalarField assemble_vorticity(const MarkerSet& m, VelocityMode mode) {
  return mode == VelocityMode::soft ? assemble_soft_vorticity(m) : assemble_sharp_vorticity(m);
}

VectorField induced_velocity(const Spectral& ops, const SimState& s) {
  return ops.velocity_from_vorticity(assemble_vorticity(s.markers, s.mode));
}

double cfl_dt(const VectorField& u, const StepControl& ctrl, const Grid& grid, double remaining) {
  const double speed = std::max(u.sup_magnitude(), 1e-12);
  const double dt = std::min(ctrl.dt_max, ctrl.cfl * grid.spacing() / speed);
  return std::min(dt, remaining);
}

namespace {

double direction_sign(Direction dir) { return dir == Direction::forward ? 1.0 : -1.0; }

// Tendency -sign * P(u . grad f) for each field, u evaluated once per stage.
std::vector<ScalarField> tendency(const Spectral& ops, const VectorField& u, const std::vector<ScalarField>& fields,
                                  double sign) {
  std::vector<ScalarField> out;
  out.reserve(fields.size());
  for (const auto& f : fields) {
    ScalarField r = ops.advection(u, f);
    r *= -sign;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ScalarField> axpy(const std::vector<ScalarField>& y, double a, const std::vector<ScalarField>& x) {
  std::vector<ScalarField> out = y;
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto dst = out[k].values();
    auto src = x[k].values();
    for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += a * src[p];
  }
  return out;
}

bool all_finite(const std::vector<ScalarField>& fields) {
  return std::all_of(fields.begin(), fields.end(), [](const ScalarField& f) { return f.all_finite(); });
}

// Classical RK4 on a list of transported fields; `velocity_of` maps stage
// fields to the advecting velocity. Returns the new fields plus the velocity
// gradient norms at both step endpoints.
template <typename VelocityOf>
std::vector<ScalarField> rk4(const Spectral& ops, const std::vector<ScalarField>& y0, double dt, double sign,
                             VelocityOf&& velocity_of, double& gradu_start) {
  const VectorField u1 = velocity_of(y0);
  if (std::isnan(gradu_start)) gradu_start = grad_u_sup_norm(ops, u1);
  const auto k1 = tendency(ops, u1, y0, sign);
  const auto y1 = axpy(y0, 0.5 * dt, k1);
  const auto k2 = tendency(ops, velocity_of(y1), y1, sign);
  const auto y2 = axpy(y0, 0.5 * dt, k2);
  const auto k3 = tendency(ops, velocity_of(y2), y2, sign);
  const auto y3 = axpy(y0, dt, k3);
  const auto k4 = tendency(ops, velocity_of(y3), y3, sign);

  std::vector<ScalarField> out = y0;
  const double w1 = dt / 6.0;
  const double w2 = dt / 3.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto dst = out[k].values();
    auto a = k1[k].values();
    auto b = k2[k].values();
    auto c = k3[k].values();
    auto d = k4[k].values();
    for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += w1 * (a[p] + d[p]) + w2 * (b[p] + c[p]);
  }
  return out;
}

}  // namespace

SimState advect_step(const Spectral& ops, const SimState& s, double dt, Direction dir) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("advect_step: dt must be positive");
  const double sign = direction_sign(dir);
  auto velocity_of = [&](const std::vector<ScalarField>& fields) {
    MarkerSet stage(s.markers.grid, fields, s.markers.config);
    return ops.velocity_from_vorticity(assemble_vorticity(stage, s.mode));
  };

  double g0 = s.gradu_now;
  std::vector<ScalarField> next;
  try {
    next = rk4(ops, s.markers.markers, dt, sign, velocity_of, g0);
  } catch (const InvalidInput& e) {
    throw IntegrationError(std::string("marker step failed: ") + e.what(), s);
  }
  if (!all_finite(next)) throw IntegrationError("marker step produced non-finite values", s);

  SimState out = s;
  out.markers.markers = std::move(next);
  const double g1 = grad_u_sup_norm(ops, induced_velocity(ops, out));
  out.accumulated_gradu += 0.5 * dt * (g0 + g1);
  out.gradu_now = g1;
  out.time += sign * dt;
  out.step_count += 1;
  return out;
}

VorticityState advect_vorticity_step(const Spectral& ops, const VorticityState& s, double dt, Direction dir) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("advect_vorticity_step: dt must be positive");
  const double sign = direction_sign(dir);
  auto velocity_of = [&](const std::vector<ScalarField>& fields) {
    return ops.velocity_from_vorticity(fields.front());
  };

  double g0 = s.gradu_now;
  std::vector<ScalarField> next;
  try {
    next = rk4(ops, {s.omega}, dt, sign, velocity_of, g0);
  } catch (const InvalidInput& e) {
    throw IntegrationError(std::string("vorticity step failed: ") + e.what(), std::nullopt);
  }
  if (!all_finite(next)) throw IntegrationError("vorticity step produced non-finite values", std::nullopt);

  VorticityState out = s;
  out.omega = std::move(next.front());
  const double g1 = grad_u_sup_norm(ops, ops.velocity_from_vorticity(out.omega));
  out.accumulated_gradu += 0.5 * dt * (g0 + g1);
  out.gradu_now = g1;
  out.time += sign * dt;
  out.step_count += 1;
  return out;
}

namespace {

constexpr double kTimeSnap = 1e-12;

// Shared save-point bookkeeping for marker and vorticity runs.
template <typename State, typename Step, typename Velocity, typename OnSave>
void drive(State& state, const StepControl& ctrl, const Grid& grid, Step&& step, Velocity&& velocity,
           OnSave&& on_save) {
  ctrl.validate();
  std::vector<double> samples;
  for (double t : ctrl.sample_times) {
    if (t > state.time + kTimeSnap && t < ctrl.t_end - kTimeSnap) samples.push_back(t);
  }
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
  std::size_t next_sample = 0;

  on_save(state);
  long steps = 0;
  bool saved_last = true;
  while (state.time < ctrl.t_end - kTimeSnap) {
    const double target = next_sample < samples.size() ? samples[next_sample] : ctrl.t_end;
    const double dt = cfl_dt(velocity(state), ctrl, grid, target - state.time);
    state = step(state, dt);
    ++steps;
    bool hit_sample = false;
    if (std::abs(state.time - target) <= kTimeSnap) {
      state.time = target;
      if (next_sample < samples.size()) {
        ++next_sample;
        hit_sample = true;
      }
    }
    saved_last = false;
    if (hit_sample || steps % ctrl.save_every == 0) {
      on_save(state);
      saved_last = true;
    }
  }
  if (!saved_last) on_save(state);
}

}  // namespace

std::vector<VorticityState> evolve_vorticity_direct(const Spectral& ops, const ScalarField& omega0,
                                                    const StepControl& ctrl) {
  require_finite(omega0, "evolve_vorticity_direct");
  VorticityState state(omega0);
  std::vector<VorticityState> trajectory;
  drive(
      state, ctrl, ops.grid(), [&](const VorticityState& s, double dt) { return advect_vorticity_step(ops, s, dt); },
      [&](const VorticityState& s) { return ops.velocity_from_vorticity(s.omega); },
      [&](const VorticityState& s) { trajectory.push_back(s); });
  return trajectory;
}

RunResult run_from(const Spectral& ops, SimState state, const StepControl& ctrl, const DiagnosticHook& hook) {
  state.markers.validate();
  RunResult result;
  auto on_save = [&](const SimState& s) {
    result.snapshots.push_back(s);
    if (hook) hook(s, result.records);
  };
  try {
    drive(
        state, ctrl, ops.grid(), [&](const SimState& s, double dt) { return advect_step(ops, s, dt); },
        [&](const SimState& s) { return induced_velocity(ops, s); }, on_save);
  } catch (IntegrationError& e) {
    e.partial_snapshots = std::move(result.snapshots);
    e.partial_records = std::move(result.records);
    throw;
  }
  return result;
}

namespace {

struct PairedState {
  double time = 0.0;
  SimState markers;
  VorticityState direct;
};

}  // namespace

RunResult run_with_direct(const Spectral& ops, const MarkerSet& initial, VelocityMode mode, const StepControl& ctrl,
                          const PairedHook& hook) {
  SimState s(initial, mode);
  VorticityState w(assemble_vorticity(initial, mode));
  PairedState state{0.0, std::move(s), std::move(w)};
  RunResult result;
  auto on_save = [&](const PairedState& p) {
    result.snapshots.push_back(p.markers);
    if (hook) hook(p.markers, p.direct, result.records);
  };
  auto step = [&](const PairedState& p, double dt) {
    PairedState next{0.0, advect_step(ops, p.markers, dt), advect_vorticity_step(ops, p.direct, dt)};
    next.time = next.markers.time;
    return next;
  };
  try {
    drive(
        state, ctrl, ops.grid(), step, [&](const PairedState& p) { return induced_velocity(ops, p.markers); },
        [&](PairedState& p) {
          // Keep the component clocks identical to the snapped driver clock.
          p.markers.time = p.time;
          p.direct.time = p.time;
          on_save(p);
        });
  } catch (IntegrationError& e) {
    e.partial_snapshots = std::move(result.snapshots);
    e.partial_records = std::move(result.records);
    throw;
  }
  return result;
}

RunResult run(const Spectral& ops, const MarkerSet& initial, VelocityMode mode, const StepControl& ctrl,
              const DiagnosticHook& hook) {
  return run_from(ops, SimState(initial, mode), ctrl, hook);
}

}  // namespace markerflow
