#include "markerflow/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "markerflow/io.hpp"
#include "markerflow/presets.hpp"

namespace markerflow {

namespace {

using json = nlohmann::ordered_json;

std::string pair_suffix(std::size_t i, std::size_t j) { return std::to_string(i + 1) + "_" + std::to_string(j + 1); }

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

struct TieArtifact {
  std::string file;
  TieSet tie;
};

struct ImageArtifact {
  std::string file;
  GrayImage image;
};

struct Outcome {
  std::vector<DiagnosticRecord> records;
  std::vector<TieArtifact> ties;
  std::vector<ImageArtifact> images;
  std::vector<std::string> notes;
  std::optional<std::string> failure;
};

// Runs fn(0..count-1) on up to `threads` workers; results stay in index order.
template <typename Fn>
std::vector<Outcome> parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
  std::vector<Outcome> out(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t s = 0; s < count; ++s) out[s] = fn(s);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t s = next++; s < count; s = next++) out[s] = fn(s);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

std::vector<double> comparison_times(const StepControl& ctrl) {
  std::set<double> times = {0.0, ctrl.t_end};
  times.insert(ctrl.sample_times.begin(), ctrl.sample_times.end());
  return {times.begin(), times.end()};
}

bool is_comparison_time(double t, const std::vector<double>& times) {
  return std::find(times.begin(), times.end(), t) != times.end();
}

ImageArtifact heatmap(const MarkerSet& m, VelocityMode mode, const std::string& beta_tag, double t) {
  const auto [lo, hi] = std::minmax_element(m.config.levels.begin(), m.config.levels.end());
  return {"omega_" + beta_tag + "_" + tag(t) + ".pgm", to_heatmap(assemble_vorticity(m, mode), *lo, *hi)};
}

void add_min_gradients(const Spectral& ops, const MarkerSet& m, double strip_delta, DiagnosticRecord& r) {
  for (std::size_t i = 0; i < m.k(); ++i) {
    for (std::size_t j = i + 1; j < m.k(); ++j) {
      r.set("min_grad_strip_" + pair_suffix(i, j), min_gradient_on_strip(ops, m, i, j, strip_delta));
    }
  }
}

void add_conservation(const Spectral& ops, const SimState& s, DiagnosticRecord& r) {
  const ConservationReport c = conservation_report(ops, s);
  r.set("mean_omega", c.mean_omega);
  r.set("enstrophy", c.enstrophy);
  r.set("energy", c.energy);
  r.set("accumulated_gradu", s.accumulated_gradu);
}

Outcome failed(const IntegrationError& e, double beta) {
  Outcome o;
  o.records = e.partial_records;
  o.failure = "beta " + tag(beta) + ": " + e.what();
  return o;
}

}  // namespace

double status_code(BoundStatus status) {
  switch (status) {
    case BoundStatus::pass:
      return 1.0;
    case BoundStatus::fail:
      return 0.0;
    case BoundStatus::degenerate:
      return 2.0;
    case BoundStatus::skipped:
      return -1.0;
  }
  return -1.0;
}

DiagnosticRecord compare_to_reference(const MarkerSet& soft, const MarkerSet& reference,
                                      double t, const ComparisonOptions& opts) {
  DiagnosticRecord r;
  r.t = t;
  r.beta = soft.config.beta;
  const Grid& grid = soft.grid;
  r.set("marker_sup_error", marker_sup_error(soft, reference));

  const ScalarField soft_w = assemble_soft_vorticity(soft);
  const ScalarField sharp_w = assemble_sharp_vorticity(reference);
  r.set("l1_error", l1_error(soft_w, sharp_w));

  const DistanceField dist = distance_to_network(grid, extract_network(reference, true));
  if (dist.empty) r.notes.push_back("reference phase boundary is empty");
  r.set("c_delta", gap_infimum(reference, dist.distance, opts.delta));
  r.set("sup_error_delta", sup_error_away(soft_w, sharp_w, dist, opts.delta));

  const BoundCheck check = verify_pointwise_bound(r, soft.config.levels, grid.spacing());
  r.set("pointwise_bound", check.bound);
  r.set("pointwise_margin", check.margin);
  r.set("pointwise_status", status_code(check.status));
  if (!check.note.empty()) r.notes.push_back(check.note);

  if (opts.hausdorff) {
    const TieSetNetwork ref_net = extract_network(reference, opts.restricted);
    const TieSetNetwork soft_net = extract_network(soft, opts.restricted);
    const double spacing = 0.5 * grid.spacing();
    for (std::size_t p = 0; p < ref_net.pairs.size(); ++p) {
      const auto a = resample(soft_net.pairs[p].polylines, spacing, grid.length());
      const auto b = resample(ref_net.pairs[p].polylines, spacing, grid.length());
      const std::string key = "hausdorff_" + pair_suffix(ref_net.pairs[p].i, ref_net.pairs[p].j);
      if (a.empty() && b.empty()) {
        r.notes.push_back(key + ": both tie sets empty");
        continue;
      }
      r.set(key, hausdorff(a, b, grid.length()));
    }
  }
  return r;
}

int run_experiment(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log) {
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitValidation;
  }
  const std::filesystem::path out_dir = opts.out_dir.value_or(std::filesystem::path(cfg.out_dir));
  std::filesystem::create_directories(out_dir);

  const Grid grid(cfg.n);
  const Spectral ops(grid);
  std::optional<MarkerSet> base;
  try {
    base = build_initial(cfg, grid, cfg.betas.front());
  } catch (const InvalidInput& e) {
    log << "config error: " << e.what() << "\n";
    return kExitValidation;
  }
  auto initial_at = [&](double beta) {
    MarkerSet m = *base;
    m.config.beta = beta;
    return m;
  };

  json manifest;
  manifest["tool"] = "markerflow";
  manifest["version"] = kVersion;
  manifest["kind"] = to_string(cfg.kind);
  {
    json echo = json::object();
    std::istringstream lines(render_config(cfg));
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find(" = ");
      echo[line.substr(0, eq)] = line.substr(eq + 3);
    }
    manifest["config"] = echo;
  }
  manifest["grid"] = {{"n", grid.n()}, {"length", grid.length()}, {"spacing", grid.spacing()}};
  {
    json constants = json::array();
    for (const auto& c : measure_nondegeneracy(ops, *base, cfg.strip_delta)) {
      constants.push_back({{"pair", std::to_string(c.i + 1) + "-" + std::to_string(c.j + 1)},
                           {"strip_delta", c.strip_delta},
                           {"m", number(c.m)},
                           {"tie_vertices", c.tie_vertices}});
    }
    manifest["preset_constants"] = constants;
  }

  const auto times = comparison_times(cfg.step);
  StepControl ctrl = cfg.step;
  ctrl.sample_times = times;
  ComparisonOptions cmp;
  cmp.delta = cfg.delta;
  cmp.restricted = cfg.restricted;

  std::vector<Outcome> outcomes;
  std::optional<std::string> reference_failure;
  const std::size_t count = cfg.betas.size();

  switch (cfg.kind) {
    case ExperimentKind::init_approx: {
      cmp.hausdorff = false;
      outcomes = parallel_map(count, opts.threads, [&](std::size_t s) {
        Outcome o;
        const MarkerSet m = initial_at(cfg.betas[s]);
        o.records.push_back(compare_to_reference(m, m, 0.0, cmp));
        if (cfg.write_pgm) o.images.push_back(heatmap(m, VelocityMode::soft, tag(cfg.betas[s]), 0.0));
        return o;
      });
      break;
    }
    case ExperimentKind::evolve:
    case ExperimentKind::nondegeneracy: {
      const bool nondeg = cfg.kind == ExperimentKind::nondegeneracy;
      outcomes = parallel_map(count, opts.threads, [&](std::size_t s) {
        const double beta = cfg.betas[s];
        Outcome o;
        std::map<std::string, double> m0;
        auto hook = [&](const SimState& st, std::vector<DiagnosticRecord>& records) {
          DiagnosticRecord r;
          r.t = st.time;
          r.beta = beta;
          add_conservation(ops, st, r);
          add_min_gradients(ops, st.markers, cfg.strip_delta, r);
          double range = 0.0;
          for (const auto& phi : st.markers.markers) range = std::max(range, phi.max_abs());
          r.set("marker_max_abs", range);
          if (nondeg) {
            for (const auto& [key, value] : r.entries) {
              if (key.rfind("min_grad_strip_", 0) != 0) continue;
              const std::string pair = key.substr(15);
              if (st.step_count == 0 && !m0.count(pair)) m0[pair] = value;
              const double bound = 0.9 * m0[pair] * std::exp(-st.accumulated_gradu);
              r.set("nondeg_bound_" + pair, bound);
              // An empty strip (+inf) satisfies the bound vacuously.
              r.set("nondeg_ok_" + pair, value >= bound ? 1.0 : 0.0);
            }
          }
          if (cfg.write_pgm && is_comparison_time(st.time, times)) {
            o.images.push_back(heatmap(st.markers, st.mode, tag(beta), st.time));
          }
          records.push_back(std::move(r));
        };
        try {
          o.records = run(ops, initial_at(beta), cfg.mode, ctrl, hook).records;
        } catch (const IntegrationError& e) {
          auto f = failed(e, beta);
          f.images = std::move(o.images);
          return f;
        }
        return o;
      });
      break;
    }
    case ExperimentKind::closure: {
      outcomes = parallel_map(count, opts.threads, [&](std::size_t s) {
        const double beta = cfg.betas[s];
        Outcome o;
        auto hook = [&](const SimState& st, const VorticityState& direct, std::vector<DiagnosticRecord>& records) {
          DiagnosticRecord r;
          r.t = st.time;
          r.beta = beta;
          r.set("closure_residual", closure_residual(direct.omega, st.markers));
          add_conservation(ops, st, r);
          const ConservationReport d = conservation_report(ops, direct.omega);
          r.set("mean_omega_direct", d.mean_omega);
          r.set("enstrophy_direct", d.enstrophy);
          r.set("energy_direct", d.energy);
          records.push_back(std::move(r));
        };
        try {
          o.records = run_with_direct(ops, initial_at(beta), cfg.mode, ctrl, hook).records;
        } catch (const IntegrationError& e) {
          return failed(e, beta);
        }
        return o;
      });
      break;
    }
    case ExperimentKind::hausdorff_sweep:
    case ExperimentKind::pointwise_sweep: {
      const bool write_ties = cfg.kind == ExperimentKind::hausdorff_sweep;
      cmp.hausdorff = write_ties;
      const bool sharp_ref = cfg.reference == ReferenceKind::sharp;
      const double ref_beta = sharp_ref ? cfg.betas.back() : 4.0 * cfg.betas.back();
      manifest["reference"] = {{"kind", to_string(cfg.reference)}, {"beta", sharp_ref ? json("inf") : json(ref_beta)}};
      std::map<double, MarkerSet> reference;
      Outcome ref_outcome;
      try {
        const auto ref_run = run(ops, initial_at(ref_beta), sharp_ref ? VelocityMode::sharp : VelocityMode::soft, ctrl);
        for (const auto& st : ref_run.snapshots) {
          if (!is_comparison_time(st.time, times)) continue;
          reference.insert_or_assign(st.time, st.markers);
          if (write_ties) {
            for (auto& tie : extract_network(st.markers, cfg.restricted).pairs) {
              const std::string file = "tieset_" + std::to_string(tie.i + 1) + "-" + std::to_string(tie.j + 1) +
                                       "_ref_" + tag(st.time) + ".csv";
              ref_outcome.ties.push_back({file, std::move(tie)});
            }
          }
        }
      } catch (const IntegrationError& e) {
        reference_failure = std::string("reference run: ") + e.what();
        break;
      }
      outcomes = parallel_map(count, opts.threads, [&](std::size_t s) {
        const double beta = cfg.betas[s];
        Outcome o;
        auto hook = [&](const SimState& st, std::vector<DiagnosticRecord>& records) {
          auto ref = reference.find(st.time);
          if (!is_comparison_time(st.time, times) || ref == reference.end()) return;
          DiagnosticRecord r = compare_to_reference(st.markers, ref->second, st.time, cmp);
          r.set("accumulated_gradu", st.accumulated_gradu);
          records.push_back(std::move(r));
          if (write_ties) {
            for (auto& tie : extract_network(st.markers, cfg.restricted).pairs) {
              const std::string file = "tieset_" + std::to_string(tie.i + 1) + "-" + std::to_string(tie.j + 1) +
                                       "_" + tag(beta) + "_" + tag(st.time) + ".csv";
              o.ties.push_back({file, std::move(tie)});
            }
          }
          if (cfg.write_pgm) o.images.push_back(heatmap(st.markers, VelocityMode::soft, tag(beta), st.time));
        };
        try {
          o.records = run(ops, initial_at(beta), VelocityMode::soft, ctrl, hook).records;
        } catch (const IntegrationError& e) {
          auto f = failed(e, beta);
          f.ties = std::move(o.ties);
          f.images = std::move(o.images);
          return f;
        }
        return o;
      });
      outcomes.push_back(std::move(ref_outcome));
      break;
    }
  }

  // Single collector: every file is written from here.
  std::vector<DiagnosticRecord> records;
  json files = json::array({"manifest.json", "records.csv"});
  json notes = json::array();
  std::vector<std::string> failures;
  if (reference_failure) failures.push_back(*reference_failure);
  for (auto& o : outcomes) {
    for (auto& r : o.records) {
      for (const auto& n : r.notes) notes.push_back("t=" + format_number(r.t) + " beta=" + tag(r.beta) + ": " + n);
      records.push_back(std::move(r));
    }
    for (const auto& t : o.ties) {
      write_tieset_csv(out_dir / t.file, t.tie);
      files.push_back(t.file);
    }
    for (const auto& img : o.images) {
      write_pgm(out_dir / img.file, img.image);
      files.push_back(img.file);
    }
    if (o.failure) failures.push_back(*o.failure);
  }
  write_records_csv(out_dir / "records.csv", records);

  if (cfg.kind == ExperimentKind::init_approx && count >= 3) {
    std::vector<double> l1, sup;
    for (const auto& r : records) {
      l1.push_back(r.get("l1_error"));
      sup.push_back(r.get("sup_error_delta"));
    }
    json fits = json::object();
    auto add_fit = [&](const char* name, const std::vector<double>& ys, RateModel model) {
      try {
        const RateFit f = fit_rate(cfg.betas, ys, model);
        fits[name] = {{"model", model == RateModel::reciprocal ? "reciprocal" : "exponential"},
                      {"slope", f.slope},
                      {"intercept", f.intercept},
                      {"r2", f.r2},
                      {"notes", f.notes}};
      } catch (const InvalidInput& e) {
        fits[name] = {{"error", e.what()}};
      }
    };
    add_fit("l1_error", l1, RateModel::reciprocal);
    if (std::all_of(sup.begin(), sup.end(), [](double v) { return std::isfinite(v); })) {
      add_fit("sup_error_delta", sup, RateModel::exponential);
    }
    manifest["fits"] = fits;
  }

  manifest["files"] = files;
  manifest["notes"] = notes;
  manifest["failures"] = failures;
  manifest["status"] = failures.empty() ? "ok" : "integration-failure";
  {
    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << "\n";
  }
  for (const auto& f : failures) log << "integration failure: " << f << "\n";
  log << "wrote " << records.size() << " records to " << (out_dir / "records.csv").string() << "\n";
  return failures.empty() ? kExitOk : kExitIntegration;
}

}  // namespace markerflow
