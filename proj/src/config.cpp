#include "markerflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "markerflow/io.hpp"

namespace markerflow {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

struct Line {
  std::string value;
  std::size_t number;
};

double to_double(const std::string& key, const Line& line) {
  const std::string& s = line.value;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("line " + std::to_string(line.number) + ": '" + key + "' expects a number, got '" + s + "'",
                      line.number, key);
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const Line& line) {
  const std::string& s = line.value;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("line " + std::to_string(line.number) + ": '" + key + "' expects a non-negative integer, got '" +
                          s + "'",
                      line.number, key);
  }
  return v;
}

std::vector<double> to_list(const std::string& key, const Line& line) {
  std::vector<double> out;
  for (const auto& item : split(line.value, ',')) out.push_back(to_double(key, {item, line.number}));
  return out;
}

bool to_bool(const std::string& key, const Line& line) {
  if (line.value == "true") return true;
  if (line.value == "false") return false;
  throw ConfigError("line " + std::to_string(line.number) + ": '" + key + "' expects true or false", line.number, key);
}

template <typename Enum>
Enum to_enum(const std::string& key, const Line& line, const std::vector<std::pair<std::string, Enum>>& names) {
  for (const auto& [name, value] : names) {
    if (name == line.value) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : names) allowed += (allowed.empty() ? "" : ", ") + name;
  throw ConfigError("line " + std::to_string(line.number) + ": '" + key + "' must be one of " + allowed, line.number,
                    key);
}

const std::vector<std::pair<std::string, ExperimentKind>> kKinds = {
    {"init-approx", ExperimentKind::init_approx},       {"evolve", ExperimentKind::evolve},
    {"closure", ExperimentKind::closure},               {"hausdorff-sweep", ExperimentKind::hausdorff_sweep},
    {"pointwise-sweep", ExperimentKind::pointwise_sweep}, {"nondegeneracy", ExperimentKind::nondegeneracy},
};

const std::vector<std::pair<std::string, ReferenceKind>> kReferences = {
    {"sharp", ReferenceKind::sharp},
    {"beta-ref", ReferenceKind::beta_ref},
};

const std::vector<std::pair<std::string, VelocityMode>> kModes = {
    {"soft", VelocityMode::soft},
    {"sharp", VelocityMode::sharp},
};

const std::vector<std::pair<std::string, bool>> kVariants = {
    {"restricted", true},
    {"unrestricted", false},
};

std::optional<std::size_t> marker_key_index(const std::string& key) {
  if (key.rfind("marker", 0) != 0 || key.size() == 6) return std::nullopt;
  std::size_t idx = 0;
  const auto [ptr, ec] = std::from_chars(key.data() + 6, key.data() + key.size(), idx);
  if (ec != std::errc() || ptr != key.data() + key.size() || idx == 0) return std::nullopt;
  return idx;
}

std::vector<MarkerTerm> to_terms(const std::string& key, const Line& line) {
  std::vector<MarkerTerm> terms;
  for (const auto& item : split(line.value, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 4) {
      throw ConfigError("line " + std::to_string(line.number) + ": '" + key +
                            "' terms must be amplitude:kx:ky:phase, got '" + item + "'",
                        line.number, key);
    }
    MarkerTerm t;
    t.amplitude = to_double(key, {parts[0], line.number});
    t.kx = to_double(key, {parts[1], line.number});
    t.ky = to_double(key, {parts[2], line.number});
    t.phase = to_double(key, {parts[3], line.number});
    terms.push_back(t);
  }
  return terms;
}

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw ConfigError("invalid '" + field + "': " + why, 0, field);
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (double x : xs) s += (s.empty() ? "" : ",") + format_number(x);
  return s;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  for (const auto& [name, value] : kKinds) {
    if (value == kind) return name.c_str();
  }
  return "?";
}

const char* to_string(ReferenceKind kind) { return kind == ReferenceKind::sharp ? "sharp" : "beta-ref"; }

void ExperimentConfig::validate() const {
  if (preset.empty() && markers.empty()) invalid("preset", "either a preset or marker1.. entries is required");
  if (!preset.empty() && !markers.empty()) invalid("preset", "preset and explicit markers are mutually exclusive");
  if (!markers.empty()) {
    if (markers.size() < 2) invalid("marker1", "at least two markers are required");
    if (!levels) invalid("levels", "explicit markers need levels");
  }
  if (levels) {
    if (!markers.empty() && levels->size() != markers.size()) invalid("levels", "count must match the markers");
    for (double c : *levels) {
      if (!std::isfinite(c)) invalid("levels", "levels must be finite");
    }
  }
  if (n < 16 || (n & (n - 1)) != 0) invalid("n", "must be a power of two >= 16");
  if (betas.empty()) invalid("betas", "at least one beta is required");
  for (std::size_t s = 0; s < betas.size(); ++s) {
    if (!(betas[s] > 0.0) || !std::isfinite(betas[s])) invalid("betas", "values must be positive");
    if (s > 0 && !(betas[s] > betas[s - 1])) invalid("betas", "values must be strictly increasing");
  }
  if (!(delta > 0.0)) invalid("delta", "must be positive");
  if (!(strip_delta > 0.0)) invalid("strip_delta", "must be positive");
  if (!(step.cfl > 0.0 && step.cfl <= 1.0)) invalid("cfl", "must lie in (0, 1]");
  if (!(step.dt_max > 0.0)) invalid("dt_max", "must be positive");
  if (!(step.t_end >= 0.0) || !std::isfinite(step.t_end)) invalid("t_end", "must be finite and >= 0");
  if (step.save_every < 1) invalid("save_every", "must be >= 1");
  for (double t : step.sample_times) {
    if (!(t >= 0.0) || t > step.t_end) invalid("sample_times", "must lie in [0, t_end]");
  }
  if (!(perturbation >= 0.0) || !std::isfinite(perturbation)) invalid("perturbation", "must be finite and >= 0");
  if (out_dir.empty()) invalid("out_dir", "must not be empty");
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, Line> entries;
  std::map<std::size_t, Line> marker_lines;
  std::istringstream in(text);
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'", number, "");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": missing key", number, "");
    if (entries.count(key) || (marker_key_index(key) && marker_lines.count(*marker_key_index(key)))) {
      throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'", number, key);
    }
    if (auto idx = marker_key_index(key)) {
      marker_lines[*idx] = {value, number};
    } else {
      entries[key] = {value, number};
    }
  }

  ExperimentConfig cfg;
  for (const auto& [key, line] : entries) {
    if (key == "kind") {
      cfg.kind = to_enum(key, line, kKinds);
    } else if (key == "preset") {
      cfg.preset = line.value;
    } else if (key == "levels") {
      cfg.levels = to_list(key, line);
    } else if (key == "n") {
      cfg.n = static_cast<std::size_t>(to_uint(key, line));
    } else if (key == "betas") {
      cfg.betas = to_list(key, line);
    } else if (key == "delta") {
      cfg.delta = to_double(key, line);
    } else if (key == "strip_delta") {
      cfg.strip_delta = to_double(key, line);
    } else if (key == "cfl") {
      cfg.step.cfl = to_double(key, line);
    } else if (key == "dt_max") {
      cfg.step.dt_max = to_double(key, line);
    } else if (key == "t_end") {
      cfg.step.t_end = to_double(key, line);
    } else if (key == "save_every") {
      cfg.step.save_every = static_cast<int>(to_uint(key, line));
    } else if (key == "sample_times") {
      cfg.step.sample_times = line.value.empty() ? std::vector<double>{} : to_list(key, line);
    } else if (key == "out_dir") {
      cfg.out_dir = line.value;
    } else if (key == "seed") {
      cfg.seed = to_uint(key, line);
    } else if (key == "perturbation") {
      cfg.perturbation = to_double(key, line);
    } else if (key == "reference") {
      cfg.reference = to_enum(key, line, kReferences);
    } else if (key == "mode") {
      cfg.mode = to_enum(key, line, kModes);
    } else if (key == "tie_variant") {
      cfg.restricted = to_enum(key, line, kVariants);
    } else if (key == "write_pgm") {
      cfg.write_pgm = to_bool(key, line);
    } else {
      throw ConfigError("line " + std::to_string(line.number) + ": unknown key '" + key + "'", line.number, key);
    }
  }
  std::size_t expected = 1;
  for (const auto& [idx, line] : marker_lines) {
    if (idx != expected) {
      throw ConfigError("line " + std::to_string(line.number) + ": marker keys must be numbered consecutively from 1",
                        line.number, "marker" + std::to_string(idx));
    }
    cfg.markers.push_back(to_terms("marker" + std::to_string(idx), line));
    ++expected;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'", 0, "");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "kind = " << to_string(cfg.kind) << "\n";
  if (!cfg.preset.empty()) out << "preset = " << cfg.preset << "\n";
  for (std::size_t k = 0; k < cfg.markers.size(); ++k) {
    out << "marker" << (k + 1) << " = ";
    for (std::size_t t = 0; t < cfg.markers[k].size(); ++t) {
      const auto& term = cfg.markers[k][t];
      out << (t ? ", " : "") << format_number(term.amplitude) << ":" << format_number(term.kx) << ":"
          << format_number(term.ky) << ":" << format_number(term.phase);
    }
    out << "\n";
  }
  if (cfg.levels) out << "levels = " << join(*cfg.levels) << "\n";
  out << "n = " << cfg.n << "\n";
  out << "betas = " << join(cfg.betas) << "\n";
  out << "delta = " << format_number(cfg.delta) << "\n";
  out << "strip_delta = " << format_number(cfg.strip_delta) << "\n";
  out << "cfl = " << format_number(cfg.step.cfl) << "\n";
  out << "dt_max = " << format_number(cfg.step.dt_max) << "\n";
  out << "t_end = " << format_number(cfg.step.t_end) << "\n";
  out << "save_every = " << cfg.step.save_every << "\n";
  out << "sample_times = " << join(cfg.step.sample_times) << "\n";
  out << "out_dir = " << cfg.out_dir << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "perturbation = " << format_number(cfg.perturbation) << "\n";
  out << "reference = " << to_string(cfg.reference) << "\n";
  out << "mode = " << to_string(cfg.mode) << "\n";
  out << "tie_variant = " << (cfg.restricted ? "restricted" : "unrestricted") << "\n";
  out << "write_pgm = " << (cfg.write_pgm ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace markerflow
