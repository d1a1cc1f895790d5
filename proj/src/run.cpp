/*
 * Copyright 2026 exlab contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "exlab/run.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

#include "exlab/errors.hpp"

#ifndef EXLAB_VERSION
#define EXLAB_VERSION "unknown"
#endif

namespace exlab {

namespace fs = std::filesystem;

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
T field(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("field '") + key + "': wrong type");
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Theta: return "theta";
    case ExperimentKind::Phi: return "phi";
    case ExperimentKind::Giant: return "giant";
    case ExperimentKind::EU: return "eu";
    case ExperimentKind::Coupling: return "coupling";
  }
  return "?";
}

std::string code_version() { return EXLAB_VERSION; }

Json ExperimentConfig::canonical() const {
  Json j;
  j["experiment"] = to_string(experiment);
  j["ensemble"] = ensemble_to_json(ensemble);
  j["levels"] = levels;
  j["replicates"] = replicates;
  j["seed"] = seed;
  j["cells_per_scale"] = cells_per_scale;
  j["spacing"] = spacing;
  j["R"] = R;
  j["window"] = window;
  j["radii"] = radii;
  j["delta"] = delta;
  j["center"] = Json::array({center.x(), center.y(), center.z()});
  j["orthant_spacing"] = orthant_spacing;
  j["points"] = points;
  j["eps_ladder"] = eps_ladder;
  j["reference"] = finite_or_null(reference);
  return j;
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(canonical().dump())); }

void ExperimentConfig::validate() const {
  if (replicates < 1) throw ConfigError("field 'replicates': must be >= 1");
  if (levels.empty()) throw ConfigError("field 'levels': at least one level is required");
  for (double t : levels)
    if (!std::isfinite(t)) throw ConfigError("field 'levels': levels must be finite");
  if (jobs < 1) throw ConfigError("field 'jobs': must be >= 1");
  const bool planar_exp = experiment == ExperimentKind::Theta || experiment == ExperimentKind::Phi;
  if (planar_exp && !ensemble.planar()) throw ConfigError("field 'ensemble': arm estimates need a planar field");
  if (!planar_exp && ensemble.planar()) throw ConfigError("field 'ensemble': this experiment needs a spherical ensemble");
  if ((experiment == ExperimentKind::EU || experiment == ExperimentKind::Coupling) && radii.empty())
    throw ConfigError("field 'radii': at least one radius is required");
}

ExperimentConfig config_from_json(const Json& j, const ExperimentConfig& base) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const char* known[] = {"experiment", "ensemble", "levels",  "replicates", "seed",       "cells_per_scale",
                                "spacing",    "R",        "window",  "radii",      "delta",      "center",
                                "orthant_spacing", "points", "eps_ladder", "reference", "output_dir", "jobs"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("field '" + it.key() + "': unknown field");
  }
  ExperimentConfig c = base;
  if (j.contains("experiment")) {
    const auto e = field<std::string>(j, "experiment", "");
    bool found = false;
    for (auto k : {ExperimentKind::Theta, ExperimentKind::Phi, ExperimentKind::Giant, ExperimentKind::EU,
                   ExperimentKind::Coupling})
      if (e == to_string(k)) {
        c.experiment = k;
        found = true;
      }
    if (!found) throw ConfigError("field 'experiment': unknown experiment '" + e + "'");
  }
  if (j.contains("ensemble")) c.ensemble = ensemble_from_json(j["ensemble"]);
  c.levels = field(j, "levels", c.levels);
  c.replicates = field(j, "replicates", c.replicates);
  c.seed = field(j, "seed", c.seed);
  c.cells_per_scale = field(j, "cells_per_scale", c.cells_per_scale);
  c.spacing = field(j, "spacing", c.spacing);
  c.R = field(j, "R", c.R);
  c.window = field(j, "window", c.window);
  c.radii = field(j, "radii", c.radii);
  c.delta = field(j, "delta", c.delta);
  if (j.contains("center")) {
    const auto v = field(j, "center", std::vector<double>{});
    if (v.size() != 3) throw ConfigError("field 'center': expected three numbers");
    c.center = Vec3(v[0], v[1], v[2]);
  }
  c.orthant_spacing = field(j, "orthant_spacing", c.orthant_spacing);
  c.points = field(j, "points", c.points);
  c.eps_ladder = field(j, "eps_ladder", c.eps_ladder);
  if (j.contains("reference")) c.reference = field(j, "reference", kNaN);
  if (j.contains("output_dir")) c.output_dir = field<std::string>(j, "output_dir", ".");
  c.jobs = field(j, "jobs", c.jobs);
  return c;
}

ExperimentConfig load_config(const fs::path& path, const ExperimentConfig& base) {
  const Json j = parse_json_text(read_file(path), path.string());
  try {
    return config_from_json(j, base);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  RunOutput out;
  out.config_hash = cfg.hash();
  const std::string stem = std::string(to_string(cfg.experiment)) + "-" + out.config_hash;
  out.data = cfg.output_dir / (stem + ".csv");
  out.manifest = cfg.output_dir / (stem + ".manifest.json");

  Json manifest;
  manifest["config"] = cfg.canonical();
  manifest["config_hash"] = out.config_hash;
  manifest["code_version"] = code_version();
  manifest["started"] = utc_now();
  manifest["complete"] = false;
  manifest["jobs"] = cfg.jobs;
  write_file(out.manifest, manifest.dump(2) + "\n");

  std::ostringstream data, summary;
  CsvWriter w(data);
  const std::string& h = out.config_hash;
  try {
    switch (cfg.experiment) {
      case ExperimentKind::Theta:
      case ExperimentKind::Phi: {
        PlanarEstimateOptions opt;
        opt.R = cfg.R;
        opt.window = cfg.window;
        opt.spacing = cfg.spacing;
        opt.waves = cfg.ensemble.waves;
        opt.jobs = cfg.jobs;
        const auto recs = estimate_planar(cfg.ensemble, cfg.levels, cfg.replicates, cfg.seed, opt);
        w.header({"name", "level", "value", "standard_error", "corrected", "corrected_standard_error", "M", "seed",
                  "config_hash"});
        for (const auto& r : recs) {
          w.field(r.name).field(r.level).field(r.value).field(r.standard_error).field(r.corrected);
          w.field(r.corrected_standard_error).field(r.M).field(r.seed).field(h);
          w.end_row();
        }
        out.rows = recs.size();
        out.result["estimate_wall_time"] = recs.front().wall_time;
        out.result["window"] = {{"side", planar_window(opt).side}, {"cells", planar_window(opt).cells}};
        break;
      }
      case ExperimentKind::Giant: {
        GiantAreaOptions opt;
        opt.cells_per_scale = cfg.cells_per_scale;
        opt.eps_ladder = cfg.eps_ladder;
        opt.reference = cfg.reference;
        opt.jobs = cfg.jobs;
        const auto res = giant_area_experiment(cfg.ensemble, cfg.levels, cfg.replicates, cfg.seed, opt);
        w.header({"level", "replicate", "seed", "area_fraction", "diameter_fraction", "giant_diameter", "coincide",
                  "components", "config_hash"});
        for (const auto& r : res.rows) {
          w.field(r.level).field(r.replicate).field(r.seed).field(r.area_fraction).field(r.diameter_fraction);
          w.field(r.giant_diameter).field(r.coincide).field(static_cast<std::uint64_t>(r.components)).field(h);
          w.end_row();
        }
        out.rows = res.rows.size();
        CsvWriter s(summary);
        s.header({"level", "M", "mean", "variance", "standard_error", "mean_diameter_giant", "coincidence",
                  "reference", "eps", "deviation", "censored", "config_hash"});
        for (const auto& l : res.levels)
          for (std::size_t k = 0; k < l.eps.size(); ++k) {
            s.field(l.level).field(l.M).field(l.mean).field(l.variance).field(l.standard_error);
            s.field(l.mean_diameter_giant).field(l.coincidence).field(l.reference).field(l.eps[k]);
            s.field(l.deviation[k]).field(static_cast<bool>(l.censored[k])).field(h);
            s.end_row();
          }
        break;
      }
      case ExperimentKind::EU: {
        EUSweepOptions opt;
        opt.center = cfg.center;
        opt.jobs = cfg.jobs;
        const auto res = eu_sweep(cfg.ensemble, cfg.levels, cfg.radii, cfg.delta, cfg.replicates, cfg.seed, opt);
        w.header({"level", "r", "delta", "M", "failures", "value", "standard_error", "censored", "config_hash"});
        for (const auto& e : res.entries) {
          w.field(e.level).field(e.r).field(cfg.delta).field(e.M).field(e.failures).field(e.value);
          w.field(e.standard_error).field(e.censored).field(h);
          w.end_row();
        }
        out.rows = res.entries.size();
        out.result["monotone"] = res.monotone;
        Json slopes = Json::array();
        for (double s : res.slope) slopes.push_back(finite_or_null(s));
        out.result["slope"] = slopes;
        break;
      }
      case ExperimentKind::Coupling: {
        CouplingOptions opt;
        opt.spacing = cfg.orthant_spacing;
        opt.points = cfg.points;
        opt.jobs = cfg.jobs;
        const auto res = coupling_ladder(cfg.ensemble, cfg.radii, cfg.replicates, cfg.seed, opt);
        w.header({"r", "M", "variance", "standard_error", "exact_variance", "scaled", "config_hash"});
        for (const auto& e : res.entries) {
          w.field(e.r).field(e.M).field(e.variance).field(e.standard_error).field(e.exact_variance).field(e.scaled);
          w.field(h);
          w.end_row();
        }
        out.rows = res.entries.size();
        out.result["strictly_decreasing"] = res.strictly_decreasing;
        out.result["min_paired_z"] = finite_or_null(res.min_paired_z);
        break;
      }
    }
  } catch (const std::exception& e) {
    manifest["error"] = e.what();
    manifest["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(out.manifest, manifest.dump(2) + "\n");
    throw;
  }

  write_file(out.data, data.str());
  Json files = Json::array({out.data.filename().string()});
  if (!summary.str().empty()) {
    out.summary = cfg.output_dir / (stem + "-summary.csv");
    write_file(out.summary, summary.str());
    files.push_back(out.summary.filename().string());
  }
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest["files"] = files;
  manifest["rows"] = out.rows;
  manifest["result"] = out.result;
  manifest["wall_time"] = out.wall_time;
  manifest["complete"] = true;
  write_file(out.manifest, manifest.dump(2) + "\n");
  return out;
}

}  // namespace exlab
