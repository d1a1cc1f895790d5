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
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"

#include "exlab/errors.hpp"
#include "exlab/excursion.hpp"
#include "exlab/experiments.hpp"
#include "exlab/io.hpp"
#include "exlab/parallel.hpp"
#include "exlab/render.hpp"
#include "exlab/run.hpp"
#include "exlab/spectral.hpp"
#include "exlab/tiling.hpp"

using namespace exlab;
namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnsembleFlags {
  std::string kind = "rsh";
  int n = 16;
  int ell = 40;
  double alpha = 0.0;
  double beta = 0.5;
  int waves = 1024;
  CLI::Option* opt = nullptr;

  void add(CLI::App* app, const std::string& default_kind) {
    kind = default_kind;
    opt = app->add_option("--ensemble", kind, "kostlan | rsh | bandlimited | mono | bf | pw")->capture_default_str();
    app->add_option("--n", n, "Kostlan degree")->capture_default_str();
    app->add_option("--ell", ell, "harmonic degree")->capture_default_str();
    app->add_option("--alpha", alpha, "band-limited / plane-wave window parameter")->capture_default_str();
    app->add_option("--beta", beta, "monochromatic window exponent")->capture_default_str();
    app->add_option("--waves", waves, "plane waves per planar sample")->capture_default_str();
  }

  bool given(const CLI::App* app) const {
    for (const char* f : {"--ensemble", "--n", "--ell", "--alpha", "--beta", "--waves"})
      if (app->count(f) > 0) return true;
    return false;
  }

  EnsembleSpec spec() const {
    if (kind == "kostlan") return EnsembleSpec::kostlan(n);
    if (kind == "rsh") return EnsembleSpec::rsh(ell);
    if (kind == "bandlimited") return EnsembleSpec::bandlimited(alpha, ell);
    if (kind == "mono") return EnsembleSpec::mono(beta, ell);
    if (kind == "bf" || kind == "bargmann_fock") return EnsembleSpec::bargmann_fock(waves);
    if (kind == "pw" || kind == "plane_wave") return EnsembleSpec::plane_wave(alpha, waves);
    throw UsageError("unknown ensemble '" + kind + "'");
  }
};

// Shared flags of the experiment commands; flags override the config file, which overrides defaults.
struct RunFlags {
  std::string config;
  std::vector<double> levels;
  int M = 0;
  std::uint64_t seed = 0;
  int jobs = default_jobs();
  std::string out;
  bool dry_run = false;
  EnsembleFlags ensemble;

  void add(CLI::App* app, const std::string& default_kind) {
    app->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--t", levels, "level (repeatable)");
    app->add_option("--M", M, "replicates");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--jobs", jobs, "worker threads")->capture_default_str();
    app->add_option("--out", out, "output directory (default: $EXLAB_OUTPUT_DIR or .)");
    app->add_flag("--dry-run", dry_run, "print the resolved config and its hash, then exit");
    ensemble.add(app, default_kind);
  }

  ExperimentConfig resolve(const CLI::App* app, ExperimentConfig base) const {
    ExperimentConfig c = config.empty() ? base : load_config(config, base);
    if (ensemble.given(app)) c.ensemble = ensemble.spec();
    if (app->count("--t")) c.levels = levels;
    if (app->count("--M")) c.replicates = M;
    if (app->count("--seed")) c.seed = seed;
    c.jobs = jobs;
    if (const char* env = std::getenv("EXLAB_OUTPUT_DIR"); env && *env) c.output_dir = env;
    if (app->count("--out")) c.output_dir = out;
    return c;
  }
};

fs::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("EXLAB_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

void print_dry_run(const ExperimentConfig& c) {
  std::cout << "config_hash " << c.hash() << "\n" << c.canonical().dump(2) << "\n";
}

int finish_run(const ExperimentConfig& c, bool dry_run) {
  c.validate();
  if (dry_run) {
    print_dry_run(c);
    return 0;
  }
  const RunOutput r = run_experiment(c);
  std::cout << "config_hash " << r.config_hash << "\n"
            << "rows " << r.rows << "\n"
            << "data " << r.data.string() << "\n";
  if (!r.summary.empty()) std::cout << "summary " << r.summary.string() << "\n";
  std::cout << "manifest " << r.manifest.string() << "\n";
  if (!r.result.empty()) std::cout << "result " << r.result.dump() << "\n";
  if (!r.summary.empty()) std::cout << read_file(r.summary);
  return 0;
}

int run_app(int argc, char** argv) {
  CLI::App app{"exlab: excursion sets of Gaussian fields on the sphere and in the plane"};
  app.require_subcommand(1);

  // --- sample ---
  auto* sample = app.add_subcommand("sample", "draw one field sample and write payload + sidecar");
  EnsembleFlags s_ens;
  s_ens.add(sample, "rsh");
  std::uint64_t s_seed = 1;
  double s_res = 4.0, s_side = 20.0;
  std::string s_out, s_stem;
  sample->add_option("--seed", s_seed, "seed")->capture_default_str();
  sample->add_option("--res", s_res, "cells per local scale")->capture_default_str();
  sample->add_option("--side", s_side, "planar window side")->capture_default_str();
  sample->add_option("--out", s_out, "output directory (default: $EXLAB_OUTPUT_DIR or .)");
  sample->add_option("--name", s_stem, "file stem (default: <ensemble>-<seed>)");

  // --- render ---
  auto* render = app.add_subcommand("render", "render a sample as a binary PPM");
  std::string r_in, r_out, r_palette = "two-level";
  std::vector<double> r_levels;
  int r_width = 800;
  bool r_outline = false;
  render->add_option("--input", r_in, "sample sidecar (.json)")->required();
  render->add_option("--t", r_levels, "level (one or two)")->required();
  render->add_option("--width", r_width, "image width in pixels")->capture_default_str();
  render->add_option("--palette", r_palette, "binary | two-level | components")->capture_default_str();
  render->add_flag("--outline", r_outline, "outline the largest component of the highest level");
  render->add_option("--output", r_out, "output .ppm path")->required();

  // --- estimate ---
  auto* estimate = app.add_subcommand("estimate", "arm-frequency estimates of theta (bf) or phi (pw)");
  RunFlags e_run;
  e_run.add(estimate, "bf");
  std::string e_field;
  double e_R = 10.0, e_window = 0.0, e_spacing = 0.25;
  estimate->add_option("--field", e_field, "bf | pw (alias of --ensemble)");
  estimate->add_option("--R", e_R, "arm radius")->capture_default_str();
  estimate->add_option("--window", e_window, "window side (default 2R + 2)");
  estimate->add_option("--spacing", e_spacing, "cell side")->capture_default_str();

  // --- giant ---
  auto* giant_cmd = app.add_subcommand("giant", "giant-component areas on the sphere");
  RunFlags g_run;
  g_run.add(giant_cmd, "rsh");
  double g_res = 4.0, g_ref = kNaN;
  std::vector<double> g_eps;
  giant_cmd->add_option("--res", g_res, "cells per local scale")->capture_default_str();
  giant_cmd->add_option("--reference", g_ref, "reference density for the deviation ladder");
  giant_cmd->add_option("--eps", g_eps, "deviation thresholds (repeatable)");

  // --- eu ---
  auto* eu = app.add_subcommand("eu", "local existence-uniqueness failure frequencies");
  RunFlags u_run;
  u_run.add(eu, "kostlan");
  std::vector<double> u_r, u_center;
  double u_delta = 0.01;
  eu->add_option("--r", u_r, "region scale (repeatable)");
  eu->add_option("--delta", u_delta, "relative diameter threshold in (0, 0.01]")->capture_default_str();
  eu->add_option("--center", u_center, "unit vector x y z")->expected(3);

  // --- coupling ---
  auto* coupling = app.add_subcommand("coupling", "finite-range coupling error ladders");
  RunFlags c_run;
  c_run.add(coupling, "kostlan");
  std::vector<double> c_r;
  double c_spacing = 0.05;
  int c_points = 32;
  coupling->add_option("--r", c_r, "range (repeatable)");
  coupling->add_option("--spacing", c_spacing, "Kostlan orthant grid spacing")->capture_default_str();
  coupling->add_option("--points", c_points, "evaluation points for zonal ensembles")->capture_default_str();

  // --- kernel ---
  auto* kernel = app.add_subcommand("kernel", "tabulate a covariance kernel, optionally checking its decay bound");
  EnsembleFlags k_ens;
  k_ens.add(kernel, "kostlan");
  int k_points = 100;
  bool k_check = false, k_dry = false;
  std::string k_out;
  kernel->add_option("--points", k_points, "angles in (0, pi/2]")->capture_default_str();
  kernel->add_flag("--check-bounds", k_check, "exit 3 unless the decay bound holds");
  kernel->add_option("--output", k_out, "CSV path (default: stdout)");
  kernel->add_flag("--dry-run", k_dry, "print the resolved kernel spec and exit");

  // --- run ---
  auto* run = app.add_subcommand("run", "run an experiment described by a config file");
  std::string run_cfg, run_out;
  int run_jobs = default_jobs();
  bool run_dry = false;
  run->add_option("--config", run_cfg, "JSON config file")->required()->check(CLI::ExistingFile);
  run->add_option("--jobs", run_jobs, "worker threads")->capture_default_str();
  run->add_option("--out", run_out, "output directory");
  run->add_flag("--dry-run", run_dry, "print the resolved config and its hash, then exit");

  // --- tiling ---
  auto* tiling = app.add_subcommand("tiling", "build and check a (u, eps)-tiling, exported as JSON");
  double t_u = 0.1, t_eps = 0.1, t_radius = 1.0;
  std::string t_region = "cap", t_out = "tiling.json";
  tiling->add_option("--u", t_u, "tile half-side")->capture_default_str();
  tiling->add_option("--eps", t_eps, "overlap tolerance")->capture_default_str();
  tiling->add_option("--region", t_region, "sphere | cap | square")->capture_default_str();
  tiling->add_option("--radius", t_radius, "cap radius or square half-side")->capture_default_str();
  tiling->add_option("--output", t_out, "JSON path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*sample) {
    const EnsembleSpec spec = s_ens.spec();
    GridPtr grid;
    if (spec.planar()) {
      if (!(s_side > 0.0)) throw UsageError("--side must be positive");
      grid = std::make_shared<const Grid>(Grid::planar(s_side, static_cast<int>(std::ceil(s_side * s_res))));
    } else {
      grid = std::make_shared<const Grid>(build_grid(s_res, spec.local_scale()));
    }
    const FieldSample fs_ = sample_field(spec, grid, s_seed);
    const std::string stem = s_stem.empty() ? std::string(to_string(spec.kind)) + "-" + std::to_string(s_seed) : s_stem;
    const auto files = write_sample(fs_, output_root(s_out) / stem);
    std::cout << files.payload.string() << "\n" << files.sidecar.string() << "\n";
    return 0;
  }

  if (*render) {
    RenderSpec spec;
    spec.width = r_width;
    spec.levels = r_levels;
    spec.outline_giant = r_outline;
    if (!render->count("--palette") && r_levels.size() == 1) r_palette = "binary";
    if (r_palette == "binary") {
      spec.palette = RenderSpec::Palette::Binary;
    } else if (r_palette == "two-level") {
      spec.palette = RenderSpec::Palette::TwoLevel;
    } else if (r_palette == "components") {
      spec.palette = RenderSpec::Palette::Components;
    } else {
      throw UsageError("unknown palette '" + r_palette + "'");
    }
    spec.validate();
    const FieldSample s = read_sample(r_in);
    write_file(r_out, render_ppm(s, spec));
    std::cout << r_out << "\n";
    return 0;
  }

  if (*estimate) {
    ExperimentConfig base;
    base.experiment = ExperimentKind::Theta;
    base.ensemble = EnsembleSpec::bargmann_fock();
    base.levels = {1.0};
    base.replicates = 1000;
    ExperimentConfig c = e_run.resolve(estimate, base);
    if (estimate->count("--field")) {
      EnsembleFlags f = e_run.ensemble;
      f.kind = e_field;
      if (!estimate->count("--alpha")) f.alpha = 1.0;
      c.ensemble = f.spec();
    } else if (c.ensemble.kind == EnsembleSpec::Kind::PlaneWave && !estimate->count("--alpha") &&
               estimate->count("--ensemble")) {
      c.ensemble.alpha = 1.0;
    }
    c.experiment = c.ensemble.kind == EnsembleSpec::Kind::PlaneWave ? ExperimentKind::Phi : ExperimentKind::Theta;
    if (estimate->count("--R")) c.R = e_R;
    if (estimate->count("--window")) c.window = e_window;
    if (estimate->count("--spacing")) c.spacing = e_spacing;
    return finish_run(c, e_run.dry_run);
  }

  if (*giant_cmd) {
    ExperimentConfig base;
    base.experiment = ExperimentKind::Giant;
    base.levels = {0.0};
    base.replicates = 100;
    ExperimentConfig c = g_run.resolve(giant_cmd, base);
    c.experiment = ExperimentKind::Giant;
    if (giant_cmd->count("--res")) c.cells_per_scale = g_res;
    if (giant_cmd->count("--reference")) c.reference = g_ref;
    if (giant_cmd->count("--eps")) c.eps_ladder = g_eps;
    return finish_run(c, g_run.dry_run);
  }

  if (*eu) {
    ExperimentConfig base;
    base.experiment = ExperimentKind::EU;
    base.ensemble = EnsembleSpec::kostlan(256);
    base.levels = {0.5};
    base.replicates = 10;
    base.radii = {4.0 / 16, 8.0 / 16};
    ExperimentConfig c = u_run.resolve(eu, base);
    c.experiment = ExperimentKind::EU;
    if (eu->count("--r")) c.radii = u_r;
    if (eu->count("--delta")) c.delta = u_delta;
    if (eu->count("--center")) c.center = Vec3(u_center[0], u_center[1], u_center[2]);
    return finish_run(c, u_run.dry_run);
  }

  if (*coupling) {
    ExperimentConfig base;
    base.experiment = ExperimentKind::Coupling;
    base.ensemble = EnsembleSpec::kostlan(64);
    base.replicates = 200;
    base.radii = {0.2, 0.3, 0.5, 0.8};
    ExperimentConfig c = c_run.resolve(coupling, base);
    c.experiment = ExperimentKind::Coupling;
    if (coupling->count("--r")) c.radii = c_r;
    if (coupling->count("--spacing")) c.orthant_spacing = c_spacing;
    if (coupling->count("--points")) c.points = c_points;
    return finish_run(c, c_run.dry_run);
  }

  if (*kernel) {
    if (k_points < 1) throw UsageError("--points must be >= 1");
    const EnsembleSpec ens = k_ens.spec();
    if (ens.planar()) throw UsageError("kernel tabulation needs a spherical ensemble");
    const KernelSpec spec = ens.kernel();
    if (k_dry) {
      std::cout << "kernel " << spec.describe() << "\nconfig_hash " << hex64(fnv1a64(spec.describe())) << "\n";
      return 0;
    }
    std::vector<double> theta(k_points);
    for (int i = 0; i < k_points; ++i) theta[i] = (i + 1) * (std::numbers::pi / 2) / k_points;
    std::ostringstream csv;
    CsvWriter w(csv);
    w.header({"theta", "kernel", "ratio_to_bound"});
    bool pass = true;
    std::string detail;
    try {
      const auto rep = kernel_bound_report(spec, theta);
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double k = kernel_value(spec, theta[i]);
        w.field(theta[i]).field(k).field(rep.ratio[i]);
        w.end_row();
      }
      detail = rep.explicit_bound ? "worst margin " + format_double(rep.worst_margin)
                                  : "empirical constant " + format_double(rep.empirical_constant);
    } catch (const BoundViolation& e) {
      pass = false;
      detail = e.what();
    }
    if (k_out.empty()) {
      std::cout << csv.str();
    } else {
      write_file(k_out, csv.str());
    }
    std::cerr << spec.describe() << ": " << (pass ? "bound check PASS" : "bound check FAIL") << " (" << detail << ")\n";
    return (k_check && !pass) ? kExitRuntime : 0;
  }

  if (*run) {
    ExperimentConfig c = load_config(run_cfg);
    c.jobs = run_jobs;
    if (const char* env = std::getenv("EXLAB_OUTPUT_DIR"); env && *env) c.output_dir = env;
    if (run->count("--out")) c.output_dir = run_out;
    return finish_run(c, run_dry);
  }

  if (*tiling) {
    TilingRegion region;
    if (t_region == "sphere") {
      region = TilingRegion::sphere();
    } else if (t_region == "cap") {
      region = TilingRegion::make_cap(Vec3::UnitZ(), t_radius);
    } else if (t_region == "square") {
      region = TilingRegion::make_square(make_square(Vec3::UnitZ(), t_radius));
    } else {
      throw UsageError("unknown region '" + t_region + "'");
    }
    int code = 0;
    Tiling t;
    try {
      t = build_tiling(t_u, t_eps, region);
    } catch (const TilingInfeasible& e) {
      std::cerr << e.what() << "\n";
      t = e.best;
      code = kExitRuntime;
    }
    const TilingReport rep = check_tiling(t);
    write_file(t_out, tiling_to_json(t, &rep).dump(1) + "\n");
    std::cout << rep.summary() << "\n" << t_out << "\n";
    return code;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_app(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
