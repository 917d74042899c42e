// Copyright 2026 The idyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "idyn/cli.hpp"

#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "idyn/analysis.hpp"
#include "idyn/filtering.hpp"
#include "idyn/motion.hpp"
#include "idyn/noise.hpp"
#include "idyn/refinement.hpp"
#include "idyn/rnea.hpp"
#include "idyn/segment_params.hpp"
#include "idyn/simd/kernels.hpp"
#include "idyn/skeleton.hpp"

namespace idyn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

struct Options {
  // Global.
  int jobs = 0;
  double mass = kDefaultMass;
  double height = kTemplateHeight;
  std::string skeleton_path;
  std::string bsp_path;
  std::string mode = "paper-faithful";

  // Shared by subcommands.
  std::string input;
  std::string out;
  double duration = 4.0;
  double fps = 30.0;
  double sigma = kDefaultSigma;
  std::uint64_t seed = kDefaultSeed;
  int seeds = kDefaultSeeds;
  double cutoff_hz = kDefaultCutoffHz;
  std::string profile = "uniform";
  std::string profile_json;
  int joint = -1;
  std::string joint_name;

  // refine.
  std::string clean;
  std::string report;
  std::string hip_csv;
  RefinementConfig refine;
};

// Rejects output paths whose parent directory does not exist.
const CLI::Validator kWritablePath(
    [](std::string& path) -> std::string {
      const fs::path parent = fs::path(path).parent_path();
      if (!parent.empty() && !fs::is_directory(parent)) {
        return "directory does not exist: " + parent.string();
      }
      return {};
    },
    "PATH");

class Runner {
 public:
  Runner(std::ostream& out) : out_(out) {}

  std::unique_ptr<CLI::App> build();
  int dispatch(CLI::App& app);

 private:
  DynamicsMode mode() const {
    return o_.mode == "com-corrected" ? DynamicsMode::kComCorrected
                                      : DynamicsMode::kPaperFaithful;
  }
  Skeleton skeleton() const {
    if (!o_.skeleton_path.empty()) return load_skeleton(o_.skeleton_path);
    return default_skeleton(o_.mass, o_.height);
  }
  BodySegments segments(const Skeleton& skel) const {
    return o_.bsp_path.empty()
               ? build_segment_params(skel)
               : build_segment_params(skel, load_bsp_table(o_.bsp_path));
  }
  MotionSequence clean_motion() const {
    return o_.input.empty() ? synth_walk(o_.duration, o_.fps)
                            : load_motion(o_.input);
  }
  AnalysisOptions analysis_options() const {
    AnalysisOptions a;
    a.seeds = o_.seeds;
    a.seed = o_.seed;
    a.jobs = o_.jobs;
    return a;
  }
  NoiseProfile noise_profile() const {
    NoiseProfile p = o_.profile_json.empty() ? realistic_profile()
                                             : load_noise_profile(o_.profile_json);
    if (o_.profile_json.empty() || seed_given_) p.seed = o_.seed;
    return p;
  }

  json globals() const;
  json refine_config() const;
  void write_manifest(const fs::path& path, const std::string& command,
                      json params, const std::vector<fs::path>& outputs) const;

  int synth();
  int noise();
  int filter();
  int id();
  int analyze(const std::string& kind);
  int refine_cmd();
  int repro();

  // The analyses shared by `analyze` and `repro`; they write CSVs into dir
  // and return a JSON summary.
  json amplification(const ErrorEvaluator& ev, const fs::path& dir,
                     std::vector<fs::path>& outputs);
  json sensitivity(const ErrorEvaluator& ev, const fs::path& dir,
                   std::vector<fs::path>& outputs);
  json cutoff(const ErrorEvaluator& ev, const fs::path& dir,
              std::vector<fs::path>& outputs);
  json realistic(const ErrorEvaluator& ev, const fs::path& dir,
                 std::vector<fs::path>& outputs);

  std::ostream& out_;
  Options o_;
  bool seed_given_ = false;
  CLI::App* synth_ = nullptr;
  CLI::App* noise_ = nullptr;
  CLI::App* filter_ = nullptr;
  CLI::App* id_ = nullptr;
  CLI::App* analyze_ = nullptr;
  CLI::App* refine_ = nullptr;
  CLI::App* repro_ = nullptr;
  CLI::Option* seed_opt_ = nullptr;
};

void add_refine_options(CLI::App* cmd, RefinementConfig& c) {
  cmd->add_option("--iterations", c.iterations, "Adam iterations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--step-size", c.step_size, "Adam step size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lambda-smooth", c.lambda_smooth,
                  "Weight of the torque smoothness term")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--lambda-magnitude", c.lambda_magnitude,
                  "Weight of the torque limit term")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--lambda-reg", c.lambda_reg,
                  "Weight of the distance to the input poses")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--tau-max", c.tau_max, "Torque limit in Nm")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--filter-cutoff-hz", c.filter_cutoff_hz,
                  "Low-pass the poses inside the loss (0 = off)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--freeze-translation", c.freeze_translation,
                "Keep the root translation fixed");
}

std::unique_ptr<CLI::App> Runner::build() {
  auto app = std::make_unique<CLI::App>(
      "Inverse dynamics of SMPL motion and pose-noise amplification analysis",
      "idyn");
  app->set_version_flag("--version", kVersion);
  app->fallthrough();
  app->require_subcommand(1);

  app->add_option("--jobs", o_.jobs,
                  "Worker threads (0 = one per hardware thread)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  auto* mass = app->add_option("--mass", o_.mass, "Body mass in kg")
                   ->capture_default_str()
                   ->check(CLI::PositiveNumber);
  auto* height = app->add_option("--height", o_.height, "Body height in m")
                     ->capture_default_str()
                     ->check(CLI::PositiveNumber);
  auto* skel = app->add_option("--skeleton", o_.skeleton_path,
                               "Skeleton JSON (replaces --mass/--height)")
                   ->check(CLI::ExistingFile);
  // Checked by hand: CLI11 prints excludes() sets in pointer order, which
  // makes the help text unstable.
  app->parse_complete_callback([skel, mass, height] {
    if (skel->count() > 0 && (mass->count() > 0 || height->count() > 0)) {
      throw CLI::ExcludesError("--skeleton", "--mass/--height");
    }
  });
  app->add_option("--bsp", o_.bsp_path, "Body segment parameter table JSON")
      ->check(CLI::ExistingFile);
  app->add_option("--mode", o_.mode, "Inverse dynamics mode")
      ->capture_default_str()
      ->check(CLI::IsMember({"paper-faithful", "com-corrected"}));

  synth_ = app->add_subcommand("synth", "Generate a synthetic walking clip");
  synth_->add_option("--duration", o_.duration, "Clip length in s")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth_->add_option("--fps", o_.fps, "Frame rate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth_->add_option("--out", o_.out, "Output motion JSON")
      ->required()
      ->check(kWritablePath);

  noise_ = app->add_subcommand("noise", "Add pose noise to a motion");
  noise_->add_option("--input", o_.input, "Input motion JSON")
      ->required()
      ->check(CLI::ExistingFile);
  noise_->add_option("--out", o_.out, "Output motion JSON")
      ->required()
      ->check(kWritablePath);
  noise_->add_option("--profile", o_.profile, "Noise model")
      ->capture_default_str()
      ->check(CLI::IsMember({"uniform", "realistic"}));
  noise_->add_option("--sigma", o_.sigma, "Uniform noise std in rad")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  noise_->add_option("--joint", o_.joint_name,
                     "Perturb only this joint (uniform profile)");
  noise_->add_option("--profile-json", o_.profile_json,
                     "Realistic noise profile JSON (implies --profile realistic)")
      ->check(CLI::ExistingFile);
  seed_opt_ = noise_->add_option("--seed", o_.seed, "Random seed")
                  ->capture_default_str();

  filter_ = app->add_subcommand(
      "filter", "Zero-phase 4th-order Butterworth low-pass of all channels");
  filter_->add_option("--input", o_.input, "Input motion JSON")
      ->required()
      ->check(CLI::ExistingFile);
  filter_->add_option("--out", o_.out, "Output motion JSON")
      ->required()
      ->check(kWritablePath);
  filter_->add_option("--cutoff-hz", o_.cutoff_hz, "Cutoff frequency")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  id_ = app->add_subcommand("id", "Joint forces and torques of a motion");
  id_->add_option("--input", o_.input, "Input motion JSON")
      ->required()
      ->check(CLI::ExistingFile);
  id_->add_option("--out", o_.out, "Output CSV")
      ->required()
      ->check(kWritablePath);

  analyze_ = app->add_subcommand("analyze", "Run one noise experiment");
  analyze_->require_subcommand(1);
  analyze_->add_option("--input", o_.input,
                       "Clean motion JSON (default: synthetic walk)")
      ->check(CLI::ExistingFile);
  analyze_->add_option("--out", o_.out, "Output directory")->required();
  analyze_->add_option("--seeds", o_.seeds, "Noise draws per point")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  analyze_->add_option("--seed", o_.seed, "First seed")->capture_default_str();
  analyze_->add_option("--sigma", o_.sigma,
                       "Noise std in rad (sensitivity, cutoff)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  analyze_->add_option("--cutoff-hz", o_.cutoff_hz,
                       "Filter cutoff (realistic)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  analyze_->add_option("--profile-json", o_.profile_json,
                       "Realistic noise profile JSON (realistic)")
      ->check(CLI::ExistingFile);
  analyze_->add_subcommand("amplification",
                           "Torque error against noise sigma");
  analyze_->add_subcommand("sensitivity", "Torque error per perturbed joint");
  analyze_->add_subcommand("cutoff",
                           "Torque error and distortion against cutoff");
  analyze_->add_subcommand("realistic",
                           "Realistic against magnitude-matched uniform noise");

  refine_ = app->add_subcommand("refine", "Physics-based pose refinement");
  refine_->add_option("--input", o_.input, "Noisy motion JSON")
      ->required()
      ->check(CLI::ExistingFile);
  refine_->add_option("--clean", o_.clean,
                      "Clean reference motion JSON for error reporting")
      ->check(CLI::ExistingFile);
  refine_->add_option("--out", o_.out, "Refined motion JSON")
      ->required()
      ->check(kWritablePath);
  refine_->add_option("--report", o_.report, "Report JSON")
      ->check(kWritablePath);
  refine_->add_option("--hip-csv", o_.hip_csv, "Left hip torque CSV")
      ->check(kWritablePath);
  add_refine_options(refine_, o_.refine);

  repro_ = app->add_subcommand(
      "repro", "Run every experiment and the refinement into a directory");
  repro_->add_option("--out", o_.out, "Output directory")->required();
  repro_->add_option("--seeds", o_.seeds, "Noise draws per point")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  repro_->add_option("--seed", o_.seed, "First seed")->capture_default_str();
  repro_->add_option("--sigma", o_.sigma, "Noise std in rad")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  add_refine_options(repro_, o_.refine);
  return app;
}

json Runner::globals() const {
  json g = {{"jobs", o_.jobs},
            {"mode", o_.mode},
            {"simd_backend",
             std::string(simd::backend_name(simd::active_backend()))}};
  if (o_.skeleton_path.empty()) {
    g["mass"] = o_.mass;
    g["height"] = o_.height;
  } else {
    g["skeleton"] = o_.skeleton_path;
  }
  g["bsp"] = o_.bsp_path.empty() ? json("de_leva_male") : json(o_.bsp_path);
  return g;
}

json Runner::refine_config() const {
  const RefinementConfig& c = o_.refine;
  return {{"iterations", c.iterations},
          {"step_size", c.step_size},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"lambda_smooth", c.lambda_smooth},
          {"lambda_magnitude", c.lambda_magnitude},
          {"lambda_reg", c.lambda_reg},
          {"tau_max", c.tau_max},
          {"filter_cutoff_hz", c.filter_cutoff_hz},
          {"freeze_translation", c.freeze_translation}};
}

void Runner::write_manifest(const fs::path& path, const std::string& command,
                            json params,
                            const std::vector<fs::path>& outputs) const {
  json m;
  m["tool"] = "idyn";
  m["version"] = kVersion;
  m["command"] = command;
  m["globals"] = globals();
  m["parameters"] = std::move(params);
  json files = json::array();
  for (const fs::path& p : outputs) files.push_back(p.string());
  m["outputs"] = files;
  write_text_file(path, m.dump(2) + "\n");
}

fs::path manifest_for(const fs::path& out) {
  return fs::path(out.string() + ".manifest.json");
}

int Runner::synth() {
  const MotionSequence m = synth_walk(o_.duration, o_.fps);
  save_motion(m, o_.out);
  write_manifest(manifest_for(o_.out), "synth",
                 {{"duration", o_.duration}, {"fps", o_.fps},
                  {"frames", m.size()}},
                 {o_.out});
  out_ << strf("wrote %d frames at %g fps to %s\n", m.size(), m.fps,
               o_.out.c_str());
  return kExitOk;
}

int Runner::noise() {
  if (!o_.profile_json.empty()) o_.profile = "realistic";
  const MotionSequence in = load_motion(o_.input);
  MotionSequence noisy;
  json params = {{"input", o_.input}, {"profile", o_.profile}};
  if (o_.profile == "realistic") {
    if (!o_.joint_name.empty()) {
      throw InvalidInput("--joint applies to the uniform profile only");
    }
    const NoiseProfile p = noise_profile();
    noisy = add_realistic_noise(in, p);
    params["noise_profile"] = json::parse(noise_profile_to_json(p));
    params["matched_uniform_sigma"] = p.matched_uniform_sigma();
  } else if (!o_.joint_name.empty()) {
    const int j = joint_index(o_.joint_name);
    if (j < 0) throw InvalidInput("unknown joint '" + o_.joint_name + "'");
    noisy = add_joint_noise(in, j, o_.sigma, o_.seed);
    params["joint"] = o_.joint_name;
  } else {
    noisy = add_uniform_noise(in, o_.sigma, o_.seed);
  }
  if (o_.profile == "uniform") {
    params["sigma"] = o_.sigma;
    params["seed"] = o_.seed;
  }
  save_motion(noisy, o_.out);
  write_manifest(manifest_for(o_.out), "noise", params, {o_.out});
  out_ << strf("wrote %s noise motion (%d frames) to %s\n", o_.profile.c_str(),
               noisy.size(), o_.out.c_str());
  return kExitOk;
}

int Runner::filter() {
  const MotionSequence in = load_motion(o_.input);
  const MotionSequence f = filter_motion(in, {o_.cutoff_hz, in.fps});
  save_motion(f, o_.out);
  write_manifest(manifest_for(o_.out), "filter",
                 {{"input", o_.input}, {"cutoff_hz", o_.cutoff_hz},
                  {"order", kFilterOrder}},
                 {o_.out});
  out_ << strf("filtered %d frames at %g Hz cutoff into %s\n", f.size(),
               o_.cutoff_hz, o_.out.c_str());
  return kExitOk;
}

int Runner::id() {
  const Skeleton skel = skeleton();
  const BodySegments segs = segments(skel);
  const MotionSequence m = load_motion(o_.input);
  const DynamicsResult d =
      dynamics_from_poses<double>(skel, segs, m.frames, m.fps, mode());
  save_dynamics_csv(d, o_.out, kBoundaryFrames);
  write_manifest(manifest_for(o_.out), "id",
                 {{"input", o_.input}, {"exclude_boundary", kBoundaryFrames}},
                 {o_.out});
  const int rows = (d.frames - 2 * kBoundaryFrames) * kNumJoints;
  out_ << strf("wrote %d rows (%d interior frames x %d joints) to %s\n", rows,
               d.frames - 2 * kBoundaryFrames, kNumJoints, o_.out.c_str());
  return kExitOk;
}

json Runner::amplification(const ErrorEvaluator& ev, const fs::path& dir,
                           std::vector<fs::path>& outputs) {
  const std::vector<double> sigmas = default_sigmas();
  const SweepResult r = run_amplification_sweep(ev, sigmas, analysis_options());
  const fs::path path = dir / "amplification.csv";
  write_text_file(path, amplification_csv(r));
  outputs.push_back(path);
  std::vector<double> xs, ys;
  for (const SweepRow& row : r.rows) {
    if (row.x > 0.0) {
      xs.push_back(row.x);
      ys.push_back(row.error.mean);
    }
  }
  const double corr = xs.size() >= 2 ? pearson(xs, ys) : 0.0;
  out_ << "amplification: sigma -> mean torque error\n";
  for (const SweepRow& row : r.rows) {
    out_ << strf("  %.2f rad  %8.2f Nm  (std %.2f)\n", row.x, row.error.mean,
                 row.error.std);
  }
  out_ << strf("  slope %.0f Nm/rad, correlation %.4f\n", r.slope, corr);
  return {{"slope_nm_per_rad", r.slope}, {"pearson", corr}};
}

json Runner::sensitivity(const ErrorEvaluator& ev, const fs::path& dir,
                         std::vector<fs::path>& outputs) {
  const SensitivityResult r =
      run_sensitivity_ranking(ev, o_.sigma, analysis_options());
  const fs::path path = dir / "sensitivity.csv";
  write_text_file(path, sensitivity_csv(r));
  outputs.push_back(path);
  out_ << strf("sensitivity at sigma %.3f: total torque error per joint\n",
               o_.sigma);
  for (const SensitivityRow& row : r.rows) {
    out_ << strf("  %-15s %9.2f Nm\n",
                 std::string(kJointNames[row.joint]).c_str(), row.error.mean);
  }
  return {{"sigma", o_.sigma},
          {"top_body_joint",
           std::string(kJointNames[r.rows[0].joint == kPelvis
                                       ? r.rows[1].joint
                                       : r.rows[0].joint])}};
}

json Runner::cutoff(const ErrorEvaluator& ev, const fs::path& dir,
                    std::vector<fs::path>& outputs) {
  const std::vector<double> cutoffs = default_cutoffs();
  const CutoffResult r =
      run_cutoff_sweep(ev, cutoffs, o_.sigma, analysis_options());
  const fs::path path = dir / "cutoff.csv";
  write_text_file(path, cutoff_csv(r));
  outputs.push_back(path);
  out_ << strf("cutoff sweep at sigma %.3f (unfiltered %.2f Nm)\n", o_.sigma,
               r.unfiltered.mean);
  for (const CutoffRow& row : r.rows) {
    out_ << strf("  %4.1f Hz  noise %8.2f Nm  distortion %7.3f Nm\n",
                 row.cutoff_hz, row.noise_error.mean, row.distortion);
  }
  return {{"sigma", o_.sigma}, {"unfiltered_nm", r.unfiltered.mean}};
}

json Runner::realistic(const ErrorEvaluator& ev, const fs::path& dir,
                       std::vector<fs::path>& outputs) {
  const NoiseProfile profile = noise_profile();
  const RealisticResult r = run_realistic_comparison(
      ev, profile, analysis_options(), o_.cutoff_hz);
  const fs::path path = dir / "realistic.csv";
  write_text_file(path, realistic_csv(r));
  outputs.push_back(path);
  out_ << strf("realistic vs uniform (matched sigma %.4f rad)\n",
               r.matched_sigma);
  out_ << strf("  uniform    raw %8.2f Nm  filtered %8.2f Nm\n",
               r.uniform_raw.mean, r.uniform_filtered.mean);
  out_ << strf("  realistic  raw %8.2f Nm  filtered %8.2f Nm\n",
               r.realistic_raw.mean, r.realistic_filtered.mean);
  return {{"matched_sigma", r.matched_sigma},
          {"cutoff_hz", r.cutoff_hz},
          {"noise_profile", json::parse(noise_profile_to_json(profile))}};
}

int Runner::analyze(const std::string& kind) {
  const fs::path dir = o_.out;
  fs::create_directories(dir);
  const Skeleton skel = skeleton();
  const ErrorEvaluator ev(skel, segments(skel), clean_motion(), mode());
  std::vector<fs::path> outputs;
  json params = {{"experiment", kind},
                 {"input", o_.input.empty() ? json("synthetic walk")
                                            : json(o_.input)},
                 {"seeds", o_.seeds},
                 {"seed", o_.seed},
                 {"exclude_boundary", kBoundaryFrames}};
  if (o_.input.empty()) {
    params["duration"] = o_.duration;
    params["fps"] = o_.fps;
  }
  json summary;
  if (kind == "amplification") {
    summary = amplification(ev, dir, outputs);
  } else if (kind == "sensitivity") {
    summary = sensitivity(ev, dir, outputs);
  } else if (kind == "cutoff") {
    summary = cutoff(ev, dir, outputs);
  } else {
    summary = realistic(ev, dir, outputs);
  }
  params["summary"] = summary;
  write_manifest(dir / "manifest.json", "analyze " + kind, params, outputs);
  return kExitOk;
}

int Runner::refine_cmd() {
  const Skeleton skel = skeleton();
  const BodySegments segs = segments(skel);
  const MotionSequence noisy = load_motion(o_.input);
  std::optional<MotionSequence> clean;
  if (!o_.clean.empty()) clean = load_motion(o_.clean);
  RefinementConfig cfg = o_.refine;
  cfg.mode = mode();
  const RefinementResult r = refine(skel, segs, noisy, cfg, clean);
  save_motion(r.motion, o_.out);
  std::vector<fs::path> outputs{o_.out};
  if (!o_.report.empty()) {
    write_text_file(o_.report, report_to_json(r.report) + "\n");
    outputs.push_back(o_.report);
  }
  if (!o_.hip_csv.empty()) {
    write_text_file(o_.hip_csv, hip_torque_csv(r.report));
    outputs.push_back(o_.hip_csv);
  }
  write_manifest(manifest_for(o_.out), "refine",
                 {{"input", o_.input},
                  {"clean", o_.clean},
                  {"refinement", refine_config()}},
                 outputs);
  const RefinementReport& rep = r.report;
  out_ << strf("loss %.4g -> %.4g after %d iterations\n",
               rep.loss.front().total, rep.loss.back().total, cfg.iterations);
  if (rep.has_reference) {
    out_ << strf("torque error %.2f -> %.2f Nm (%.1f%% reduction)\n",
                 rep.initial_torque_error, rep.final_torque_error,
                 100.0 * rep.torque_reduction());
    out_ << strf("pose error %.4f -> %.4f rad (%+.2f%%)\n",
                 rep.initial_pose_error, rep.final_pose_error,
                 100.0 * rep.pose_error_change());
  }
  return kExitOk;
}

int Runner::repro() {
  const fs::path dir = o_.out;
  fs::create_directories(dir);
  const Skeleton skel = skeleton();
  const BodySegments segs = segments(skel);
  const MotionSequence walk = synth_walk(o_.duration, o_.fps);
  std::vector<fs::path> outputs;
  save_motion(walk, dir / "walk.motion.json");
  outputs.push_back(dir / "walk.motion.json");

  const ErrorEvaluator ev(skel, segs, walk, mode());
  json summary;
  summary["amplification"] = amplification(ev, dir, outputs);
  summary["sensitivity"] = sensitivity(ev, dir, outputs);
  summary["cutoff"] = cutoff(ev, dir, outputs);
  summary["realistic"] = realistic(ev, dir, outputs);

  const MotionSequence noisy = add_uniform_noise(walk, o_.sigma, o_.seed);
  save_motion(noisy, dir / "noisy.motion.json");
  outputs.push_back(dir / "noisy.motion.json");
  RefinementConfig cfg = o_.refine;
  cfg.mode = mode();
  const RefinementResult r = refine(skel, segs, noisy, cfg, walk);
  save_motion(r.motion, dir / "refined.motion.json");
  write_text_file(dir / "refinement_report.json",
                  report_to_json(r.report) + "\n");
  write_text_file(dir / "hip_torque.csv", hip_torque_csv(r.report));
  outputs.push_back(dir / "refined.motion.json");
  outputs.push_back(dir / "refinement_report.json");
  outputs.push_back(dir / "hip_torque.csv");
  const RefinementReport& rep = r.report;
  out_ << strf("refinement (sigma %.3f, seed %llu)\n", o_.sigma,
               static_cast<unsigned long long>(o_.seed));
  out_ << strf("  torque error %.2f -> %.2f Nm (%.1f%% reduction)\n",
               rep.initial_torque_error, rep.final_torque_error,
               100.0 * rep.torque_reduction());
  out_ << strf("  pose error %.4f -> %.4f rad (%+.2f%%)\n",
               rep.initial_pose_error, rep.final_pose_error,
               100.0 * rep.pose_error_change());
  summary["refinement"] = {
      {"torque_error_initial_nm", rep.initial_torque_error},
      {"torque_error_final_nm", rep.final_torque_error},
      {"pose_error_initial_rad", rep.initial_pose_error},
      {"pose_error_final_rad", rep.final_pose_error}};

  write_manifest(dir / "manifest.json", "repro",
                 {{"duration", o_.duration},
                  {"fps", o_.fps},
                  {"sigma", o_.sigma},
                  {"seed", o_.seed},
                  {"seeds", o_.seeds},
                  {"cutoff_hz", o_.cutoff_hz},
                  {"exclude_boundary", kBoundaryFrames},
                  {"refinement", refine_config()},
                  {"summary", summary}},
                 outputs);
  out_ << "wrote results to " << dir.string() << "\n";
  return kExitOk;
}

int Runner::dispatch(CLI::App& app) {
  seed_given_ = seed_opt_->count() > 0;
  if (synth_->parsed()) return synth();
  if (noise_->parsed()) return noise();
  if (filter_->parsed()) return filter();
  if (id_->parsed()) return id();
  if (analyze_->parsed()) {
    return analyze(analyze_->get_subcommands().front()->get_name());
  }
  if (refine_->parsed()) return refine_cmd();
  if (repro_->parsed()) return repro();
  (void)app;
  return kExitUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Runner runner(out);
  std::unique_ptr<CLI::App> app = runner.build();
  try {
    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
    app->parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app->help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n"
        << "run with --help for usage\n";
    return kExitUsage;
  }
  try {
    return runner.dispatch(*app);
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

std::string help_text(const std::vector<std::string>& path) {
  std::ostringstream sink;
  Runner runner(sink);
  std::unique_ptr<CLI::App> app = runner.build();
  CLI::App* cmd = app.get();
  std::string prefix;
  for (const std::string& name : path) {
    prefix += prefix.empty() ? cmd->get_name() : " " + cmd->get_name();
    cmd = cmd->get_subcommand(name);
  }
  return cmd->help(prefix);
}

}  // namespace idyn::cli
