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

#include "idyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "idyn/parallel.hpp"

namespace idyn {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Runs fn(trial) for every seed, in parallel, and summarizes.
template <class Fn>
Stats over_seeds(const AnalysisOptions& options, Fn&& fn) {
  std::vector<double> values(static_cast<std::size_t>(options.seeds));
  parallel_for(values.size(), options.jobs,
               [&](std::size_t k) { values[k] = fn(options.seed + k); });
  return summarize(values);
}

}  // namespace

void AnalysisOptions::validate() const {
  if (seeds < 1) throw InvalidInput("analysis: seeds must be >= 1");
}

ErrorEvaluator::ErrorEvaluator(Skeleton skeleton, BodySegments segments,
                               MotionSequence clean, DynamicsMode mode)
    : skeleton_(std::move(skeleton)),
      segments_(std::move(segments)),
      clean_(std::move(clean)),
      mode_(mode) {
  skeleton_.validate();
  clean_.validate();
  clean_dyn_ = dynamics(clean_);
}

DynamicsResult ErrorEvaluator::dynamics(const MotionSequence& motion) const {
  return dynamics_from_poses<double>(skeleton_, segments_, motion.frames,
                                     motion.fps, mode_);
}

double ErrorEvaluator::error(const MotionSequence& motion) const {
  return torque_error(dynamics(motion), clean_dyn_, kBoundaryFrames);
}

Stats summarize(std::span<const double> values) {
  Stats s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidInput("pearson: need two equal-length series of size >= 2");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> default_sigmas() {
  std::vector<double> s;
  for (int k = 0; k <= 20; ++k) s.push_back(0.01 * k);
  return s;
}

SweepResult run_amplification_sweep(const ErrorEvaluator& eval,
                                    std::span<const double> sigmas,
                                    const AnalysisOptions& options) {
  options.validate();
  for (double s : sigmas) {
    if (!(s >= 0.0)) throw InvalidInput("amplification sweep: sigma < 0");
  }
  SweepResult out;
  double sxy = 0.0, sxx = 0.0;
  for (double sigma : sigmas) {
    const Stats st = over_seeds(options, [&](std::uint64_t seed) {
      return eval.error(add_uniform_noise(eval.clean(), sigma, seed));
    });
    out.rows.push_back({sigma, st});
    sxy += sigma * st.mean;
    sxx += sigma * sigma;
  }
  out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return out;
}

const SensitivityRow& SensitivityResult::row(int joint) const {
  for (const SensitivityRow& r : rows) {
    if (r.joint == joint) return r;
  }
  throw InvalidInput("sensitivity: no row for joint " + std::to_string(joint));
}

int SensitivityResult::body_rank(int joint) const {
  int rank = 0;
  for (const SensitivityRow& r : rows) {
    if (r.joint == kPelvis) continue;
    if (r.joint == joint) return rank;
    ++rank;
  }
  throw InvalidInput("sensitivity: no row for joint " + std::to_string(joint));
}

SensitivityResult run_sensitivity_ranking(const ErrorEvaluator& eval,
                                          double sigma,
                                          const AnalysisOptions& options) {
  options.validate();
  if (!(sigma >= 0.0)) throw InvalidInput("sensitivity: sigma < 0");
  // Flatten (joint, seed) so all runs share one pool.
  const std::size_t seeds = static_cast<std::size_t>(options.seeds);
  std::vector<double> values(kNumJoints * seeds);
  parallel_for(values.size(), options.jobs, [&](std::size_t i) {
    const int joint = static_cast<int>(i / seeds);
    const std::uint64_t seed = options.seed + i % seeds;
    const double mean_err =
        eval.error(add_joint_noise(eval.clean(), joint, sigma, seed));
    values[i] = kNumJoints * mean_err;
  });
  SensitivityResult out;
  out.sigma = sigma;
  for (int j = 0; j < kNumJoints; ++j) {
    out.rows.push_back(
        {j, summarize(std::span<const double>(values).subspan(j * seeds, seeds))});
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const SensitivityRow& a, const SensitivityRow& b) {
                     return a.error.mean > b.error.mean;
                   });
  return out;
}

std::vector<double> default_cutoffs() {
  std::vector<double> c;
  for (int hz = 2; hz <= 14; ++hz) c.push_back(hz);
  return c;
}

CutoffResult run_cutoff_sweep(const ErrorEvaluator& eval,
                              std::span<const double> cutoffs, double sigma,
                              const AnalysisOptions& options) {
  options.validate();
  CutoffResult out;
  out.sigma = sigma;
  const std::size_t seeds = static_cast<std::size_t>(options.seeds);
  std::vector<MotionSequence> noisy(seeds);
  std::vector<double> raw(seeds);
  parallel_for(seeds, options.jobs, [&](std::size_t k) {
    noisy[k] = add_uniform_noise(eval.clean(), sigma, options.seed + k);
    raw[k] = eval.error(noisy[k]);
  });
  out.unfiltered = summarize(raw);
  for (double hz : cutoffs) {
    const FilterSpec spec{hz, eval.clean().fps};
    spec.validate();
    std::vector<double> errs(seeds);
    parallel_for(seeds, options.jobs, [&](std::size_t k) {
      errs[k] = eval.error(filter_motion(noisy[k], spec));
    });
    out.rows.push_back(
        {hz, summarize(errs), eval.error(filter_motion(eval.clean(), spec))});
  }
  return out;
}

RealisticResult run_realistic_comparison(const ErrorEvaluator& eval,
                                         const NoiseProfile& profile,
                                         const AnalysisOptions& options,
                                         double cutoff_hz) {
  options.validate();
  profile.validate();
  const FilterSpec spec{cutoff_hz, eval.clean().fps};
  spec.validate();
  RealisticResult out;
  out.matched_sigma = profile.matched_uniform_sigma();
  out.cutoff_hz = cutoff_hz;
  const std::size_t seeds = static_cast<std::size_t>(options.seeds);
  // Per seed: uniform raw, uniform filtered, realistic raw, realistic filtered.
  std::vector<double> v(4 * seeds);
  parallel_for(seeds, options.jobs, [&](std::size_t k) {
    const std::uint64_t seed = options.seed + k;
    const MotionSequence u =
        add_uniform_noise(eval.clean(), out.matched_sigma, seed);
    NoiseProfile p = profile;
    p.seed = seed;
    const MotionSequence r = add_realistic_noise(eval.clean(), p);
    v[k] = eval.error(u);
    v[seeds + k] = eval.error(filter_motion(u, spec));
    v[2 * seeds + k] = eval.error(r);
    v[3 * seeds + k] = eval.error(filter_motion(r, spec));
  });
  const std::span<const double> all(v);
  out.uniform_raw = summarize(all.subspan(0, seeds));
  out.uniform_filtered = summarize(all.subspan(seeds, seeds));
  out.realistic_raw = summarize(all.subspan(2 * seeds, seeds));
  out.realistic_filtered = summarize(all.subspan(3 * seeds, seeds));
  return out;
}

std::string amplification_csv(const SweepResult& r) {
  std::string s = "sigma,mean_nm,std_nm,n\n";
  for (const SweepRow& row : r.rows) {
    s += fmt(row.x) + ',' + fmt(row.error.mean) + ',' + fmt(row.error.std) +
         ',' + std::to_string(row.error.n) + '\n';
  }
  return s;
}

std::string sensitivity_csv(const SensitivityResult& r) {
  std::string s = "joint,error_nm\n";
  for (const SensitivityRow& row : r.rows) {
    s += std::string(kJointNames[row.joint]) + ',' + fmt(row.error.mean) +
         '\n';
  }
  return s;
}

std::string cutoff_csv(const CutoffResult& r) {
  std::string s = "cutoff_hz,noise_error_nm,distortion_nm\n";
  for (const CutoffRow& row : r.rows) {
    s += fmt(row.cutoff_hz) + ',' + fmt(row.noise_error.mean) + ',' +
         fmt(row.distortion) + '\n';
  }
  return s;
}

std::string realistic_csv(const RealisticResult& r) {
  std::string s = "model,filtered,error_nm\n";
  s += "uniform,false," + fmt(r.uniform_raw.mean) + '\n';
  s += "uniform,true," + fmt(r.uniform_filtered.mean) + '\n';
  s += "realistic,false," + fmt(r.realistic_raw.mean) + '\n';
  s += "realistic,true," + fmt(r.realistic_filtered.mean) + '\n';
  return s;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
  if (!out) throw InvalidInput("error writing " + path.string());
}

}  // namespace idyn
