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

// Noise-amplification experiments: torque error against pose-noise level,
// per-joint sensitivity, low-pass cutoff trade-off, and uniform versus
// realistic noise. Every experiment averages over seeds seed, seed + 1, ...
// and excludes kBoundaryFrames frames at each end from the error.

#ifndef IDYN_ANALYSIS_HPP_
#define IDYN_ANALYSIS_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "idyn/filtering.hpp"
#include "idyn/motion.hpp"
#include "idyn/noise.hpp"
#include "idyn/rnea.hpp"
#include "idyn/segment_params.hpp"
#include "idyn/skeleton.hpp"

namespace idyn {

inline constexpr int kDefaultSeeds = 10;
inline constexpr double kDefaultSigma = 0.05;

struct AnalysisOptions {
  int seeds = kDefaultSeeds;
  std::uint64_t seed = kDefaultSeed;
  // Worker threads; <= 0 means one per hardware thread. Results do not
  // depend on it.
  int jobs = 0;

  // Throws InvalidInput if seeds < 1.
  void validate() const;
};

// Torque error of perturbed motions against a fixed clean motion.
class ErrorEvaluator {
 public:
  ErrorEvaluator(Skeleton skeleton, BodySegments segments,
                 MotionSequence clean,
                 DynamicsMode mode = DynamicsMode::kPaperFaithful);

  const Skeleton& skeleton() const { return skeleton_; }
  const BodySegments& segments() const { return segments_; }
  const MotionSequence& clean() const { return clean_; }
  const DynamicsResult& clean_dynamics() const { return clean_dyn_; }
  DynamicsMode mode() const { return mode_; }

  DynamicsResult dynamics(const MotionSequence& motion) const;
  // Mean over interior frames and joints of the torque difference norm.
  double error(const MotionSequence& motion) const;

 private:
  Skeleton skeleton_;
  BodySegments segments_;
  MotionSequence clean_;
  DynamicsMode mode_;
  DynamicsResult clean_dyn_;
};

struct Stats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for n = 1
  int n = 0;
};

Stats summarize(std::span<const double> values);
double pearson(std::span<const double> x, std::span<const double> y);

struct SweepRow {
  double x = 0.0;
  Stats error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // Least-squares slope through the origin of mean error against sigma:
  // the amplification factor in Nm/rad.
  double slope = 0.0;
};

// 0, 0.01, ..., 0.2.
std::vector<double> default_sigmas();

SweepResult run_amplification_sweep(const ErrorEvaluator& eval,
                                    std::span<const double> sigmas,
                                    const AnalysisOptions& options = {});

struct SensitivityRow {
  int joint = 0;
  // Torque error summed over all 24 joints when only `joint` is perturbed.
  Stats error;
};

struct SensitivityResult {
  double sigma = kDefaultSigma;
  // 24 rows, sorted by decreasing mean error (ties by joint index).
  std::vector<SensitivityRow> rows;

  const SensitivityRow& row(int joint) const;
  // Rank of `joint` among the articulated joints, i.e. excluding the
  // pelvis row, whose rotation is the global orientation. 0 is the top.
  int body_rank(int joint) const;
};

SensitivityResult run_sensitivity_ranking(const ErrorEvaluator& eval,
                                          double sigma = kDefaultSigma,
                                          const AnalysisOptions& options = {});

struct CutoffRow {
  double cutoff_hz = 0.0;
  Stats noise_error;      // filtered noisy motion vs clean
  double distortion = 0.0;  // filtered clean motion vs clean
};

struct CutoffResult {
  double sigma = kDefaultSigma;
  Stats unfiltered;
  std::vector<CutoffRow> rows;
};

// 2, 3, ..., 14 Hz.
std::vector<double> default_cutoffs();

CutoffResult run_cutoff_sweep(const ErrorEvaluator& eval,
                              std::span<const double> cutoffs,
                              double sigma = kDefaultSigma,
                              const AnalysisOptions& options = {});

struct RealisticResult {
  double matched_sigma = 0.0;
  double cutoff_hz = kDefaultCutoffHz;
  Stats uniform_raw, uniform_filtered;
  Stats realistic_raw, realistic_filtered;
};

// Compares the realistic profile with uniform noise of the same mean
// per-channel variance, raw and after the zero-phase low-pass filter. The
// profile's own seed is replaced by options.seed + trial.
RealisticResult run_realistic_comparison(
    const ErrorEvaluator& eval, const NoiseProfile& profile,
    const AnalysisOptions& options = {},
    double cutoff_hz = kDefaultCutoffHz);

// CSV tables. Numbers use %.9g.
std::string amplification_csv(const SweepResult& r);  // sigma,mean_nm,std_nm,n
std::string sensitivity_csv(const SensitivityResult& r);  // joint,error_nm
// cutoff_hz,noise_error_nm,distortion_nm
std::string cutoff_csv(const CutoffResult& r);
// model,filtered,error_nm with model in {uniform, realistic} and filtered in
// {false, true}.
std::string realistic_csv(const RealisticResult& r);

// Writes `text` to `path`; throws Error if the file cannot be written.
void write_text_file(const std::filesystem::path& path,
                     const std::string& text);

}  // namespace idyn

#endif  // IDYN_ANALYSIS_HPP_
