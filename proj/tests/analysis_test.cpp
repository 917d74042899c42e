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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "idyn/parallel.hpp"

namespace idyn {
namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

class AnalysisTest : public ::testing::Test {
 protected:
  static const ErrorEvaluator& eval() {
    static const ErrorEvaluator e = [] {
      const Skeleton s = default_skeleton();
      return ErrorEvaluator(s, build_segment_params(s), synth_walk(1.5));
    }();
    return e;
  }
  static AnalysisOptions opts(int jobs = 1) {
    AnalysisOptions o;
    o.seeds = 3;
    o.seed = 7;
    o.jobs = jobs;
    return o;
  }
};

TEST(Stats, Summarize) {
  const std::vector<double> v{1, 2, 3, 4};
  const Stats s = summarize(v);
  EXPECT_EQ(s.n, 4);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(5.0 / 3.0));
  const std::vector<double> one{3.5};
  EXPECT_EQ(summarize(one).std, 0.0);
  EXPECT_EQ(summarize(std::span<const double>{}).n, 0);
}

TEST(Stats, Pearson) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2, 4, 6, 8, 10};
  const std::vector<double> z{5, 4, 3, 2, 1};
  const std::vector<double> w{1, -1, 0, 1, -1};
  EXPECT_NEAR(pearson(x, y), 1.0, 1e-15);
  EXPECT_NEAR(pearson(x, z), -1.0, 1e-15);
  EXPECT_NEAR(pearson(x, w), -2.0 / std::sqrt(40.0), 1e-15);
  EXPECT_THROW(pearson(x, std::vector<double>{1, 2}), InvalidInput);
}

TEST(Parallel, CoversEveryIndexOnceAndRethrows) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 6) throw InvalidInput("boom");
                            }),
               InvalidInput);
  EXPECT_GE(resolve_jobs(0), 1);
  EXPECT_EQ(resolve_jobs(3), 3);
}

TEST(Options, Validation) {
  AnalysisOptions o;
  o.seeds = 0;
  EXPECT_THROW(o.validate(), InvalidInput);
}

TEST_F(AnalysisTest, CleanMotionHasZeroError) {
  EXPECT_EQ(eval().error(eval().clean()), 0.0);
}

TEST_F(AnalysisTest, SweepMatchesNaiveRecomputation) {
  const std::vector<double> sigmas{0.0, 0.02, 0.05};
  const SweepResult r = run_amplification_sweep(eval(), sigmas, opts());
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[0].error.mean, 0.0);
  EXPECT_EQ(r.rows[0].error.std, 0.0);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    std::vector<double> errs;
    for (int k = 0; k < 3; ++k) {
      errs.push_back(
          eval().error(add_uniform_noise(eval().clean(), sigmas[i], 7 + k)));
    }
    const Stats s = summarize(errs);
    EXPECT_EQ(r.rows[i].x, sigmas[i]);
    EXPECT_EQ(r.rows[i].error.n, 3);
    EXPECT_DOUBLE_EQ(r.rows[i].error.mean, s.mean);
    EXPECT_DOUBLE_EQ(r.rows[i].error.std, s.std);
    num += sigmas[i] * s.mean;
    den += sigmas[i] * sigmas[i];
  }
  EXPECT_NEAR(r.slope, num / den, 1e-9 * r.slope);
}

TEST_F(AnalysisTest, ErrorGrowsLinearlyForSmallNoise) {
  // Torque is a smooth function of pose, so to first order the error of
  // noise k * e is k times the error of e.
  const MotionSequence a = add_uniform_noise(eval().clean(), 0.001, 3);
  const MotionSequence b = add_uniform_noise(eval().clean(), 0.002, 3);
  EXPECT_NEAR(eval().error(b) / eval().error(a), 2.0, 0.02);
}

TEST_F(AnalysisTest, ResultsIndependentOfThreadCount) {
  const std::vector<double> sigmas{0.0, 0.03, 0.06, 0.1};
  EXPECT_EQ(amplification_csv(run_amplification_sweep(eval(), sigmas, opts(1))),
            amplification_csv(run_amplification_sweep(eval(), sigmas, opts(4))));
  EXPECT_EQ(sensitivity_csv(run_sensitivity_ranking(eval(), 0.05, opts(1))),
            sensitivity_csv(run_sensitivity_ranking(eval(), 0.05, opts(3))));
  const std::vector<double> cutoffs{4.0, 8.0};
  EXPECT_EQ(cutoff_csv(run_cutoff_sweep(eval(), cutoffs, 0.05, opts(1))),
            cutoff_csv(run_cutoff_sweep(eval(), cutoffs, 0.05, opts(4))));
  EXPECT_EQ(
      realistic_csv(run_realistic_comparison(eval(), realistic_profile(), opts(1))),
      realistic_csv(run_realistic_comparison(eval(), realistic_profile(), opts(2))));
}

TEST_F(AnalysisTest, AmplificationCsv) {
  const std::vector<double> sigmas{0.0, 0.05};
  const auto l = lines(amplification_csv(run_amplification_sweep(eval(), sigmas, opts())));
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "sigma,mean_nm,std_nm,n");
  EXPECT_EQ(l[1], "0,0,0,3");
  EXPECT_EQ(l[2].substr(0, 5), "0.05,");
  EXPECT_EQ(default_sigmas().size(), 21u);
  EXPECT_NEAR(default_sigmas().back(), 0.2, 1e-15);
}

TEST_F(AnalysisTest, SensitivityRanking) {
  const SensitivityResult r = run_sensitivity_ranking(eval(), 0.05, opts());
  ASSERT_EQ(r.rows.size(), 24u);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    EXPECT_GE(r.rows[i - 1].error.mean, r.rows[i].error.mean);
  }
  // Leaf rotations move no mass, so they cause no error.
  for (int j : {kHead, kLeftFoot, kRightFoot, kLeftHand, kRightHand}) {
    EXPECT_EQ(r.row(j).error.mean, 0.0) << kJointNames[j];
  }
  // Summed over joints: 24 times the mean error.
  const double direct =
      kNumJoints * eval().error(add_joint_noise(eval().clean(), kLeftKnee, 0.05, 8));
  const double seed7 =
      kNumJoints * eval().error(add_joint_noise(eval().clean(), kLeftKnee, 0.05, 7));
  const double seed9 =
      kNumJoints * eval().error(add_joint_noise(eval().clean(), kLeftKnee, 0.05, 9));
  EXPECT_NEAR(r.row(kLeftKnee).error.mean, (seed7 + direct + seed9) / 3, 1e-9);
  // Proximal trunk joints dominate the articulated body.
  EXPECT_EQ(r.body_rank(kSpine1), 0);
  EXPECT_GT(r.body_rank(kLeftWrist), r.body_rank(kLeftHip));
  EXPECT_THROW(r.body_rank(kPelvis), InvalidInput);

  const auto l = lines(sensitivity_csv(r));
  ASSERT_EQ(l.size(), 25u);
  EXPECT_EQ(l[0], "joint,error_nm");
}

TEST_F(AnalysisTest, CutoffTradeOff) {
  const std::vector<double> cutoffs = default_cutoffs();
  ASSERT_EQ(cutoffs.size(), 13u);
  const CutoffResult r = run_cutoff_sweep(eval(), cutoffs, 0.05, opts());
  ASSERT_EQ(r.rows.size(), 13u);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    // More bandwidth lets more noise through.
    EXPECT_GT(r.rows[i].noise_error.mean, r.rows[i - 1].noise_error.mean);
    EXPECT_LT(r.rows[i].noise_error.mean, r.unfiltered.mean);
  }
  // Distortion of the clean motion is U-shaped: a low cutoff removes real
  // content, and cutoffs near Nyquist ring at the clip edges.
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    if (r.rows[i].distortion < r.rows[best].distortion) best = i;
  }
  EXPECT_GT(best, 0u);
  EXPECT_LT(best, r.rows.size() - 1);
  EXPECT_GT(r.rows.front().distortion, 10 * r.rows[best].distortion);
  for (std::size_t i = 1; i <= best; ++i) {
    EXPECT_LT(r.rows[i].distortion, r.rows[i - 1].distortion);
  }
  const auto l = lines(cutoff_csv(r));
  ASSERT_EQ(l.size(), 14u);
  EXPECT_EQ(l[0], "cutoff_hz,noise_error_nm,distortion_nm");
}

TEST_F(AnalysisTest, RealisticComparison) {
  const NoiseProfile p = realistic_profile();
  const RealisticResult r = run_realistic_comparison(eval(), p, opts());
  EXPECT_EQ(r.matched_sigma, p.matched_uniform_sigma());
  EXPECT_LT(r.uniform_filtered.mean, r.uniform_raw.mean);
  EXPECT_LT(r.realistic_filtered.mean, r.realistic_raw.mean);
  // The first trial reproduces a hand-built noisy motion.
  NoiseProfile q = p;
  q.seed = 7;
  AnalysisOptions one = opts();
  one.seeds = 1;
  const RealisticResult r1 = run_realistic_comparison(eval(), p, one);
  EXPECT_DOUBLE_EQ(r1.realistic_raw.mean,
                   eval().error(add_realistic_noise(eval().clean(), q)));
  const auto l = lines(realistic_csv(r));
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l[0], "model,filtered,error_nm");
  EXPECT_EQ(l[1].substr(0, 14), "uniform,false,");
  EXPECT_EQ(l[4].substr(0, 15), "realistic,true,");
}

TEST(WriteTextFile, Errors) {
  EXPECT_THROW(write_text_file("/nonexistent/dir/x.csv", "a"), Error);
  const auto path = std::filesystem::temp_directory_path() /
                    ("idyn_analysis_" + std::to_string(::getpid()) + ".csv");
  write_text_file(path, "a,b\n1,2\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "a,b\n1,2\n");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace idyn
