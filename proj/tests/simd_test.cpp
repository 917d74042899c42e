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

#include "idyn/simd/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "idyn/error.hpp"
#include "idyn/filtering.hpp"

namespace idyn::simd {
namespace {

std::vector<double> random_data(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

TEST(Dispatch, ScalarAlwaysAvailable) {
  EXPECT_TRUE(backend_available(Backend::kScalar));
  const std::vector<Backend> all = available_backends();
  ASSERT_FALSE(all.empty());
  EXPECT_EQ(all.front(), Backend::kScalar);
  EXPECT_EQ(backend_name(Backend::kScalar), "scalar");
  EXPECT_EQ(backend_name(Backend::kAvx2), "avx2");
}

TEST(Dispatch, ActiveBackendHonoursEnvironment) {
  const char* env = std::getenv("IDYN_SIMD");
  if (env != nullptr && std::string(env) == "scalar") {
    EXPECT_EQ(active_backend(), Backend::kScalar);
  } else {
    EXPECT_EQ(active_backend(), available_backends().back());
  }
}

TEST(Dispatch, SetActiveBackend) {
  const Backend before = active_backend();
  set_active_backend(Backend::kScalar);
  EXPECT_EQ(active_backend(), Backend::kScalar);
  EXPECT_EQ(&kernels(), &kernels(Backend::kScalar));
  if (!backend_available(Backend::kAvx2)) {
    EXPECT_THROW(set_active_backend(Backend::kAvx2), InvalidInput);
    EXPECT_THROW(kernels(Backend::kAvx2), InvalidInput);
  }
  set_active_backend(before);
}

class BackendEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!backend_available(Backend::kAvx2)) {
      GTEST_SKIP() << "AVX2 not available on this CPU";
    }
  }
  const KernelTable& ref = kernels(Backend::kScalar);
  const KernelTable& vec() { return kernels(Backend::kAvx2); }
};

TEST_F(BackendEquivalence, CentralDifferencesBitIdentical) {
  // Widths cover the pure-vector, pure-tail and mixed cases.
  for (std::size_t width : {1u, 3u, 4u, 5u, 8u, 11u, 72u, 75u}) {
    for (std::size_t frames : {3u, 4u, 17u}) {
      const std::vector<double> x = random_data(frames * width, width * 97 + frames);
      std::vector<double> v1(x.size(), -7.0), a1(x.size(), -7.0);
      std::vector<double> v2 = v1, a2 = a1;
      ref.central_differences(x.data(), frames, width, 1.0 / 30, v1.data(),
                              a1.data());
      vec().central_differences(x.data(), frames, width, 1.0 / 30, v2.data(),
                                a2.data());
      EXPECT_EQ(v1, v2) << width << "x" << frames;
      EXPECT_EQ(a1, a2) << width << "x" << frames;
      // Boundary rows untouched.
      EXPECT_EQ(v2[0], -7.0);
      EXPECT_EQ(a2.back(), -7.0);
    }
  }
}

TEST_F(BackendEquivalence, IirFilterBitIdentical) {
  const IirCoeffs c = butterworth_coeffs({6.0, 30.0});
  for (std::size_t channels : {1u, 2u, 4u, 6u, 9u, 75u}) {
    for (std::size_t frames : {1u, 5u, 150u}) {
      std::vector<double> d1 = random_data(frames * channels, channels + 31 * frames);
      std::vector<double> d2 = d1;
      ref.iir_filter(c.b.data(), c.a.data(), c.zi.data(), d1.data(), frames,
                     channels);
      vec().iir_filter(c.b.data(), c.a.data(), c.zi.data(), d2.data(), frames,
                       channels);
      EXPECT_EQ(d1, d2) << channels << "x" << frames;
    }
  }
}

TEST_F(BackendEquivalence, SumNorm3DiffClose) {
  for (std::size_t count : {0u, 1u, 3u, 4u, 7u, 24u, 2784u}) {
    const std::vector<double> a = random_data(3 * count, count + 1);
    const std::vector<double> b = random_data(3 * count, count + 2);
    const double r = ref.sum_norm3_diff(a.data(), b.data(), count);
    const double v = vec().sum_norm3_diff(a.data(), b.data(), count);
    EXPECT_NEAR(v, r, 1e-12 * std::max(1.0, r)) << count;
  }
}

TEST(ScalarKernels, SumNorm3DiffByHand) {
  const KernelTable& k = kernels(Backend::kScalar);
  const std::vector<double> a{3, 0, 4, 1, 1, 1}, b{0, 0, 0, 1, 1, 1};
  EXPECT_EQ(k.sum_norm3_diff(a.data(), b.data(), 2), 5.0);
  EXPECT_EQ(k.sum_norm3_diff(a.data(), b.data(), 0), 0.0);
}

TEST(ScalarKernels, IirMatchesLfilter) {
  const IirCoeffs c = butterworth_coeffs({4.0, 30.0});
  std::vector<double> x = random_data(64, 3);
  std::vector<double> y = x;
  kernels(Backend::kScalar).iir_filter(c.b.data(), c.a.data(), c.zi.data(),
                                       y.data(), 64, 1);
  lfilter_inplace<double>(c, std::span<double>(x));
  EXPECT_EQ(x, y);
}

}  // namespace
}  // namespace idyn::simd
