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

// 3-vector and 3x3 matrix algebra, plus the SO(3) exponential (Rodrigues)
// and logarithm maps. Everything is templated on the scalar so the same code
// runs on double and on ad::Var.

#ifndef IDYN_ROTATIONS_HPP_
#define IDYN_ROTATIONS_HPP_

#include <array>
#include <cmath>
#include <numbers>
#include <type_traits>

#include "idyn/autodiff.hpp"
#include "idyn/error.hpp"

namespace idyn {

template <class T>
struct Vec3T {
  T x{}, y{}, z{};

  T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3T& operator+=(const Vec3T& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3T& operator-=(const Vec3T& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
};

template <class T>
Vec3T<T> operator+(const Vec3T<T>& a, const Vec3T<T>& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
template <class T>
Vec3T<T> operator-(const Vec3T<T>& a, const Vec3T<T>& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
template <class T>
Vec3T<T> operator-(const Vec3T<T>& a) {
  return {-a.x, -a.y, -a.z};
}
template <class T, class S>
Vec3T<T> operator*(const S& s, const Vec3T<T>& a) {
  return {a.x * s, a.y * s, a.z * s};
}
template <class T, class S>
Vec3T<T> operator*(const Vec3T<T>& a, const S& s) {
  return {a.x * s, a.y * s, a.z * s};
}
template <class T, class S>
Vec3T<T> operator/(const Vec3T<T>& a, const S& s) {
  return {a.x / s, a.y / s, a.z / s};
}

template <class T>
T dot(const Vec3T<T>& a, const Vec3T<T>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class T>
Vec3T<T> cross(const Vec3T<T>& a, const Vec3T<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
          a.x * b.y - a.y * b.x};
}

// Not differentiable at the origin.
template <class T>
T norm(const Vec3T<T>& a) {
  using std::sqrt;
  return sqrt(dot(a, a));
}

// Row-major 3x3 matrix.
template <class T>
struct Mat3T {
  std::array<T, 9> m{};

  static Mat3T identity() {
    Mat3T r;
    r.m[0] = T(1.0);
    r.m[4] = T(1.0);
    r.m[8] = T(1.0);
    return r;
  }
  static Mat3T diagonal(const T& a, const T& b, const T& c) {
    Mat3T r;
    r.m[0] = a;
    r.m[4] = b;
    r.m[8] = c;
    return r;
  }

  T& operator()(int r, int c) { return m[3 * r + c]; }
  const T& operator()(int r, int c) const { return m[3 * r + c]; }

  Mat3T transpose() const {
    Mat3T r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }
  T trace() const { return m[0] + m[4] + m[8]; }
};

template <class T>
Mat3T<T> operator*(const Mat3T<T>& a, const Mat3T<T>& b) {
  Mat3T<T> r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
    }
  }
  return r;
}

template <class T>
Vec3T<T> operator*(const Mat3T<T>& a, const Vec3T<T>& v) {
  return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
          a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
          a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
}

template <class T>
Mat3T<T> operator+(const Mat3T<T>& a, const Mat3T<T>& b) {
  Mat3T<T> r;
  for (int k = 0; k < 9; ++k) r.m[k] = a.m[k] + b.m[k];
  return r;
}

template <class T>
Mat3T<T> operator-(const Mat3T<T>& a, const Mat3T<T>& b) {
  Mat3T<T> r;
  for (int k = 0; k < 9; ++k) r.m[k] = a.m[k] - b.m[k];
  return r;
}

// Skew-symmetric matrix [v]x, with [v]x w = v x w.
template <class T>
Mat3T<T> skew(const Vec3T<T>& v) {
  Mat3T<T> r;
  r(0, 1) = -v.z;
  r(0, 2) = v.y;
  r(1, 0) = v.z;
  r(1, 2) = -v.x;
  r(2, 0) = -v.y;
  r(2, 1) = v.x;
  return r;
}

template <class T>
Mat3T<T> transpose_times(const Mat3T<T>& a, const Mat3T<T>& b) {
  Mat3T<T> r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      r(i, j) = a(0, i) * b(0, j) + a(1, i) * b(1, j) + a(2, i) * b(2, j);
    }
  }
  return r;
}

using Vec3 = Vec3T<double>;
using Mat3 = Mat3T<double>;
// Direction is the rotation axis, magnitude the angle in radians.
using AxisAngle = Vec3;

static_assert(sizeof(Vec3) == 3 * sizeof(double));
static_assert(std::is_standard_layout_v<Vec3>);

// Below this angle rodrigues() switches to its Taylor expansion.
inline constexpr double kRodriguesSmallAngle = 1e-7;
// Within this distance of pi, mat_log() reads the axis off the symmetric part.
inline constexpr double kLogNearPi = 1e-4;
// A differentiable mat_log refuses angles above pi minus this margin.
inline constexpr double kDifferentiableLogMargin = 1e-3;

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// exp([aa]x). Exactly the identity for a zero vector.
template <class T>
Mat3T<T> rodrigues(const Vec3T<T>& aa) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  if constexpr (std::is_same_v<T, double>) {
    if (!is_finite(aa)) throw InvalidInput("rodrigues: non-finite axis-angle");
  }
  const T theta2 = dot(aa, aa);
  const Mat3T<T> k = skew(aa);
  const Mat3T<T> k2 = k * k;
  Mat3T<T> r = Mat3T<T>::identity();
  if (value_of(theta2) <
      kRodriguesSmallAngle * kRodriguesSmallAngle) {
    // I + K + K^2 / 2
    for (int i = 0; i < 9; ++i) r.m[i] = r.m[i] + k.m[i] + 0.5 * k2.m[i];
    return r;
  }
  const T theta = sqrt(theta2);
  const T a = sin(theta) / theta;
  const T b = (1.0 - cos(theta)) / theta2;
  for (int i = 0; i < 9; ++i) r.m[i] = r.m[i] + a * k.m[i] + b * k2.m[i];
  return r;
}

namespace detail {

// Axis of a rotation by nearly pi, from (R + R^T)/2 - cos(theta) I =
// (1 - cos(theta)) n n^T. The sign follows `hint` when it is non-zero.
inline Vec3 near_pi_axis(const Mat3& r, double cos_theta, const Vec3& hint) {
  const double denom = 1.0 - cos_theta;
  Mat3 nn;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      nn(i, j) = (0.5 * (r(i, j) + r(j, i)) - (i == j ? cos_theta : 0.0)) /
                 denom;
    }
  }
  int k = 0;
  if (nn(1, 1) > nn(k, k)) k = 1;
  if (nn(2, 2) > nn(k, k)) k = 2;
  Vec3 n{nn(0, k), nn(1, k), nn(2, k)};
  n = n / std::sqrt(nn(k, k) > 0.0 ? nn(k, k) : 1.0);
  n = n / norm(n);
  if (dot(n, hint) < 0.0) n = -n;
  return n;
}

}  // namespace detail

// Rotation matrix -> axis-angle with angle in [0, pi].
//
// The angle comes from atan2(|v|, (tr R - 1) / 2) with v = vee(R - R^T) / 2
// (so |v| = sin theta), which stays well conditioned near zero where acos
// would not. Near pi the axis is read from the symmetric part. For ad::Var
// the near-pi branch is rejected instead.
template <class T>
Vec3T<T> mat_log(const Mat3T<T>& r) {
  using std::atan2;
  using std::sqrt;
  if constexpr (std::is_same_v<T, double>) {
    for (double v : r.m) {
      if (!std::isfinite(v)) throw InvalidInput("mat_log: non-finite matrix");
    }
    const Mat3 rtr = transpose_times(r, r);
    double err = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        err = std::max(err, std::abs(rtr(i, j) - (i == j ? 1.0 : 0.0)));
    const double det =
        r(0, 0) * (r(1, 1) * r(2, 2) - r(1, 2) * r(2, 1)) -
        r(0, 1) * (r(1, 0) * r(2, 2) - r(1, 2) * r(2, 0)) +
        r(0, 2) * (r(1, 0) * r(2, 1) - r(1, 1) * r(2, 0));
    if (err > 1e-6 || std::abs(det - 1.0) > 1e-6) {
      throw InvalidInput("mat_log: matrix is not a rotation");
    }
  }
  const Vec3T<T> v{0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)),
                   0.5 * (r(1, 0) - r(0, 1))};
  const T c = 0.5 * (r.trace() - 1.0);
  const T s2 = dot(v, v);
  const double s2v = value_of(s2);
  const double cv = value_of(c);

  // theta / sin(theta) = 1 + theta^2 / 6 + O(theta^4); theta ~ |v| here.
  if (s2v < 1e-16 && cv > 0.0) {
    const T scale = 1.0 + s2 / 6.0;
    return scale * v;
  }
  const T s = sqrt(s2);
  const T theta = atan2(s, c);
  const double theta_v = value_of(theta);
  if constexpr (std::is_same_v<T, double>) {
    if (theta_v > std::numbers::pi - kLogNearPi) {
      return theta_v * detail::near_pi_axis(r, cv, v);
    }
  } else {
    if (theta_v > std::numbers::pi - kDifferentiableLogMargin) {
      throw InvalidInput(
          "mat_log: differentiable logarithm evaluated too close to pi");
    }
  }
  return (theta / s) * v;
}

}  // namespace idyn

#endif  // IDYN_ROTATIONS_HPP_
