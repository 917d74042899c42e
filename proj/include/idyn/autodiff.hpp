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

// Reverse-mode automatic differentiation on a recording tape.
//
// A `Var` is a value plus the index of the tape node that produced it. Every
// arithmetic operation on non-constant `Var`s appends one node holding the
// local partial derivatives with respect to (at most) two parents, so the
// tape is topologically ordered by construction. `Tape::backward` walks the
// nodes once in reverse and accumulates adjoints.
//
// Operations record onto the tape made active on the current thread with
// `Tape::Scope`. A `Var` built from a plain double is a constant: it never
// allocates a node and receives no adjoint.
//
//   ad::Tape tape;
//   ad::Tape::Scope scope(tape);
//   ad::Var x = tape.variable(3.0);
//   ad::Var y = x * x;
//   auto grad = tape.backward(y);   // grad.wrt(x) == 6

#ifndef IDYN_AUTODIFF_HPP_
#define IDYN_AUTODIFF_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "idyn/error.hpp"

namespace idyn::ad {

class Tape;

class Var {
 public:
  static constexpr std::uint32_t kConstant = 0xffffffffu;

  Var() = default;
  Var(double value) : value_(value) {}  // NOLINT: implicit constants

  double value() const { return value_; }
  std::uint32_t id() const { return id_; }
  std::uint32_t tape_tag() const { return tag_; }
  bool is_constant() const { return id_ == kConstant; }

  Var& operator+=(const Var& rhs);
  Var& operator-=(const Var& rhs);
  Var& operator*=(const Var& rhs);
  Var& operator/=(const Var& rhs);

 private:
  friend class Tape;
  Var(double value, std::uint32_t id, std::uint32_t tag)
      : value_(value), id_(id), tag_(tag) {}

  double value_ = 0.0;
  std::uint32_t id_ = kConstant;
  std::uint32_t tag_ = 0;
};

// Adjoints of every node of a tape for one scalar output.
class Gradient {
 public:
  Gradient(std::vector<double> adjoints, std::uint32_t tag)
      : adjoints_(std::move(adjoints)), tag_(tag) {}

  // d(output)/d(v). Zero for constants.
  double wrt(const Var& v) const;
  std::span<const double> adjoints() const { return adjoints_; }

 private:
  std::vector<double> adjoints_;
  std::uint32_t tag_;
};

class Tape {
 public:
  static constexpr std::uint32_t kNone = Var::kConstant;

  struct Node {
    std::uint32_t lhs = kNone;
    std::uint32_t rhs = kNone;
    double d_lhs = 0.0;
    double d_rhs = 0.0;
  };

  // Makes a tape the recording target of the current thread for the
  // lifetime of the scope. Scopes nest.
  class Scope {
   public:
    explicit Scope(Tape& tape);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* previous_;
  };

  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // The tape recording on this thread. Throws InvalidInput if none.
  static Tape& active();
  static Tape* active_or_null();

  // New independent variable (a leaf node).
  Var variable(double value);

  // Reverse sweep from `output`. Throws InvalidInput if `output` was recorded
  // on a different tape.
  Gradient backward(const Var& output) const;

  std::size_t size() const { return nodes_.size(); }
  std::uint32_t tag() const { return tag_; }
  void reserve(std::size_t n) { nodes_.reserve(n); }
  // Drops all nodes. Vars recorded before are invalidated.
  void clear();

  Var push(double value, const Var& a, double da) {
    if (a.is_constant()) return Var(value);
    check(a);
    nodes_.push_back({a.id_, kNone, da, 0.0});
    return Var(value, static_cast<std::uint32_t>(nodes_.size() - 1), tag_);
  }

  Var push(double value, const Var& a, double da, const Var& b, double db) {
    if (a.is_constant()) return push(value, b, db);
    if (b.is_constant()) return push(value, a, da);
    check(a);
    check(b);
    nodes_.push_back({a.id_, b.id_, da, db});
    return Var(value, static_cast<std::uint32_t>(nodes_.size() - 1), tag_);
  }

 private:
  void check(const Var& v) const {
    if (v.tag_ != tag_) {
      throw InvalidInput("ad::Var used with a tape it was not recorded on");
    }
  }

  std::vector<Node> nodes_;
  std::uint32_t tag_;
};

// Recording helpers. All of them fall back to plain arithmetic when every
// operand is constant.
namespace detail {
inline Var unary(double value, const Var& a, double da) {
  if (a.is_constant()) return Var(value);
  return Tape::active().push(value, a, da);
}
inline Var binary(double value, const Var& a, double da, const Var& b,
                  double db) {
  if (a.is_constant() && b.is_constant()) return Var(value);
  return Tape::active().push(value, a, da, b, db);
}
}  // namespace detail

inline Var operator+(const Var& a, const Var& b) {
  return detail::binary(a.value() + b.value(), a, 1.0, b, 1.0);
}
inline Var operator-(const Var& a, const Var& b) {
  return detail::binary(a.value() - b.value(), a, 1.0, b, -1.0);
}
inline Var operator*(const Var& a, const Var& b) {
  return detail::binary(a.value() * b.value(), a, b.value(), b, a.value());
}
inline Var operator/(const Var& a, const Var& b) {
  const double inv = 1.0 / b.value();
  const double q = a.value() * inv;
  return detail::binary(a.value() / b.value(), a, inv, b, -q * inv);
}
inline Var operator-(const Var& a) {
  return detail::unary(-a.value(), a, -1.0);
}

inline Var& Var::operator+=(const Var& rhs) { return *this = *this + rhs; }
inline Var& Var::operator-=(const Var& rhs) { return *this = *this - rhs; }
inline Var& Var::operator*=(const Var& rhs) { return *this = *this * rhs; }
inline Var& Var::operator/=(const Var& rhs) { return *this = *this / rhs; }

inline Var sin(const Var& a) {
  return detail::unary(std::sin(a.value()), a, std::cos(a.value()));
}
inline Var cos(const Var& a) {
  return detail::unary(std::cos(a.value()), a, -std::sin(a.value()));
}
// Derivative is undefined at 0; callers guard against it.
inline Var sqrt(const Var& a) {
  const double s = std::sqrt(a.value());
  return detail::unary(s, a, 0.5 / s);
}
// The argument is clamped to [-1 + 1e-9, 1 - 1e-9]; a clamped argument is
// treated as a constant.
inline Var acos(const Var& a) {
  constexpr double kLimit = 1.0 - 1e-9;
  if (a.value() > kLimit) return Var(std::acos(kLimit));
  if (a.value() < -kLimit) return Var(std::acos(-kLimit));
  const double v = a.value();
  return detail::unary(std::acos(v), a, -1.0 / std::sqrt(1.0 - v * v));
}
inline Var atan2(const Var& y, const Var& x) {
  const double r2 = x.value() * x.value() + y.value() * y.value();
  return detail::binary(std::atan2(y.value(), x.value()), y, x.value() / r2,
                        x, -y.value() / r2);
}
// max(a, 0) with subgradient 0 at exactly 0.
inline Var relu(const Var& a) {
  if (a.value() > 0.0) return detail::unary(a.value(), a, 1.0);
  return Var(0.0);
}

inline double value_of(const Var& v) { return v.value(); }

}  // namespace idyn::ad

namespace idyn {

// Scalar-generic helpers so the same templates serve double and ad::Var.
inline double value_of(double v) { return v; }
using ad::value_of;
inline double relu(double v) { return v > 0.0 ? v : 0.0; }
using ad::relu;

}  // namespace idyn

#endif  // IDYN_AUTODIFF_HPP_
