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

#include "idyn/autodiff.hpp"

#include <atomic>

namespace idyn::ad {
namespace {

thread_local Tape* g_active = nullptr;

std::uint32_t next_tag() {
  static std::atomic<std::uint32_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace

double Gradient::wrt(const Var& v) const {
  if (v.is_constant()) return 0.0;
  if (v.tape_tag() != tag_ || v.id() >= adjoints_.size()) {
    throw InvalidInput("Gradient::wrt: variable not recorded on this tape");
  }
  return adjoints_[v.id()];
}

Tape::Scope::Scope(Tape& tape) : previous_(g_active) { g_active = &tape; }
Tape::Scope::~Scope() { g_active = previous_; }

Tape::Tape() : tag_(next_tag()) {}

Tape& Tape::active() {
  if (g_active == nullptr) {
    throw InvalidInput("no active ad::Tape on this thread");
  }
  return *g_active;
}

Tape* Tape::active_or_null() { return g_active; }

Var Tape::variable(double value) {
  nodes_.push_back({});
  return Var(value, static_cast<std::uint32_t>(nodes_.size() - 1), tag_);
}

void Tape::clear() {
  nodes_.clear();
  // Outstanding Vars must not alias nodes recorded after the clear.
  tag_ = next_tag();
}

Gradient Tape::backward(const Var& output) const {
  std::vector<double> adj(nodes_.size(), 0.0);
  if (output.is_constant()) return Gradient(std::move(adj), tag_);
  if (output.tape_tag() != tag_ || output.id() >= nodes_.size()) {
    throw InvalidInput("Tape::backward: output not recorded on this tape");
  }
  adj[output.id()] = 1.0;
  for (std::size_t k = output.id() + 1; k-- > 0;) {
    const double a = adj[k];
    if (a == 0.0) continue;
    const Node& n = nodes_[k];
    if (n.lhs != kNone) adj[n.lhs] += a * n.d_lhs;
    if (n.rhs != kNone) adj[n.rhs] += a * n.d_rhs;
  }
  return Gradient(std::move(adj), tag_);
}

}  // namespace idyn::ad
