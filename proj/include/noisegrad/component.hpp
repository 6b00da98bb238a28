// Copyright 2026 The noisegrad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <string_view>

namespace noisegrad {

/// Kind of derivative component being estimated.
enum class Component { Gradient, DiagHessian, OffDiagHessian };

inline constexpr std::array<Component, 3> kAllComponents = {
    Component::Gradient, Component::DiagHessian, Component::OffDiagHessian};

/// Circuit evaluations per estimate: 2, 3 and 4.
constexpr int point_count(Component c) {
  switch (c) {
    case Component::Gradient: return 2;
    case Component::DiagHessian: return 3;
    case Component::OffDiagHessian: return 4;
  }
  return 0;
}

constexpr std::string_view to_string(Component c) {
  switch (c) {
    case Component::Gradient: return "gradient";
    case Component::DiagHessian: return "diag";
    case Component::OffDiagHessian: return "offdiag";
  }
  return "?";
}

Component parse_component(std::string_view name);

}  // namespace noisegrad
