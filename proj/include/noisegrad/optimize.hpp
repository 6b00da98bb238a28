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

#include <cmath>
#include <stdexcept>
#include <utility>

namespace noisegrad {

/// Golden-section search for a minimum of a unimodal function on [a, b].
/// Stops when the bracket is narrower than tol.
template <typename F, typename Scalar>
Scalar golden_section_minimize(F&& f, Scalar a, Scalar b, Scalar tol, int max_iter = 500) {
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar c = b - inv_phi * (b - a);
  Scalar d = a + inv_phi * (b - a);
  Scalar fc = f(c);
  Scalar fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

/// Bisection for a sign change of f on [a, b]; f(a) and f(b) must differ in
/// sign. Returns the midpoint of the final bracket.
template <typename F, typename Scalar>
Scalar bisect_root(F&& f, Scalar a, Scalar b, Scalar tol, int max_iter = 400) {
  Scalar fa = f(a);
  const Scalar fb = f(b);
  if ((fa < 0) == (fb < 0)) throw std::invalid_argument("bisect_root: no sign change on bracket");
  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    const Scalar m = a + (b - a) / 2;
    const Scalar fm = f(m);
    if (fm == 0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return a + (b - a) / 2;
}

}  // namespace noisegrad
