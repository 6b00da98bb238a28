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

#include "noisegrad/density.hpp"

namespace noisegrad {

char to_char(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X: return 'X';
    case PauliAxis::Y: return 'Y';
    case PauliAxis::Z: return 'Z';
  }
  return '?';
}

char to_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

PauliAxis parse_axis(char c) {
  switch (c) {
    case 'X': case 'x': return PauliAxis::X;
    case 'Y': case 'y': return PauliAxis::Y;
    case 'Z': case 'z': return PauliAxis::Z;
    default: throw std::invalid_argument(std::string("not a Pauli axis: '") + c + "'");
  }
}

Pauli parse_pauli(char c) {
  switch (c) {
    case 'I': case 'i': case '_': return Pauli::I;
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    default: throw std::invalid_argument(std::string("not a Pauli letter: '") + c + "'");
  }
}

PauliString::PauliString(std::vector<Pauli> letters) : letters_(std::move(letters)) {
  if (letters_.size() > 62) throw std::invalid_argument("Pauli string too long");
}

PauliString PauliString::parse(std::string_view text) {
  std::vector<Pauli> letters;
  letters.reserve(text.size());
  for (char c : text) letters.push_back(parse_pauli(c));
  return PauliString(std::move(letters));
}

bool PauliString::is_identity() const {
  for (Pauli p : letters_) {
    if (p != Pauli::I) return false;
  }
  return true;
}

std::string PauliString::str() const {
  std::string s;
  for (Pauli p : letters_) s.push_back(to_char(p));
  return s;
}

Eigen::Index PauliString::flip_mask() const {
  const int n = size();
  Eigen::Index m = 0;
  for (int q = 0; q < n; ++q) {
    const Pauli p = letters_[static_cast<std::size_t>(q)];
    if (p == Pauli::X || p == Pauli::Y) m |= qubit_mask(n, q);
  }
  return m;
}

Eigen::Index PauliString::sign_mask() const {
  const int n = size();
  Eigen::Index m = 0;
  for (int q = 0; q < n; ++q) {
    const Pauli p = letters_[static_cast<std::size_t>(q)];
    if (p == Pauli::Y || p == Pauli::Z) m |= qubit_mask(n, q);
  }
  return m;
}

int PauliString::y_count() const {
  int c = 0;
  for (Pauli p : letters_) c += (p == Pauli::Y);
  return c;
}

PauliObservable::PauliObservable(PauliString letters) : letters_(std::move(letters)) {
  if (letters_.size() == 0 || letters_.is_identity()) {
    throw std::invalid_argument("observable needs at least one non-identity letter");
  }
}

PauliObservable PauliObservable::cyclic_xyz(int n) {
  if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
  std::vector<Pauli> letters;
  for (int q = 0; q < n; ++q) letters.push_back(static_cast<Pauli>(1 + q % 3));
  return PauliObservable(PauliString(std::move(letters)));
}

}  // namespace noisegrad
