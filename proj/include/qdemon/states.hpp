// Copyright 2026 The qdemon Authors
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

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qdemon/mpdo.hpp"
#include "qdemon/opalg.hpp"

namespace qdemon {

/// GHZ-correlated tape √((1+ζ)/2)|+n⟩^{⊗N} + √((1−ζ)/2)|−n⟩^{⊗N}, with
/// |+n⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩ and |−n⟩ = sin(θ/2)|0⟩ − e^{iφ} cos(θ/2)|1⟩.
struct GhzSpec {
  double zeta = 0.0;
  double theta = 0.0;
  double phi = 0.0;

  void validate() const {
    if (!(zeta >= -1.0 && zeta <= 1.0)) throw std::invalid_argument("GhzSpec: zeta must lie in [-1, 1]");
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw std::invalid_argument("GhzSpec: theta must lie in [0, pi]");
    if (!std::isfinite(phi)) throw std::invalid_argument("GhzSpec: phi must be finite");
  }
};

/// The two branch kets |+n⟩, |−n⟩ as columns.
inline Operator ghz_branches(const GhzSpec& spec) {
  const Complex phase = std::exp(Complex(0.0, spec.phi));
  const double c = std::cos(spec.theta / 2);
  const double s = std::sin(spec.theta / 2);
  Operator kets(2, 2);
  kets(0, 0) = c;
  kets(1, 0) = phase * s;
  kets(0, 1) = s;
  kets(1, 1) = -phase * c;
  return kets;
}

/// Exact MPDO of the GHZ family. The bond index enumerates branch pairs (s, s'),
/// so χ = 4; pairs with s ≠ s' carry the inter-branch coherence.
inline MpdoState ghz(const GhzSpec& spec) {
  spec.validate();
  const Operator kets = ghz_branches(spec);
  const std::array<double, 2> weight{(1.0 + spec.zeta) / 2, (1.0 - spec.zeta) / 2};
  MpdoState m;
  for (auto& a : m.site) a = Operator::Zero(4, 4);
  m.boundary = Operator::Zero(4, 4);
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) {
      const int b = 2 * s + t;
      m.boundary(b, b) = std::sqrt(weight[static_cast<std::size_t>(s)] * weight[static_cast<std::size_t>(t)]);
      for (const BasisLabel l : kBasisLabels) {
        const auto [r, c] = matrix_unit(l);
        m.site[index_of(l)](b, b) = kets(r, s) * std::conj(kets(c, t));
      }
    }
  return m;
}

/// Projects every site onto the classical labels (removes z-basis coherences).
inline MpdoState dephase_z(const MpdoState& m) {
  MpdoState out = m;
  out.site[index_of(BasisLabel::Plus)].setZero();
  out.site[index_of(BasisLabel::Minus)].setZero();
  return out;
}

/// Uncorrelated tape ⊗ diag((1+ζ)/2, (1−ζ)/2).
inline MpdoState product(double zeta) {
  if (!(zeta >= -1.0 && zeta <= 1.0)) throw std::invalid_argument("product: zeta must lie in [-1, 1]");
  MpdoState m;
  for (auto& a : m.site) a = Operator::Zero(1, 1);
  m.site[index_of(BasisLabel::Zero)](0, 0) = (1.0 + zeta) / 2;
  m.site[index_of(BasisLabel::One)](0, 0) = (1.0 - zeta) / 2;
  m.boundary = Operator::Identity(1, 1);
  return m;
}

/// Product of an arbitrary single-site state.
inline MpdoState product(const Operator& rho) {
  if (!is_density_operator(rho, 1e-10)) throw std::invalid_argument("product: expected a qubit density operator");
  MpdoState m;
  for (const BasisLabel l : kBasisLabels) {
    const auto [r, c] = matrix_unit(l);
    m.site[index_of(l)] = Operator::Constant(1, 1, rho(r, c));
  }
  m.boundary = Operator::Identity(1, 1);
  return m;
}

/// Transversal rotation ρ ↦ U^{⊗N} ρ U†^{⊗N} with U = exp(−iφσᶻ/2).
inline MpdoState rotate_z(const MpdoState& m, double phi) {
  MpdoState out = m;
  out.site[index_of(BasisLabel::Plus)] *= std::exp(Complex(0.0, -phi));
  out.site[index_of(BasisLabel::Minus)] *= std::exp(Complex(0.0, phi));
  return out;
}

}  // namespace qdemon
