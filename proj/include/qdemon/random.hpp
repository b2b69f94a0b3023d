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

#include <random>

#include "qdemon/lindblad.hpp"
#include "qdemon/mpdo.hpp"
#include "qdemon/opalg.hpp"

namespace qdemon::random {

using Engine = std::mt19937_64;

inline Operator ginibre(Engine& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Operator g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = Complex(n(rng), n(rng));
  return g;
}

/// Full-rank random density operator (Hilbert–Schmidt measure).
inline Operator density_matrix(Engine& rng, Eigen::Index dim) {
  const Operator g = ginibre(rng, dim, dim);
  Operator rho = g * g.adjoint();
  rho /= rho.trace();
  return hermitize(rho);
}

/// Haar-random unitary via QR of a Ginibre matrix with phase fixing.
inline Operator unitary(Engine& rng, Eigen::Index dim) {
  const Operator g = ginibre(rng, dim, dim);
  Eigen::HouseholderQR<Operator> qr(g);
  Operator q = qr.householderQ() * Operator::Identity(dim, dim);
  const Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

inline Operator hermitian(Engine& rng, Eigen::Index dim) { return hermitize(ginibre(rng, dim, dim)); }

inline Operator pure_state(Engine& rng, Eigen::Index dim) {
  ComplexVector psi = ginibre(rng, dim, 1).col(0);
  psi.normalize();
  return ket_projector(psi);
}

/// Random demon parameters with β_c > β_h > 0 and τ in (0.05, 3).
inline DemonParams params(Engine& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DemonParams p;
  p.delta = 0.5 + 1.5 * u(rng);
  p.beta_h = 0.1 + 2.0 * u(rng);
  p.beta_c = p.beta_h + 0.01 + 2.0 * u(rng);
  p.tau = 0.05 + 2.95 * u(rng);
  p.gamma_h = 0.5 + 2.0 * u(rng);
  p.gamma_c = 0.5 + 2.0 * u(rng);
  return p;
}

/// Separable hidden-Markov tape: a bond walk with nonnegative weights T and a
/// qubit state ρ_{b'b} emitted on each transition. χ = `chi`.
inline MpdoState hidden_markov(Engine& rng, Eigen::Index chi = 2) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  MpdoState m;
  for (auto& a : m.site) a = Operator::Zero(chi, chi);
  for (Eigen::Index b1 = 0; b1 < chi; ++b1)
    for (Eigen::Index b0 = 0; b0 < chi; ++b0) {
      const double t = u(rng);
      const Operator rho = density_matrix(rng, 2);
      for (const BasisLabel l : kBasisLabels) {
        const auto [r, c] = matrix_unit(l);
        m.site[index_of(l)](b1, b0) = t * rho(r, c);
      }
    }
  m.boundary = Operator::Identity(chi, chi);
  return m;
}

/// Tape obtained by tracing the ancilla of a random pure MPS with bond
/// dimension `bond`; the MPDO bond dimension is bond².
inline MpdoState purified(Engine& rng, Eigen::Index bond = 2, Eigen::Index ancilla = 2) {
  std::array<std::vector<Operator>, 2> b;
  for (int s = 0; s < 2; ++s)
    for (Eigen::Index a = 0; a < ancilla; ++a) b[static_cast<std::size_t>(s)].push_back(ginibre(rng, bond, bond));
  MpdoState m;
  for (const BasisLabel l : kBasisLabels) {
    const auto [r, c] = matrix_unit(l);
    Operator acc = Operator::Zero(bond * bond, bond * bond);
    for (Eigen::Index a = 0; a < ancilla; ++a)
      acc += kron(b[static_cast<std::size_t>(r)][static_cast<std::size_t>(a)],
                  b[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)].conjugate());
    m.site[index_of(l)] = acc;
  }
  const double scale = transfer_matrix(m).cwiseAbs().maxCoeff();
  for (auto& a : m.site) a /= scale;
  m.boundary = Operator::Identity(bond * bond, bond * bond);
  return m;
}

}  // namespace qdemon::random
