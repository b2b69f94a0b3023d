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

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "qdemon/opalg.hpp"

namespace qdemon {

/// Physical parameters of one demon–memory interaction. Units: ħ = k_B = 1,
/// energies in units of the gap.
///
/// The default rate scales follow the pair-sum-two convention (rates 1 ∓ tanh(βΔ/2)),
/// and the default hot inverse temperature is β_hΔ = ln 3, i.e. tanh(β_hΔ/2) = 1/2.
struct DemonParams {
  double delta = 1.0;
  double beta_h = 1.0986122886681098;  // ln 3
  double beta_c = 1.0986122886681098;
  double tau = 0.3;
  double gamma_h = 2.0;
  double gamma_c = 2.0;

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(delta) || delta <= 0) throw std::invalid_argument("DemonParams: delta must be positive and finite");
    if (!finite(beta_h) || beta_h < 0) throw std::invalid_argument("DemonParams: beta_h must be non-negative");
    if (std::isnan(beta_c) || beta_c < beta_h)
      throw std::invalid_argument("DemonParams: beta_c must be at least beta_h (T_c <= T_h)");
    if (!finite(tau) || tau < 0) throw std::invalid_argument("DemonParams: tau must be non-negative");
    if (!finite(gamma_h) || gamma_h <= 0 || !finite(gamma_c) || gamma_c <= 0)
      throw std::invalid_argument("DemonParams: rate scales must be positive");
  }

  /// Resolve β_c from the thermal-gradient parameter: β_c = β_h + (2/Δ) atanh ε.
  static DemonParams from_epsilon(double epsilon, double beta_h = 1.0986122886681098, double tau = 0.3,
                                  double delta = 1.0, double gamma_h = 2.0, double gamma_c = 2.0) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("DemonParams: epsilon must lie in [0, 1)");
    DemonParams p;
    p.delta = delta;
    p.beta_h = beta_h;
    p.beta_c = beta_h + 2.0 * std::atanh(epsilon) / delta;
    p.tau = tau;
    p.gamma_h = gamma_h;
    p.gamma_c = gamma_c;
    p.validate();
    return p;
  }

  friend bool operator==(const DemonParams&, const DemonParams&) = default;
};

/// Thermal-gradient parameter ε = tanh[(β_c − β_h)Δ/2].
inline double epsilon(const DemonParams& p) {
  p.validate();
  return std::tanh((p.beta_c - p.beta_h) * p.delta / 2.0);
}

struct RateSet {
  double g_to_e = 0;    // intrinsic, hot bath
  double e_to_g = 0;
  double g0_to_e1 = 0;  // cooperative, cold bath
  double e1_to_g0 = 0;
};

namespace detail {
/// 1 / (1 + e^{−x}) without overflow.
inline double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
}  // namespace detail

/// Detailed-balance rates with each pair summing to its scale.
inline RateSet transition_rates(const DemonParams& p) {
  p.validate();
  const double xh = p.beta_h * p.delta;
  const double xc = p.beta_c * p.delta;
  return RateSet{
      .g_to_e = p.gamma_h * detail::logistic(-xh),
      .e_to_g = p.gamma_h * detail::logistic(xh),
      .g0_to_e1 = p.gamma_c * detail::logistic(-xc),
      .e1_to_g0 = p.gamma_c * detail::logistic(xc),
  };
}

/// Ĥ_D ⊗ 1̂_M with Ĥ_D = Δ|e⟩⟨e| = (Δ/2)(1̂ − σᶻ).
inline Operator demon_hamiltonian(const DemonParams& p) {
  return kron(0.5 * p.delta * (pauli("I") - pauli("z")), pauli("I"));
}

struct JumpOperators {
  Operator g_to_e;
  Operator e_to_g;
  Operator g0_to_e1;
  Operator e1_to_g0;
};

inline JumpOperators jump_operators(const DemonParams& p) {
  const RateSet r = transition_rates(p);
  const Operator lower = pauli("-");
  const Operator raise = pauli("+");
  const Operator id = pauli("I");
  return JumpOperators{
      .g_to_e = std::sqrt(r.g_to_e) * kron(lower, id),
      .e_to_g = std::sqrt(r.e_to_g) * kron(raise, id),
      .g0_to_e1 = std::sqrt(r.g0_to_e1) * kron(lower, lower),
      .e1_to_g0 = std::sqrt(r.e1_to_g0) * kron(raise, raise),
  };
}

/// ρ ↦ LρL† − ½{L†L, ρ}.
inline Superoperator dissipator(const Operator& jump) {
  const Operator n = jump.adjoint() * jump;
  return Superoperator(sandwich(jump, jump).matrix() - 0.5 * left_multiply(n).matrix() -
                       0.5 * right_multiply(n).matrix());
}

/// ρ ↦ −i[H, ρ].
inline Superoperator commutator_generator(const Operator& h) {
  return Superoperator(-kI * (left_multiply(h).matrix() - right_multiply(h).matrix()));
}

/// The generator split by physical origin. `local` holds the demon Hamiltonian
/// plus the intrinsic (hot) jumps; `cooperative` holds the cold-bath jumps.
struct LindbladianTerms {
  Superoperator local;
  Superoperator cooperative;
  [[nodiscard]] Superoperator total() const { return local + cooperative; }
};

inline LindbladianTerms lindbladian_terms(const DemonParams& p) {
  const JumpOperators j = jump_operators(p);
  Superoperator local = commutator_generator(demon_hamiltonian(p));
  local += dissipator(j.g_to_e);
  local += dissipator(j.e_to_g);
  Superoperator coop = dissipator(j.g0_to_e1);
  coop += dissipator(j.e1_to_g0);
  return LindbladianTerms{std::move(local), std::move(coop)};
}

/// 16×16 generator of the demon–memory interaction on D ⊗ M.
inline Superoperator build_lindbladian(const DemonParams& p) { return lindbladian_terms(p).total(); }

/// φ_τ = exp(L τ).
inline Superoperator interaction_channel(const DemonParams& p) { return matexp(build_lindbladian(p), p.tau); }

/// Product fixed point (ρ_D, ρ_M). Index order is |g⟩ = |0⟩, |e⟩ = |1⟩ for the
/// demon and the classical basis for the memory; the memory bias equals ε.
inline std::pair<Operator, Operator> fixed_point(const DemonParams& p) {
  p.validate();
  const double xh = p.beta_h * p.delta;
  const double xg = (p.beta_c - p.beta_h) * p.delta;
  Operator rho_d = Operator::Zero(2, 2);
  rho_d(0, 0) = detail::logistic(xh);
  rho_d(1, 1) = detail::logistic(-xh);
  Operator rho_m = Operator::Zero(2, 2);
  rho_m(0, 0) = detail::logistic(xg);
  rho_m(1, 1) = detail::logistic(-xg);
  return {rho_d, rho_m};
}

inline Operator fixed_point_joint(const DemonParams& p) {
  const auto [d, m] = fixed_point(p);
  return kron(d, m);
}

struct ClassicalityResult {
  bool classical = false;
  double leakage = 0;  // largest |entry| coupling populations and coherences
};

/// A channel on qubit registers is classical when, in the matrix-unit product
/// basis, no population (diagonal) component feeds a coherence and vice versa.
inline ClassicalityResult classicality_check(const Superoperator& phi, double tol = 1e-12) {
  const Eigen::Index d = phi.operator_dim();
  auto is_population = [d](Eigen::Index v) { return v / d == v % d; };
  double leak = 0.0;
  for (Eigen::Index out = 0; out < phi.dim(); ++out)
    for (Eigen::Index in = 0; in < phi.dim(); ++in)
      if (is_population(out) != is_population(in)) leak = std::max(leak, std::abs(phi.matrix()(out, in)));
  return ClassicalityResult{leak <= tol, leak};
}

/// T^k(ρ_D) = tr_M φ(ρ_D ⊗ σᵏ), returned as a 4×4 superoperator on the demon.
inline Superoperator transfer_channel(const Superoperator& phi, int k) {
  if (k != 0 && k != 1) throw std::invalid_argument("transfer_channel: k must be 0 or 1");
  if (phi.operator_dim() != 4) throw std::invalid_argument("transfer_channel: expected a channel on D ⊗ M");
  const Operator sigma_k = basis_operator(k == 0 ? BasisLabel::Zero : BasisLabel::One);
  Eigen::MatrixXcd t(4, 4);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      Operator unit = Operator::Zero(2, 2);
      unit(r, c) = 1.0;
      const Operator out = partial_trace(phi.apply(kron(unit, sigma_k)), {2, 2}, {0});
      t.col(r * 2 + c) = vectorize(out);
    }
  return Superoperator(std::move(t));
}

inline Superoperator transfer_channel(const DemonParams& p, int k) { return transfer_channel(interaction_channel(p), k); }

/// Null space dimension of a superoperator, counted by singular values below `tol`.
inline int kernel_dimension(const Superoperator& s, double tol = 1e-10) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s.matrix());
  const RealVector sv = svd.singularValues();
  int count = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) < tol * std::max(1.0, sv(0))) ++count;
  return count;
}

/// Unit-trace fixed point of a trace-preserving map (right singular vector of S − 1).
inline Operator channel_fixed_point(const Superoperator& s) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s.matrix() - Eigen::MatrixXcd::Identity(s.dim(), s.dim()), Eigen::ComputeFullV);
  const ComplexVector v = svd.matrixV().col(s.dim() - 1);
  Operator rho = devectorize(v);
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-14) throw std::domain_error("channel_fixed_point: fixed point has zero trace");
  return hermitize(rho / tr);
}

}  // namespace qdemon
