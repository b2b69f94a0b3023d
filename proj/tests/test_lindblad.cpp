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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qdemon/lindblad.hpp"
#include "qdemon/random.hpp"

namespace qdemon {
namespace {

double max_abs(const Eigen::MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

DemonParams unit_rates(double beta_h, double beta_c) {
  DemonParams p;
  p.beta_h = beta_h;
  p.beta_c = beta_c;
  p.gamma_h = 1.0;
  p.gamma_c = 1.0;
  return p;
}

TEST(Params, Validation) {
  DemonParams p;
  EXPECT_NO_THROW(p.validate());
  p.beta_c = p.beta_h - 0.1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = DemonParams{};
  p.delta = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = DemonParams{};
  p.tau = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_THROW(DemonParams::from_epsilon(1.0), std::invalid_argument);
}

TEST(Epsilon, ReferenceValues) {
  EXPECT_DOUBLE_EQ(epsilon(unit_rates(0.7, 0.7)), 0.0);
  EXPECT_NEAR(epsilon(unit_rates(0.5, 80.0)), 1.0, 1e-15);
  DemonParams p = unit_rates(1.0, 1.02);
  EXPECT_NEAR(epsilon(p), std::tanh(0.01), 1e-15);
  EXPECT_NEAR(epsilon(p), 0.0099997, 1e-7);
}

TEST(Epsilon, FromEpsilonRoundTrip) {
  for (const double eps : {0.0, 0.01, 0.3, 0.9}) {
    const DemonParams p = DemonParams::from_epsilon(eps, 0.8, 0.3, 1.3);
    EXPECT_NEAR(epsilon(p), eps, 1e-14);
  }
}

TEST(Rates, ReferenceValues) {
  const RateSet flat = transition_rates(unit_rates(0.0, 0.0));
  EXPECT_DOUBLE_EQ(flat.g_to_e, 0.5);
  EXPECT_DOUBLE_EQ(flat.e_to_g, 0.5);
  const RateSet r = transition_rates(unit_rates(1.0, 1.0));
  EXPECT_NEAR(r.g_to_e, 1.0 / (1.0 + std::exp(1.0)), 1e-15);
  EXPECT_NEAR(r.g_to_e, 0.26894, 1e-5);
}

TEST(Rates, DetailedBalanceAndNormalization) {
  random::Engine rng(21);
  for (int k = 0; k < 50; ++k) {
    const DemonParams p = random::params(rng);
    const RateSet r = transition_rates(p);
    EXPECT_NEAR(r.g_to_e / r.e_to_g / std::exp(-p.beta_h * p.delta), 1.0, 1e-14);
    EXPECT_NEAR(r.g0_to_e1 / r.e1_to_g0 / std::exp(-p.beta_c * p.delta), 1.0, 1e-14);
    EXPECT_NEAR(r.g_to_e + r.e_to_g, p.gamma_h, 1e-14);
    EXPECT_NEAR(r.g0_to_e1 + r.e1_to_g0, p.gamma_c, 1e-14);
  }
}

TEST(Rates, DefaultsArePairSumTwoWithHalfBias) {
  const RateSet r = transition_rates(DemonParams{});
  EXPECT_NEAR(r.g_to_e, 0.5, 1e-15);
  EXPECT_NEAR(r.e_to_g, 1.5, 1e-15);
}

TEST(Lindbladian, TracePreserving) {
  random::Engine rng(22);
  // tr ∘ L = 0 is trace preservation of the channel 1 + L.
  for (int k = 0; k < 10; ++k)
    EXPECT_LT(trace_preservation_error(Superoperator::identity(4) + build_lindbladian(random::params(rng))), 1e-14);
}

TEST(Lindbladian, AnnihilatesProductFixedPoint) {
  random::Engine rng(23);
  for (int k = 0; k < 20; ++k) {
    const DemonParams p = random::params(rng);
    EXPECT_LT(max_abs(build_lindbladian(p).apply(fixed_point_joint(p))), 1e-12);
  }
}

TEST(Lindbladian, EqualTemperaturesGiveUnbiasedMemory) {
  const auto [rho_d, rho_m] = fixed_point(unit_rates(0.9, 0.9));
  EXPECT_LT(max_abs(rho_m - 0.5 * Operator::Identity(2, 2)), 1e-15);
  EXPECT_NEAR(bias(rho_m), 0.0, 1e-15);
  EXPECT_NEAR(rho_d(1, 1).real() / rho_d(0, 0).real(), std::exp(-0.9), 1e-14);
}

TEST(Lindbladian, KernelIsOneDimensional) {
  random::Engine rng(24);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(kernel_dimension(build_lindbladian(random::params(rng))), 1);
}

TEST(Lindbladian, HamiltonianIsEnergyGap) {
  const DemonParams p = DemonParams::from_epsilon(0.1, 1.0, 0.3, 1.7);
  const Operator h = demon_hamiltonian(p);
  EXPECT_NEAR(h(2, 2).real(), 1.7, 1e-15);
  EXPECT_NEAR(h(0, 0).real(), 0.0, 1e-15);
}

TEST(Lindbladian, TermsCommuteWithTransversalRotations) {
  random::Engine rng(25);
  for (int k = 0; k < 5; ++k) {
    const LindbladianTerms terms = lindbladian_terms(random::params(rng));
    for (const double phi : {std::numbers::pi / 7, std::numbers::pi / 2, 1.0}) {
      const Superoperator joint = unitary_action(kron(rotation_z(phi), rotation_z(phi)));
      const Superoperator memory = unitary_action(kron(Operator::Identity(2, 2), rotation_z(phi)));
      EXPECT_LT(max_abs(terms.cooperative.compose(joint).matrix() - joint.compose(terms.cooperative).matrix()), 1e-12);
      EXPECT_LT(max_abs(terms.local.compose(memory).matrix() - memory.compose(terms.local).matrix()), 1e-12);
      EXPECT_LT(max_abs(terms.local.compose(joint).matrix() - joint.compose(terms.local).matrix()), 1e-12);
    }
  }
}

TEST(Channel, IsCptp) {
  random::Engine rng(26);
  for (int k = 0; k < 10; ++k) {
    const Superoperator phi = interaction_channel(random::params(rng));
    EXPECT_GE(min_choi_eigenvalue(phi), -1e-10);
    EXPECT_LT(trace_preservation_error(phi), 1e-12);
  }
}

TEST(Channel, ZeroTimeIsIdentity) {
  DemonParams p = DemonParams::from_epsilon(0.2);
  p.tau = 0.0;
  EXPECT_LT(max_abs(interaction_channel(p).matrix() - Eigen::MatrixXcd::Identity(16, 16)), 1e-15);
}

TEST(Channel, LongTimeRelaxesToFixedPoint) {
  random::Engine rng(27);
  DemonParams p = DemonParams::from_epsilon(0.3, 0.8, 50.0);
  const Superoperator phi = interaction_channel(p);
  for (int k = 0; k < 5; ++k)
    EXPECT_LT(trace_distance(phi.apply(random::density_matrix(rng, 4)), fixed_point_joint(p)), 1e-8);
}

TEST(Channel, Semigroup) {
  DemonParams a = DemonParams::from_epsilon(0.1, 1.0, 0.2);
  DemonParams b = a;
  b.tau = 0.9;
  DemonParams ab = a;
  ab.tau = 1.1;
  EXPECT_LT(max_abs(interaction_channel(a).compose(interaction_channel(b)).matrix() - interaction_channel(ab).matrix()),
            1e-12);
}

TEST(Classicality, ChannelIsClassical) {
  random::Engine rng(28);
  for (int k = 0; k < 10; ++k) EXPECT_TRUE(classicality_check(interaction_channel(random::params(rng))).classical);
  EXPECT_TRUE(classicality_check(Superoperator::identity(4)).classical);
}

TEST(Classicality, HadamardConjugationIsNot) {
  Operator h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  h /= std::sqrt(2.0);
  const ClassicalityResult r = classicality_check(unitary_action(kron(h, h)));
  EXPECT_FALSE(r.classical);
  EXPECT_GT(r.leakage, 0.1);
}

TEST(Transfer, TracePreservingAndMatchesComposition) {
  random::Engine rng(29);
  const DemonParams p = random::params(rng);
  const Superoperator phi = interaction_channel(p);
  for (int k = 0; k < 2; ++k) {
    const Superoperator t = transfer_channel(p, k);
    EXPECT_LT(trace_preservation_error(t), 1e-12);
    const Operator rho = random::density_matrix(rng, 2);
    const Operator direct =
        partial_trace(phi.apply(kron(rho, basis_operator(k == 0 ? BasisLabel::Zero : BasisLabel::One))), {2, 2}, {0});
    EXPECT_LT(max_abs(t.apply(rho) - direct), 1e-13);
  }
  EXPECT_THROW(transfer_channel(p, 2), std::invalid_argument);
}

TEST(Transfer, FixedPointIsDiagonal) {
  random::Engine rng(30);
  const DemonParams p = random::params(rng);
  for (int k = 0; k < 2; ++k) {
    const Superoperator t = transfer_channel(p, k);
    Operator rho = random::density_matrix(rng, 2);
    for (int it = 0; it < 4000; ++it) rho = t.apply(rho);
    EXPECT_LT(std::abs(rho(0, 1)), 1e-10);
    EXPECT_LT(max_abs(rho - channel_fixed_point(t)), 1e-10);
  }
}

}  // namespace
}  // namespace qdemon
