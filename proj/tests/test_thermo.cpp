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

#include "qdemon/random.hpp"
#include "qdemon/states.hpp"
#include "qdemon/thermo.hpp"

namespace qdemon {
namespace {

TEST(HeatFlow, ReferenceValues) {
  EXPECT_DOUBLE_EQ(heat_flow(0.0, 0.2, 1.0), 0.1);
  EXPECT_DOUBLE_EQ(heat_flow(0.3, 0.3, 2.0), 0.0);
  EXPECT_LT(heat_flow(0.3, 0.1, 1.0), 0.0);
  EXPECT_THROW(heat_flow(1.5, 0.0, 1.0), std::invalid_argument);
}

TEST(Phase, Classification) {
  EXPECT_EQ(classify_phase(-0.1, -0.1), Phase::Both);
  EXPECT_EQ(classify_phase(-0.1, 0.1), Phase::Refrigerating);
  EXPECT_EQ(classify_phase(0.1, -0.1), Phase::Erasing);
  EXPECT_EQ(classify_phase(0.1, 0.1), Phase::Dud);
  EXPECT_EQ(classify_phase(-1e-13, -1e-13), Phase::Neither);
  EXPECT_EQ(classify_phase(0.0, 0.1), Phase::Neither);
  EXPECT_STREQ(to_string(Phase::Both), "both");
}

TEST(Clausius, ZeroGradientUnbiasedTapeIsStationary) {
  DemonParams p;
  p.beta_c = p.beta_h;
  p.gamma_h = 1.0;
  p.gamma_c = 1.0;
  const ClausiusReport r = evaluate(product(0.0), p);
  EXPECT_NEAR(r.zeta_out, 0.0, 1e-12);
  EXPECT_NEAR(r.q_hc, 0.0, 1e-12);
  EXPECT_NEAR(r.ds_m, 0.0, 1e-12);
  EXPECT_EQ(r.phase, Phase::Neither);
}

TEST(Clausius, TapeAtTheFixedPointBiasIsStationary) {
  const DemonParams p = DemonParams::from_epsilon(0.2, 0.8, 0.6);
  const ClausiusReport r = evaluate(product(epsilon(p)), p);
  EXPECT_NEAR(r.q_hc, 0.0, 1e-12);
  EXPECT_NEAR(r.ds_m, 0.0, 1e-12);
}

TEST(Clausius, ProductTapeCarriesNoCorrelationTerm) {
  random::Engine rng(71);
  for (int k = 0; k < 5; ++k) {
    const DemonParams p = random::params(rng);
    const ClausiusReport r = evaluate(product(0.3), p);
    EXPECT_NEAR(r.di_m_mt, 0.0, 1e-10);
    EXPECT_NEAR(r.residual_global, r.residual_local, 1e-10);
    EXPECT_GE(r.residual_local, -1e-10);
  }
}

TEST(Clausius, SteadyStateBookkeeping) {
  random::Engine rng(72);
  for (int k = 0; k < 5; ++k) {
    const DemonParams p = random::params(rng);
    // These identities hold at every window, so the random inputs skip the window check.
    EvaluateOptions fixed;
    fixed.check_window = false;
    const std::vector<std::pair<MpdoState, EvaluateOptions>> inputs{
        {ghz({0.2, 0.0, 0.0}), EvaluateOptions{}},
        {random::hidden_markov(rng), fixed},
        {random::hidden_markov(rng, 3), fixed},
        {ghz({-0.4, 1.1, 0.5}), fixed}};
    for (const auto& [m, opt] : inputs) {
      const ClausiusReport r = evaluate(m, p, opt);
      EXPECT_NEAR(r.ds_d, 0.0, 1e-10);
      EXPECT_NEAR(r.mi_gap, 0.0, 1e-9);
      EXPECT_GE(r.di_d_mmt, -1e-9);
      EXPECT_GE(r.residual_global, -1e-8);
      EXPECT_GE(r.residual_generalized, -1e-8);
      EXPECT_NEAR(r.residual_local - r.residual_global, r.di_m_mt, 1e-15);
    }
  }
}

TEST(Clausius, DeltaIOfMemoryBoundedByLn2) {
  random::Engine rng(73);
  for (int k = 0; k < 5; ++k) {
    const DemonParams p = random::params(rng);
    const ClausiusReport r = evaluate(ghz({0.0, 0.0, 0.0}), p);
    EXPECT_GE(r.di_m_mt, -std::numbers::ln2 - 1e-9);
    EXPECT_LE(r.di_m_mt, 1e-9);
  }
}

TEST(Clausius, GhzMatchesClosedForm) {
  random::Engine rng(74);
  for (int k = 0; k < 4; ++k) {
    const DemonParams p = random::params(rng);
    for (const double zeta : {-0.5, 0.0, 0.3}) {
      const ClausiusReport a = ghz_analytic(zeta, p);
      const ClausiusReport b = evaluate(ghz({zeta, 0.0, 0.0}), p);
      EXPECT_NEAR(a.q_hc, b.q_hc, 1e-9);
      EXPECT_NEAR(a.ds_m, b.ds_m, 1e-9);
      EXPECT_NEAR(a.ds_mmt, b.ds_mmt, 1e-9);
      EXPECT_NEAR(a.di_m_mt, b.di_m_mt, 1e-9);
      EXPECT_NEAR(a.di_d_m, b.di_d_m, 1e-9);
      EXPECT_NEAR(a.di_d_mmt, b.di_d_mmt, 1e-9);
      EXPECT_NEAR(a.residual_global, b.residual_global, 1e-9);
      EXPECT_NEAR(a.mi_gap, 0.0, 1e-9);
    }
  }
}

TEST(Clausius, ConditionalDemonStatesAreDiagonalFixedPoints) {
  random::Engine rng(75);
  const DemonParams p = random::params(rng);
  const Superoperator phi = interaction_channel(p);
  for (int k = 0; k < 2; ++k) {
    const Operator rho = conditional_demon_state(phi, k);
    EXPECT_LT(std::abs(rho(0, 1)), 1e-12);
    EXPECT_LT((transfer_channel(phi, k).apply(rho) - rho).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Clausius, WindowCheckIsConsistent) {
  const DemonParams p = DemonParams::from_epsilon(0.05, std::log(3.0), 0.3);
  EvaluateOptions small;
  small.window = 1;
  small.max_window = 1;
  // A product tape never needs more than one upcoming site.
  EXPECT_EQ(evaluate(product(0.1), p, small).window, 1);
  // Nor does the z-basis GHZ: the next site already carries the branch record.
  EXPECT_EQ(evaluate(ghz({0.2, 0.0, 0.0}), p, small).window, 1);
  EvaluateOptions bad;
  bad.window = 0;
  EXPECT_THROW(evaluate(product(0.0), p, bad), std::invalid_argument);
}

TEST(Clausius, RotationInvariance) {
  random::Engine rng(77);
  const DemonParams p = random::params(rng);
  const MpdoState m = random::purified(rng);
  // The invariance holds window by window, so long-range inputs are compared at a fixed window.
  EvaluateOptions opt;
  opt.check_window = false;
  const ClausiusReport a = evaluate(m, p, opt);
  const ClausiusReport b = evaluate(rotate_z(m, 1.0), p, opt);
  EXPECT_NEAR(a.q_hc, b.q_hc, 1e-10);
  EXPECT_NEAR(a.ds_m, b.ds_m, 1e-10);
  EXPECT_NEAR(a.ds_mmt, b.ds_mmt, 1e-10);
  EXPECT_NEAR(a.di_m_mt, b.di_m_mt, 1e-10);
  EXPECT_NEAR(a.residual_global, b.residual_global, 1e-10);
}

TEST(Advantage, ZBasisGhzHasNoAdvantage) {
  const DemonParams p = DemonParams::from_epsilon(0.01, std::log(3.0), 0.3);
  EvaluateOptions opt;
  opt.check_window = false;
  const MpdoState q = ghz({-0.02, 0.0, 0.0});
  const Advantage a = advantage(evaluate(q, p, opt), evaluate(dephase_z(q), p, opt));
  EXPECT_NEAR(a.difference, 0.0, 1e-12);
  EXPECT_FALSE(a.flag);
}

TEST(Advantage, RejectsMismatchedParameters) {
  const ClausiusReport a = ghz_analytic(0.0, DemonParams::from_epsilon(0.01));
  const ClausiusReport b = ghz_analytic(0.0, DemonParams::from_epsilon(0.02));
  EXPECT_THROW(advantage(a, b), std::invalid_argument);
}

}  // namespace
}  // namespace qdemon
