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
#include "qdemon/mpdo.hpp"
#include "qdemon/random.hpp"
#include "qdemon/states.hpp"

namespace qdemon {
namespace {

double max_abs(const Eigen::MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

// Reduced state of D ⊗ tape after `n` interactions on an N-site ring, for the
// subsystems the pipeline reports: D, the interacting site and `w` upcoming sites.
struct OracleStates {
  Operator pre;
  Operator post;
};

OracleStates dense_oracle(const MpdoState& m, const Superoperator& phi, const Operator& rho_d0, int n_sites, int n,
                          int w) {
  const Operator start = kron(rho_d0, reconstruct(m, n_sites));
  const Operator mid = brute_force(start, phi, n_sites, n);
  const Operator after = apply_pair_channel(mid, phi, n_sites + 1, n + 1);
  const std::vector<int> dims = qubit_dims(static_cast<std::size_t>(n_sites) + 1);
  std::vector<std::size_t> keep{0};
  for (int s = 0; s <= w; ++s) keep.push_back(static_cast<std::size_t>(n + 1 + s));
  return {partial_trace(mid, dims, keep), partial_trace(after, dims, keep)};
}

TEST(Mpdo, ReconstructProductState) {
  const Operator rho = reconstruct(product(0.4), 3);
  Operator site = Operator::Zero(2, 2);
  site(0, 0) = 0.7;
  site(1, 1) = 0.3;
  EXPECT_LT(max_abs(rho - kron(kron(site, site), site)), 1e-15);
}

TEST(Mpdo, ReconstructedStatesAreValid) {
  random::Engine rng(41);
  const std::vector<MpdoState> inputs{ghz({0.3, 1.0, 0.4}), random::hidden_markov(rng), random::purified(rng)};
  for (const auto& m : inputs) {
    const Operator rho = reconstruct(m, 4);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    EXPECT_LT(hermiticity_error(rho), 1e-12);
    EXPECT_GE(hermitian_eigenvalues(rho).minCoeff(), -1e-10);
  }
}

TEST(Mpdo, ReconstructedStatesAreTranslationInvariant) {
  random::Engine rng(42);
  const MpdoState m = random::purified(rng);
  const Operator rho = reconstruct(m, 4);
  const Operator first_pair = partial_trace(rho, {2, 2, 2, 2}, {0, 1});
  EXPECT_LT(max_abs(partial_trace(rho, {2, 2, 2, 2}, {1, 2}) - first_pair), 1e-12);
  EXPECT_LT(max_abs(partial_trace(rho, {2, 2, 2, 2}, {2, 3}) - first_pair), 1e-12);
  // Sites 3 and 0 are neighbours across the ring closure; swap them into ring order.
  Operator swap = Operator::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) swap(2 * a + b, 2 * b + a) = 1.0;
  EXPECT_LT(max_abs(swap * partial_trace(rho, {2, 2, 2, 2}, {0, 3}) * swap - first_pair), 1e-12);
}

TEST(Mpdo, ValidateRejectsMalformedTensors) {
  MpdoState m = product(0.0);
  m.site[2] = Operator::Zero(2, 2);
  EXPECT_THROW(m.validate(), std::invalid_argument);
  MpdoState w = ghz({0.2, 0.0, 0.0});
  w.boundary(0, 1) = 0.5;
  w.site[0](1, 0) = 0.3;
  EXPECT_THROW(w.validate(), std::invalid_argument);
}

TEST(Mpo, ClassicalLabelsStayClassical) {
  random::Engine rng(43);
  const DemonParams p = random::params(rng);
  const SequentialMpo mpo = compile_mpo(interaction_channel(p), fixed_point(p).first);
  EXPECT_LT(mpo.boundary.tail(2).cwiseAbs().maxCoeff(), 1e-15);
  // Demon coherences neither appear from nor decay into populations once the site is traced.
  for (int k = 0; k < 2; ++k) {
    const LabelMatrix d = traced_interaction(mpo, k);
    EXPECT_LT(d.block(2, 0, 2, 2).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(d.block(0, 2, 2, 2).cwiseAbs().maxCoeff(), 1e-12);
  }
  // Classical demon and classical site labels in give classical labels out.
  for (const BasisLabel out : {BasisLabel::Zero, BasisLabel::One})
    for (const BasisLabel in : {BasisLabel::Zero, BasisLabel::One})
      EXPECT_LT(mpo.tensor(out, in).block(2, 0, 2, 2).cwiseAbs().maxCoeff(), 1e-12) << to_string(out) << to_string(in);
}

TEST(Mpdo, TapeMarginalIsTheInfiniteChainState) {
  const MpdoState m = ghz({0.0, 0.0, 0.0});
  EXPECT_LT(max_abs(tape_marginal(m) - 0.5 * Operator::Identity(2, 2)), 1e-14);
  // A one-site ring keeps the branch coherence and is pure instead.
  EXPECT_NEAR(von_neumann_entropy(reconstruct(m, 1)), 0.0, 1e-12);
  random::Engine rng(50);
  const MpdoState hmm = random::hidden_markov(rng);
  // A long ring approaches the infinite chain geometrically in the transfer-matrix gap.
  const Operator ring = reconstruct(hmm, 12);
  EXPECT_LT(max_abs(tape_marginal(hmm, 2) - partial_trace(ring, qubit_dims(12), std::vector<std::size_t>{0, 1})), 1e-6);
}

TEST(Mpo, TracedInteractionIsTheTransferChannel) {
  random::Engine rng(44);
  const DemonParams p = random::params(rng);
  const Superoperator phi = interaction_channel(p);
  const SequentialMpo mpo = compile_mpo(phi, fixed_point(p).first);
  for (int k = 0; k < 2; ++k) {
    const Superoperator t = transfer_channel(phi, k);
    const Superoperator from_mpo = label_to_superoperator(traced_interaction(mpo, k));
    const Operator rho = random::density_matrix(rng, 2);
    EXPECT_LT(max_abs(from_mpo.apply(rho) - t.apply(rho)), 1e-12);
  }
}

TEST(SteadyState, FiniteRingMatchesDenseOracle) {
  random::Engine rng(45);
  const DemonParams p = random::params(rng);
  const Superoperator phi = interaction_channel(p);
  const Operator rho_d0 = fixed_point(p).first;
  const SequentialMpo mpo = compile_mpo(phi, rho_d0);
  const std::vector<MpdoState> inputs{ghz({0.5, 0.0, 0.0}), ghz({-0.3, 0.9, 2.0}), random::hidden_markov(rng),
                                      random::purified(rng)};
  for (const auto& m : inputs) {
    const int n_sites = 8;
    const int n = 4;
    const int w = 2;
    const OracleStates oracle = dense_oracle(m, phi, rho_d0, n_sites, n, w);
    const SteadyStateBundle b = finite_ring(m, mpo, n_sites, n, w);
    EXPECT_LT(trace_distance(b.pre, oracle.pre), 1e-10);
    EXPECT_LT(trace_distance(b.post, oracle.post), 1e-10);
  }
}

TEST(SteadyState, ZeroInteractionsReadsTheTapeDirectly) {
  random::Engine rng(46);
  const DemonParams p = random::params(rng);
  const Operator rho_d0 = fixed_point(p).first;
  const SequentialMpo mpo = compile_mpo(interaction_channel(p), rho_d0);
  const MpdoState m = random::purified(rng);
  const SteadyStateBundle b = finite_ring(m, mpo, 6, 0, 2);
  const Operator tape = reconstruct(m, 6);
  EXPECT_LT(trace_distance(b.pre, kron(rho_d0, partial_trace(tape, {2, 2, 2, 2, 2, 2}, {0, 1, 2}))), 1e-11);
}

TEST(SteadyState, ConvergesAndIsAFixedPointOfOneMoreStep) {
  random::Engine rng(47);
  const DemonParams p = random::params(rng);
  const SequentialMpo mpo = compile_mpo(interaction_channel(p), fixed_point(p).first);
  const MpdoState m = ghz({0.2, 0.0, 0.0});
  const SteadyState s = steady_state_legs(m, mpo);
  EXPECT_LT(s.residual, 1e-12);
  const SteadyStateBundle b = s.bundle(2);
  const SteadyStateBundle later = evolve(m, mpo, s.converged_n + 50, 2);
  EXPECT_LT(trace_distance(b.pre, later.pre), 1e-10);
  EXPECT_LT(trace_distance(b.post, later.post), 1e-10);
}

TEST(SteadyState, ProductTapeLeavesFutureSitesUntouched) {
  const DemonParams p = DemonParams::from_epsilon(0.1, 1.0, 0.5);
  const SequentialMpo mpo = compile_mpo(interaction_channel(p), fixed_point(p).first);
  const SteadyStateBundle b = steady_state(product(0.25), mpo, 2);
  Operator site = Operator::Zero(2, 2);
  site(0, 0) = 0.625;
  site(1, 1) = 0.375;
  EXPECT_LT(max_abs(b.reduce(b.pre, {2, 3}) - kron(site, site)), 1e-12);
  EXPECT_LT(max_abs(b.reduce(b.post, {2, 3}) - kron(site, site)), 1e-12);
  EXPECT_LT(max_abs(b.rho_dm() - kron(b.rho_d(), site)), 1e-12);
}

TEST(SteadyState, BundleRejectsBadWindows) {
  const DemonParams p = DemonParams::from_epsilon(0.1);
  const SequentialMpo mpo = compile_mpo(interaction_channel(p), fixed_point(p).first);
  const SteadyState s = steady_state_legs(product(0.0), mpo);
  EXPECT_THROW(s.bundle(0), std::invalid_argument);
  EXPECT_THROW(s.bundle(11), std::invalid_argument);
}

TEST(Histories, ReassembleToTheJointState) {
  random::Engine rng(48);
  const DemonParams p = random::params(rng);
  const Superoperator phi = interaction_channel(p);
  const Operator rho_d0 = fixed_point(p).first;
  const SequentialMpo mpo = compile_mpo(phi, rho_d0);
  for (const auto& m : {random::hidden_markov(rng), ghz({0.4, 0.0, 0.0}), ghz({0.1, 0.7, 0.3})}) {
    const auto histories = classical_histories(m, phi, rho_d0, 5, 2);
    double total = 0.0;
    for (const auto& h : histories) {
      total += h.probability;
      EXPECT_LT(std::abs(h.rho_d(0, 1)), 1e-12);
      EXPECT_NEAR(h.rho_d.trace().real(), 1.0, 1e-12);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_LT(trace_distance(reassemble(histories), evolve(m, mpo, 5, 2).pre), 1e-10);
  }
}

TEST(Oracle, PairChannelOnAdjacentSites) {
  random::Engine rng(49);
  const DemonParams p = random::params(rng);
  const Superoperator phi = interaction_channel(p);
  const Operator dm = random::density_matrix(rng, 4);
  const Operator rest = random::density_matrix(rng, 2);
  const Operator out = apply_pair_channel(kron(dm, rest), phi, 3, 1);
  EXPECT_LT(max_abs(out - kron(phi.apply(dm), rest)), 1e-12);
  const Operator a = random::density_matrix(rng, 2);
  const Operator b = random::density_matrix(rng, 2);
  const Operator d = random::density_matrix(rng, 2);
  const Operator skip = apply_pair_channel(kron(kron(d, a), b), phi, 3, 2);
  const Operator expected = partial_trace(phi.apply(kron(d, b)), {2, 2}, {1});
  EXPECT_LT(max_abs(partial_trace(skip, {2, 2, 2}, {2}) - expected), 1e-12);
  EXPECT_LT(max_abs(partial_trace(skip, {2, 2, 2}, {1}) - a), 1e-12);
}

}  // namespace
}  // namespace qdemon
