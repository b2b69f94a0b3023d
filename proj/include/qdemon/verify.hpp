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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qdemon/lindblad.hpp"
#include "qdemon/mpdo.hpp"
#include "qdemon/random.hpp"
#include "qdemon/states.hpp"
#include "qdemon/thermo.hpp"

namespace qdemon::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured worst case
  double threshold = 0.0;  // bound it was held to
};

namespace detail {

inline CheckResult bound_above(std::string name, double value, double threshold) {
  return CheckResult{std::move(name), value <= threshold, value, threshold};
}

inline CheckResult bound_below(std::string name, double value, double threshold) {
  return CheckResult{std::move(name), value >= threshold, value, threshold};
}

}  // namespace detail

/// Lightweight invariant and oracle checks around one parameter point.
inline std::vector<CheckResult> run_checks(const DemonParams& base, std::uint64_t seed = 2026) {
  std::vector<CheckResult> out;
  random::Engine rng(seed);

  {
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      const DemonParams p = random::params(rng);
      worst = std::max(worst, build_lindbladian(p).apply(fixed_point_joint(p)).cwiseAbs().maxCoeff());
    }
    out.push_back(detail::bound_above("generator annihilates the product fixed point", worst, 1e-10));
  }

  const Superoperator phi = interaction_channel(base);
  out.push_back(detail::bound_below("channel is completely positive (min Choi eigenvalue)", min_choi_eigenvalue(phi), -1e-10));
  out.push_back(detail::bound_above("channel is trace preserving", trace_preservation_error(phi), 1e-12));
  out.push_back(detail::bound_above("channel keeps populations and coherences apart", classicality_check(phi).leakage, 1e-12));

  const Operator rho_d0 = fixed_point(base).first;
  const SequentialMpo mpo = compile_mpo(phi, rho_d0);
  {
    double worst = 0.0;
    const std::vector<MpdoState> inputs{ghz({0.5, 0.0, 0.0}), ghz({-0.2, 0.8, 1.1}), random::hidden_markov(rng)};
    const int n_sites = 9;
    const int n = 6;
    const int w = 2;
    for (const auto& m : inputs) {
      const Operator start = kron(rho_d0, reconstruct(m, n_sites));
      const Operator mid = brute_force(start, phi, n_sites, n);
      const Operator after = apply_pair_channel(mid, phi, n_sites + 1, n + 1);
      const std::vector<int> dims = qubit_dims(n_sites + 1);
      const std::vector<std::size_t> keep{0, n + 1, n + 2, n + 3};
      const SteadyStateBundle b = finite_ring(m, mpo, n_sites, n, w);
      worst = std::max(worst, trace_distance(b.pre, partial_trace(mid, dims, keep)));
      worst = std::max(worst, trace_distance(b.post, partial_trace(after, dims, keep)));
    }
    out.push_back(detail::bound_above("MPDO contraction matches the dense oracle (n = 6)", worst, 1e-8));
  }

  {
    const MpdoState m = random::hidden_markov(rng);
    const auto hist = classical_histories(m, phi, rho_d0, 6, 1);
    const SteadyStateBundle b = evolve(m, mpo, 6, 1);
    double off = 0.0;
    for (const auto& h : hist) off = std::max(off, std::abs(h.rho_d(0, 1)));
    out.push_back(detail::bound_above("classical histories reassemble the joint state", trace_distance(reassemble(hist), b.pre), 1e-9));
    out.push_back(detail::bound_above("conditional demon states are diagonal", off, 1e-10));
  }

  {
    double worst = std::numeric_limits<double>::infinity();
    int both_product = 0;
    for (const double zeta : {-0.2, -0.05, 0.0, 0.05, 0.2})
      for (const double eps : {0.0, 0.01, 0.1}) {
        const DemonParams p = DemonParams::from_epsilon(eps, base.beta_h, base.tau, base.delta, base.gamma_h, base.gamma_c);
        const ClausiusReport g = evaluate(ghz({zeta, 0.0, 0.0}), p);
        const ClausiusReport u = evaluate(product(zeta), p);
        worst = std::min({worst, g.residual_global, u.residual_global});
        if (u.phase == Phase::Both) ++both_product;
      }
    out.push_back(detail::bound_below("global Clausius residual on a coarse grid", worst, -1e-8));
    out.push_back(detail::bound_above("uncorrelated tapes never refrigerate and erase at once", both_product, 0));
  }

  {
    const MpdoState m = random::hidden_markov(rng);
    EvaluateOptions opt;
    opt.check_window = false;
    const ClausiusReport a = evaluate(m, base, opt);
    const ClausiusReport b = evaluate(rotate_z(m, std::numbers::pi / 7), base, opt);
    const double diff = std::max({std::abs(a.q_hc - b.q_hc), std::abs(a.ds_m - b.ds_m), std::abs(a.ds_mmt - b.ds_mmt),
                                  std::abs(a.di_m_mt - b.di_m_mt), std::abs(a.residual_global - b.residual_global)});
    out.push_back(detail::bound_above("transversal z rotations leave the Clausius terms unchanged", diff, 1e-9));
  }

  {
    double worst = 0.0;
    const Operator ref = fixed_point_joint(base);
    for (int k = 0; k < 5; ++k) {
      const Operator rho = kron(random::density_matrix(rng, 4), random::density_matrix(rng, 2));
      const Operator sigma = kron(ref, partial_trace(rho, {2, 2, 2}, {2}));
      const Operator after = apply_pair_channel(rho, phi, 3, 1);
      worst = std::max(worst, relative_entropy(after, sigma) - relative_entropy(rho, sigma));
    }
    out.push_back(detail::bound_above("relative entropy to the fixed point never grows", worst, 1e-9));
  }
  return out;
}

}  // namespace qdemon::verify
