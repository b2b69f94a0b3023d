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
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qdemon/lindblad.hpp"
#include "qdemon/mpdo.hpp"
#include "qdemon/opalg.hpp"

namespace qdemon {

enum class Phase { Refrigerating, Erasing, Both, Neither, Dud };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::Refrigerating: return "refrigerating";
    case Phase::Erasing: return "erasing";
    case Phase::Both: return "both";
    case Phase::Neither: return "neither";
    case Phase::Dud: return "dud";
  }
  return "?";
}

inline constexpr double kPhaseDeadBand = 1e-12;

/// Steady-state thermodynamics of one parameter point. Entropies in nats,
/// heat in units of the gap.
struct ClausiusReport {
  DemonParams params;
  double zeta_in = 0;
  double zeta_out = 0;
  double q_hc = 0;       // heat flow hot → cold; negative when refrigerating
  double ds_m = 0;       // entropy change of the interacting site
  double ds_mmt = 0;     // entropy change of the site plus the upcoming window
  double di_m_mt = 0;    // change of I(M : M̃)
  double di_d_m = 0;     // change of I(D : M)
  double di_d_mmt = 0;   // change of I(D : M M̃), non-negative in steady state
  double ds_d = 0;       // demon entropy change, zero in steady state
  double mi_gap = 0;     // I'(D : M̃_1..w) − I(D : M M̃_1..w−1), zero in steady state
  double residual_local = 0;
  double residual_generalized = 0;
  double residual_global = 0;
  Phase phase = Phase::Neither;
  int window = 0;
  int converged_n = 0;
  double convergence_residual = 0;
};

/// Q_{h→c} = (Δ/2)(ζ' − ζ).
inline double heat_flow(double zeta_in, double zeta_out, double delta) {
  if (!(std::abs(zeta_in) <= 1.0 + 1e-12) || !(std::abs(zeta_out) <= 1.0 + 1e-12))
    throw std::invalid_argument("heat_flow: biases must lie in [-1, 1]");
  return 0.5 * delta * (zeta_out - zeta_in);
}

inline Phase classify_phase(double q_hc, double ds_m, double dead_band = kPhaseDeadBand) {
  const bool refrigerating = q_hc < -dead_band;
  const bool erasing = ds_m < -dead_band;
  if (refrigerating && erasing) return Phase::Both;
  if (refrigerating) return Phase::Refrigerating;
  if (erasing) return Phase::Erasing;
  if (q_hc > dead_band && ds_m > dead_band) return Phase::Dud;
  return Phase::Neither;
}

namespace detail {

inline void finish_report(ClausiusReport& r) {
  const double gradient = r.params.beta_c - r.params.beta_h;
  r.residual_local = r.q_hc * gradient + r.ds_m;
  r.residual_generalized = r.residual_local - r.di_d_m;
  r.residual_global = r.residual_local - r.di_m_mt;
  r.phase = classify_phase(r.q_hc, r.ds_m);
}

inline double mi(const Operator& rho, const std::vector<int>& dims, const std::vector<std::size_t>& a,
                 const std::vector<std::size_t>& keep) {
  const Operator reduced = partial_trace(rho, std::span<const int>(dims), std::span<const std::size_t>(keep));
  const std::vector<int> sub_dims(keep.size(), 2);
  std::vector<std::size_t> local_a;
  for (const std::size_t s : a) {
    const auto it = std::find(keep.begin(), keep.end(), s);
    local_a.push_back(static_cast<std::size_t>(it - keep.begin()));
  }
  return mutual_information(reduced, std::span<const int>(sub_dims), std::span<const std::size_t>(local_a));
}

}  // namespace detail

/// Report from the pre/post states of D ⊗ M ⊗ M̃(w).
inline ClausiusReport clausius_report(const SteadyStateBundle& b, const DemonParams& p) {
  p.validate();
  const std::vector<int> dims = b.dims();
  std::vector<std::size_t> all;
  for (std::size_t s = 0; s < dims.size(); ++s) all.push_back(s);
  const std::vector<std::size_t> mem = b.memory_subsystems();
  const std::vector<std::size_t> fut = b.future_subsystems();
  std::vector<std::size_t> d_fut{0};
  d_fut.insert(d_fut.end(), fut.begin(), fut.end());

  ClausiusReport r;
  r.params = p;
  r.window = b.window;
  r.converged_n = b.converged_n;
  r.convergence_residual = b.residual;

  const Operator rho_m = b.rho_m();
  const Operator rho_m_post = b.rho_m_post();
  r.zeta_in = bias(rho_m);
  r.zeta_out = bias(rho_m_post);
  r.q_hc = heat_flow(r.zeta_in, r.zeta_out, p.delta);
  r.ds_m = von_neumann_entropy(rho_m_post) - von_neumann_entropy(rho_m);
  r.ds_mmt = von_neumann_entropy(b.rho_mmt_post()) - von_neumann_entropy(b.rho_mmt());
  r.ds_d = von_neumann_entropy(b.rho_d_post()) - von_neumann_entropy(b.rho_d());
  r.di_m_mt = detail::mi(b.post, dims, {1}, mem) - detail::mi(b.pre, dims, {1}, mem);
  r.di_d_m = detail::mi(b.post, dims, {0}, {0, 1}) - detail::mi(b.pre, dims, {0}, {0, 1});
  const double i_d_mmt_pre = detail::mi(b.pre, dims, {0}, all);
  r.di_d_mmt = detail::mi(b.post, dims, {0}, all) - i_d_mmt_pre;
  // After the shift, D' with the w upcoming sites is D with M and the first w − 1
  // of them one cycle later; compare blocks of equal length.
  std::vector<std::size_t> d_block(all.begin(), all.end() - 1);
  r.mi_gap = detail::mi(b.post, dims, {0}, d_fut) - detail::mi(b.pre, dims, {0}, d_block);
  detail::finish_report(r);
  return r;
}

class WindowNotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvaluateOptions {
  int window = 4;
  double tol = 1e-12;
  int n_max = 10000;
  bool check_window = true;
  int max_window = 8;
  double window_tol = 1e-9;
};

/// Steady state of `input` under the channel of `p`, reported at a window
/// large enough that the windowed entropies no longer move.
inline ClausiusReport evaluate(const MpdoState& input, const DemonParams& p, const EvaluateOptions& opt = {}) {
  p.validate();
  if (opt.window < 1) throw std::invalid_argument("evaluate: window must be at least 1");
  const Superoperator phi = interaction_channel(p);
  const SequentialMpo mpo = compile_mpo(phi, fixed_point(p).first);
  const SteadyState s = steady_state_legs(input, mpo, SteadyStateOptions{opt.tol, opt.n_max});
  int w = opt.window;
  ClausiusReport r = clausius_report(s.bundle(w), p);
  if (!opt.check_window) return r;
  while (true) {
    const ClausiusReport next = clausius_report(s.bundle(w + 1), p);
    const double delta = std::max({std::abs(next.ds_mmt - r.ds_mmt), std::abs(next.di_m_mt - r.di_m_mt),
                                   std::abs(next.di_d_mmt - r.di_d_mmt)});
    if (delta < opt.window_tol) return r;
    if (2 * w > opt.max_window) {
      char msg[256];
      std::snprintf(msg, sizeof(msg),
                    "evaluate: windowed entropies still move by %.3e at window %d (tolerance %.1e); the input has "
                    "longer-range correlations than the window can hold",
                    delta, w, opt.window_tol);
      throw WindowNotConverged(msg);
    }
    w *= 2;
    r = clausius_report(s.bundle(w), p);
  }
}

// ---------------------------------------------------------------------------
// Closed-form route for the z-basis GHZ family: only the two pure-tape
// histories contribute, so everything follows from the demon's conditional
// fixed points.
// ---------------------------------------------------------------------------

/// Demon state after equilibrating on an uncorrelated tape of pure |k⟩.
inline Operator conditional_demon_state(const Superoperator& phi, int k, int max_iter = 100000) {
  const Superoperator t = transfer_channel(phi, k);
  Operator rho = 0.5 * Operator::Identity(2, 2);
  for (int it = 0; it < max_iter; ++it) {
    Operator next = t.apply(rho);
    const double change = (next - rho).cwiseAbs().maxCoeff();
    rho = std::move(next);
    if (change < 1e-16) break;
  }
  return hermitize(rho);
}

inline ClausiusReport ghz_analytic(double zeta, const DemonParams& p) {
  if (!(zeta >= -1.0 && zeta <= 1.0)) throw std::invalid_argument("ghz_analytic: zeta must lie in [-1, 1]");
  p.validate();
  const Superoperator phi = interaction_channel(p);
  const std::array<double, 2> weight{(1.0 + zeta) / 2, (1.0 - zeta) / 2};

  // Joint D ⊗ M ⊗ M̃_1 states; M̃_1 records the branch.
  Operator pre = Operator::Zero(8, 8);
  Operator post = Operator::Zero(8, 8);
  std::array<Operator, 2> m_out;
  for (int k = 0; k < 2; ++k) {
    const Operator proj = basis_operator(k == 0 ? BasisLabel::Zero : BasisLabel::One);
    const Operator dm = kron(conditional_demon_state(phi, k), proj);
    const Operator dm_post = phi.apply(dm);
    m_out[static_cast<std::size_t>(k)] = partial_trace(dm_post, {2, 2}, {1});
    pre += weight[static_cast<std::size_t>(k)] * kron(dm, proj);
    post += weight[static_cast<std::size_t>(k)] * kron(dm_post, proj);
  }

  ClausiusReport r;
  r.params = p;
  r.window = 1;
  r.zeta_in = zeta;
  const std::array<double, 2> z_out{bias(m_out[0]), bias(m_out[1])};
  r.zeta_out = weight[0] * z_out[0] + weight[1] * z_out[1];
  r.q_hc = 0.5 * p.delta * (weight[0] * z_out[0] + weight[1] * z_out[1] - zeta);
  r.ds_mmt = weight[0] * von_neumann_entropy(m_out[0]) + weight[1] * von_neumann_entropy(m_out[1]);
  const Operator rho_m = Operator(RealVector{{weight[0], weight[1]}}.cast<Complex>().asDiagonal());
  r.ds_m = von_neumann_entropy(weight[0] * m_out[0] + weight[1] * m_out[1]) - von_neumann_entropy(rho_m);
  r.di_m_mt = r.ds_m - r.ds_mmt;

  const std::vector<int> dims{2, 2, 2};
  r.di_d_m = detail::mi(post, dims, {0}, {0, 1}) - detail::mi(pre, dims, {0}, {0, 1});
  const double i_pre = detail::mi(pre, dims, {0}, {0, 1, 2});
  r.di_d_mmt = detail::mi(post, dims, {0}, {0, 1, 2}) - i_pre;
  r.mi_gap = detail::mi(post, dims, {0}, {0, 2}) - detail::mi(pre, dims, {0}, {0, 1});
  r.ds_d = von_neumann_entropy(partial_trace(post, {2, 2, 2}, {0})) -
           von_neumann_entropy(partial_trace(pre, {2, 2, 2}, {0}));
  detail::finish_report(r);
  return r;
}

struct Advantage {
  double difference = 0;  // ΔS_M^(q) − ΔS_M^(c)
  bool flag = false;
};

/// Erasure advantage of a coherent input over its z-dephased counterpart.
inline Advantage advantage(const ClausiusReport& quantum, const ClausiusReport& classical,
                           double dead_band = kPhaseDeadBand) {
  if (!(quantum.params == classical.params)) throw std::invalid_argument("advantage: reports use different parameters");
  Advantage a;
  a.difference = quantum.ds_m - classical.ds_m;
  a.flag = a.difference < -dead_band && quantum.ds_m < 0.0;
  return a;
}

}  // namespace qdemon
