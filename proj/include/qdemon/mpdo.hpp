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
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdemon/lindblad.hpp"
#include "qdemon/opalg.hpp"

namespace qdemon {

// ---------------------------------------------------------------------------
// Matrix-product density operator of the memory tape.
//
// For a ring of N sites the state is
//
//   ρ_N ∝ Σ_{i_1..i_N} tr(W A^{i_N} ⋯ A^{i_1}) σ^{i_1} ⊗ ⋯ ⊗ σ^{i_N},
//
// where site 1 is the first to meet the demon and the leftmost kron factor.
// W is a boundary weight that commutes with every A^i, so the ring stays
// translation invariant; W = 1 recovers the plain periodic trace.
// ---------------------------------------------------------------------------

struct MpdoState {
  std::array<Operator, 4> site;  // indexed by index_of(BasisLabel)
  Operator boundary;

  [[nodiscard]] Eigen::Index bond_dim() const { return site[0].rows(); }
  [[nodiscard]] const Operator& tensor(BasisLabel l) const { return site[index_of(l)]; }

  void validate() const {
    const Eigen::Index chi = bond_dim();
    if (chi <= 0) throw std::invalid_argument("MpdoState: empty site tensor");
    for (const auto& a : site)
      if (a.rows() != chi || a.cols() != chi) throw std::invalid_argument("MpdoState: site tensors must be chi x chi");
    if (boundary.rows() != chi || boundary.cols() != chi)
      throw std::invalid_argument("MpdoState: boundary must be chi x chi");
    for (const auto& a : site)
      if ((boundary * a - a * boundary).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("MpdoState: boundary weight must commute with the site tensors");
  }
};

/// E = A⁰ + A¹, the transfer matrix obtained by tracing one site.
inline Operator transfer_matrix(const MpdoState& m) {
  return m.tensor(BasisLabel::Zero) + m.tensor(BasisLabel::One);
}

namespace detail {

/// Dense row/column offset contributed by label `l` on a qubit with bit weight `weight`.
inline std::pair<Eigen::Index, Eigen::Index> label_offset(BasisLabel l, Eigen::Index weight) {
  const auto [r, c] = matrix_unit(l);
  return {r * weight, c * weight};
}

/// Visits every label tuple of `sites` sites, carrying the running left product
/// X·A^{i_L}⋯A^{i_1} (site 1 rightmost, most significant in the dense index).
/// `visit(left, row, col)` receives the finished product and dense offsets.
template <typename Visit>
void for_each_window(const Operator& left, const MpdoState& m, int sites, Eigen::Index weight, Visit&& visit) {
  // The recursion peels sites from the far (left) end, which is the least
  // significant qubit; `weight` is the bit weight of the far site.
  std::function<void(const Operator&, int, Eigen::Index, Eigen::Index, Eigen::Index)> rec_far =
      [&](const Operator& acc, int remaining, Eigen::Index w, Eigen::Index row, Eigen::Index col) {
        if (remaining == 0) {
          visit(acc, row, col);
          return;
        }
        for (const BasisLabel l : kBasisLabels) {
          const auto [dr, dc] = label_offset(l, w);
          rec_far(acc * m.tensor(l), remaining - 1, w * 2, row + dr, col + dc);
        }
      };
  rec_far(left, sites, weight, 0, 0);
}

inline void normalize_trace(Operator& rho, const char* where) {
  const Complex tr = rho.trace();
  if (!(std::abs(tr) > 1e-300) || !std::isfinite(tr.real()))
    throw std::domain_error(std::string(where) + ": state has vanishing trace");
  rho /= tr;
}

}  // namespace detail

/// Dense density operator of an N-site ring (N ≤ 12).
inline Operator reconstruct(const MpdoState& m, int n_sites) {
  m.validate();
  if (n_sites < 1 || n_sites > 12) throw std::invalid_argument("reconstruct: number of sites must lie in [1, 12]");
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  Operator rho = Operator::Zero(dim, dim);
  detail::for_each_window(m.boundary, m, n_sites, 1, [&](const Operator& prod, Eigen::Index r, Eigen::Index c) {
    rho(r, c) += prod.trace();
  });
  detail::normalize_trace(rho, "reconstruct");
  return rho;
}

// ---------------------------------------------------------------------------
// Sequential MPO of the interaction (matrix-unit label basis throughout).
//
//   (C^{i'i})_{αβ} = tr[(σ^α ⊗ σ^{i'})† φ(σ^β ⊗ σ^i)]
//   B_α            = tr[(σ^α)† ρ_D(0)]
//   D^k            = Σ_l tr(σ^l) C^{lk}
// ---------------------------------------------------------------------------

using LabelMatrix = Eigen::Matrix4cd;

struct SequentialMpo {
  std::array<std::array<LabelMatrix, 4>, 4> c;  // c[out][in]
  Eigen::Vector4cd boundary;

  [[nodiscard]] const LabelMatrix& tensor(BasisLabel out, BasisLabel in) const {
    return c[index_of(out)][index_of(in)];
  }
};

/// Position of σ^{α} ⊗ σ^{i} in the row-major vectorization of a 4×4 operator.
inline Eigen::Index joint_vec_index(BasisLabel demon, BasisLabel memory) {
  const auto [rd, cd] = matrix_unit(demon);
  const auto [rm, cm] = matrix_unit(memory);
  return (2 * rd + rm) * 4 + (2 * cd + cm);
}

/// Position of σ^{α} in the row-major vectorization of a 2×2 operator.
inline Eigen::Index qubit_vec_index(BasisLabel l) {
  const auto [r, c] = matrix_unit(l);
  return 2 * r + c;
}

inline SequentialMpo compile_mpo(const Superoperator& phi, const Operator& rho_d0) {
  if (phi.operator_dim() != 4) throw std::invalid_argument("compile_mpo: expected a channel on D ⊗ M");
  if (rho_d0.rows() != 2 || rho_d0.cols() != 2) throw std::invalid_argument("compile_mpo: expected a qubit demon state");
  SequentialMpo mpo;
  for (const BasisLabel out : kBasisLabels)
    for (const BasisLabel in : kBasisLabels) {
      LabelMatrix& block = mpo.c[index_of(out)][index_of(in)];
      for (const BasisLabel a : kBasisLabels)
        for (const BasisLabel b : kBasisLabels)
          block(static_cast<Eigen::Index>(index_of(a)), static_cast<Eigen::Index>(index_of(b))) =
              phi.matrix()(joint_vec_index(a, out), joint_vec_index(b, in));
    }
  for (const BasisLabel a : kBasisLabels) {
    const auto [r, c] = matrix_unit(a);
    mpo.boundary(static_cast<Eigen::Index>(index_of(a))) = rho_d0(r, c);
  }
  return mpo;
}

inline LabelMatrix traced_interaction(const SequentialMpo& mpo, BasisLabel k) {
  LabelMatrix d = LabelMatrix::Zero();
  for (const BasisLabel l : kBasisLabels)
    if (is_classical(l)) d += basis_trace(l) * mpo.tensor(l, k);
  return d;
}

inline LabelMatrix traced_interaction(const SequentialMpo& mpo, int k) {
  if (k != 0 && k != 1) throw std::invalid_argument("traced_interaction: k must be 0 or 1");
  return traced_interaction(mpo, k == 0 ? BasisLabel::Zero : BasisLabel::One);
}

/// Superoperator on the demon in row-major vec form, converted from the label basis.
inline Superoperator label_to_superoperator(const LabelMatrix& m) {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(4, 4);
  for (const BasisLabel a : kBasisLabels)
    for (const BasisLabel b : kBasisLabels)
      s(qubit_vec_index(a), qubit_vec_index(b)) =
          m(static_cast<Eigen::Index>(index_of(a)), static_cast<Eigen::Index>(index_of(b)));
  return Superoperator(std::move(s));
}

// ---------------------------------------------------------------------------
// Steady-state contraction.
//
// The demon carries a leg G[α] (χ×χ) per demon label. Interacting with one
// site and tracing it out maps
//
//   G[α] ← Σ_k Σ_β (D^k)_{αβ} A^k G[β],
//
// starting from G[α] = B_α·1. A window of L upcoming sites is read out against
// a left environment Λ as coefficient(α, i_1..i_L) = tr(Λ A^{i_L} ⋯ A^{i_1} G[α]).
// For the infinite chain Λ = lim W E^m / tr(W E^m).
// ---------------------------------------------------------------------------

using DemonLegs = std::array<Operator, 4>;

inline Operator left_environment(const MpdoState& m, double tol = 1e-15, int max_squarings = 200) {
  m.validate();
  Operator power = transfer_matrix(m);
  auto normalized = [&](const Operator& x) {
    Operator lam = m.boundary * x;
    const Complex z = lam.trace();
    if (!(std::abs(z) > 1e-300)) throw std::domain_error("left_environment: vanishing partition function");
    return Operator(lam / z);
  };
  // W E^{2^s} for growing s; each squaring is renormalized to stay finite.
  Operator lam = normalized(power);
  for (int s = 0; s < max_squarings; ++s) {
    power = power * power;
    const double scale = power.cwiseAbs().maxCoeff();
    if (!(scale > 0) || !std::isfinite(scale)) throw std::domain_error("left_environment: transfer matrix is nilpotent");
    power /= scale;
    Operator next = normalized(power);
    const double change = (next - lam).cwiseAbs().maxCoeff();
    lam = std::move(next);
    if (change < tol) return lam;
  }
  throw std::runtime_error("left_environment: transfer matrix power did not converge");
}

/// W E^{count}, the environment of a finite ring after `count` traced sites.
inline Operator ring_environment(const MpdoState& m, int count) {
  if (count < 0) throw std::invalid_argument("ring_environment: negative site count");
  Operator lam = m.boundary;
  const Operator e = transfer_matrix(m);
  for (int k = 0; k < count; ++k) {
    lam = lam * e;
    const double scale = lam.cwiseAbs().maxCoeff();
    if (scale > 0) lam /= scale;
  }
  return lam;
}

inline DemonLegs initial_legs(const SequentialMpo& mpo, Eigen::Index chi) {
  DemonLegs g;
  for (const BasisLabel a : kBasisLabels)
    g[index_of(a)] = mpo.boundary(static_cast<Eigen::Index>(index_of(a))) * Operator::Identity(chi, chi);
  return g;
}

/// One interaction with the next tape site followed by tracing it out.
inline DemonLegs advance_legs(const DemonLegs& g, const MpdoState& m, const SequentialMpo& mpo) {
  const Eigen::Index chi = m.bond_dim();
  DemonLegs next;
  for (auto& x : next) x = Operator::Zero(chi, chi);
  for (const BasisLabel k : kBasisLabels) {
    const LabelMatrix d = traced_interaction(mpo, k);
    if (d.cwiseAbs().maxCoeff() == 0.0) continue;
    const Operator& a = m.tensor(k);
    for (std::size_t beta = 0; beta < 4; ++beta) {
      const Operator ag = a * g[beta];
      for (std::size_t alpha = 0; alpha < 4; ++alpha) {
        const Complex coeff = d(static_cast<Eigen::Index>(alpha), static_cast<Eigen::Index>(beta));
        if (coeff != Complex(0.0, 0.0)) next[alpha] += coeff * ag;
      }
    }
  }
  double scale = 0.0;
  for (const auto& x : next) scale = std::max(scale, x.norm());
  if (!(scale > 0) || !std::isfinite(scale)) throw std::domain_error("advance_legs: contraction vanished");
  for (auto& x : next) x /= scale;
  return next;
}

/// Legs after the interaction with site M, keeping M's output label: G'[α][i'].
inline std::array<DemonLegs, 4> interact_legs(const DemonLegs& g, const MpdoState& m, const SequentialMpo& mpo) {
  const Eigen::Index chi = m.bond_dim();
  std::array<DemonLegs, 4> out;
  for (auto& legs : out)
    for (auto& x : legs) x = Operator::Zero(chi, chi);
  for (const BasisLabel in : kBasisLabels) {
    const Operator& a = m.tensor(in);
    std::array<Operator, 4> ag;
    for (std::size_t beta = 0; beta < 4; ++beta) ag[beta] = a * g[beta];
    for (const BasisLabel o : kBasisLabels) {
      const LabelMatrix& c = mpo.tensor(o, in);
      for (std::size_t alpha = 0; alpha < 4; ++alpha)
        for (std::size_t beta = 0; beta < 4; ++beta) {
          const Complex coeff = c(static_cast<Eigen::Index>(alpha), static_cast<Eigen::Index>(beta));
          if (coeff != Complex(0.0, 0.0)) out[index_of(o)][alpha] += coeff * ag[beta];
        }
    }
  }
  return out;
}

namespace detail {

/// Dense operator over (head qubits) ⊗ (window of `sites` tape sites). `heads`
/// holds one χ×χ matrix per head label tuple (flattened in label order, first
/// head label most significant); `head_qubits` is 0, 1 or 2.
inline Operator read_window(const Operator& lam, const MpdoState& m, const std::vector<const Operator*>& heads,
                            int head_qubits, int sites) {
  const Eigen::Index window_dim = Eigen::Index{1} << sites;
  const Eigen::Index dim = (Eigen::Index{1} << head_qubits) * window_dim;
  Operator rho = Operator::Zero(dim, dim);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> head_offsets;
  for (std::size_t h = 0; h < heads.size(); ++h) {
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    std::size_t code = h;
    for (int q = head_qubits - 1; q >= 0; --q) {
      const auto [lr, lc] = matrix_unit(kBasisLabels[code % 4]);
      code /= 4;
      const Eigen::Index weight = window_dim << (head_qubits - 1 - q);
      r += lr * weight;
      c += lc * weight;
    }
    head_offsets.emplace_back(r, c);
  }
  for_each_window(lam, m, sites, 1, [&](const Operator& left, Eigen::Index r, Eigen::Index c) {
    // tr(left · H) = Σ_ab left(a,b) H(b,a).
    const Operator lt = left.transpose();
    for (std::size_t h = 0; h < heads.size(); ++h) {
      const Complex v = lt.cwiseProduct(*heads[h]).sum();
      rho(head_offsets[h].first + r, head_offsets[h].second + c) += v;
    }
  });
  normalize_trace(rho, "read_window");
  return hermitize(rho);
}

}  // namespace detail

/// ρ over D ⊗ (window of `sites` sites) before the next interaction.
inline Operator read_pre(const Operator& lam, const MpdoState& m, const DemonLegs& g, int sites) {
  std::vector<const Operator*> heads;
  for (const auto& x : g) heads.push_back(&x);
  return detail::read_window(lam, m, heads, 1, sites);
}

/// ρ' over D ⊗ M ⊗ (window of `sites` further sites) after the interaction with M.
inline Operator read_post(const Operator& lam, const MpdoState& m, const std::array<DemonLegs, 4>& gp, int sites) {
  std::vector<const Operator*> heads(16);
  for (std::size_t alpha = 0; alpha < 4; ++alpha)
    for (std::size_t out = 0; out < 4; ++out) heads[alpha * 4 + out] = &gp[out][alpha];
  return detail::read_window(lam, m, heads, 2, sites);
}

/// State of `sites` consecutive sites of the infinite tape. Unlike
/// reconstruct(m, sites), which closes a ring of that length, this keeps only
/// the bond sectors that survive the thermodynamic limit.
inline Operator tape_marginal(const MpdoState& m, int sites = 1) {
  if (sites < 1 || sites > 12) throw std::invalid_argument("tape_marginal: expected 1 to 12 sites");
  const Operator ident = Operator::Identity(m.bond_dim(), m.bond_dim());
  return detail::read_window(left_environment(m), m, {&ident}, 0, sites);
}

/// Pre- and post-interaction states of D ⊗ M ⊗ M̃(w) at one point of the evolution.
struct SteadyStateBundle {
  Operator pre;   // dimension 2^{w+2}, ordering D, M, M̃_1..M̃_w
  Operator post;
  int window = 0;
  int converged_n = 0;
  double residual = 0.0;

  [[nodiscard]] std::vector<int> dims() const { return qubit_dims(static_cast<std::size_t>(window) + 2); }

  [[nodiscard]] Operator reduce(const Operator& rho, std::vector<std::size_t> keep) const {
    const auto d = dims();
    return partial_trace(rho, std::span<const int>(d), std::span<const std::size_t>(keep));
  }
  [[nodiscard]] std::vector<std::size_t> memory_subsystems() const {
    std::vector<std::size_t> k;
    for (std::size_t s = 1; s < static_cast<std::size_t>(window) + 2; ++s) k.push_back(s);
    return k;
  }
  [[nodiscard]] std::vector<std::size_t> future_subsystems() const {
    std::vector<std::size_t> k;
    for (std::size_t s = 2; s < static_cast<std::size_t>(window) + 2; ++s) k.push_back(s);
    return k;
  }

  [[nodiscard]] Operator rho_d() const { return reduce(pre, {0}); }
  [[nodiscard]] Operator rho_d_post() const { return reduce(post, {0}); }
  [[nodiscard]] Operator rho_m() const { return reduce(pre, {1}); }
  [[nodiscard]] Operator rho_m_post() const { return reduce(post, {1}); }
  [[nodiscard]] Operator rho_dm() const { return reduce(pre, {0, 1}); }
  [[nodiscard]] Operator rho_dm_post() const { return reduce(post, {0, 1}); }
  [[nodiscard]] Operator rho_mmt() const { return reduce(pre, memory_subsystems()); }
  [[nodiscard]] Operator rho_mmt_post() const { return reduce(post, memory_subsystems()); }
};

class SteadyStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Converged demon legs plus everything needed to read windows of any size.
struct SteadyState {
  MpdoState input;
  SequentialMpo mpo;
  Operator environment;
  DemonLegs legs;
  int converged_n = 0;
  double residual = 0.0;

  [[nodiscard]] SteadyStateBundle bundle(int window) const {
    if (window < 1) throw std::invalid_argument("steady_state: window must be at least 1");
    if (window > 10) throw std::invalid_argument("steady_state: window larger than 10 sites is not supported");
    SteadyStateBundle b;
    b.window = window;
    b.converged_n = converged_n;
    b.residual = residual;
    b.pre = read_pre(environment, input, legs, window + 1);
    b.post = read_post(environment, input, interact_legs(legs, input, mpo), window);
    return b;
  }
};

struct SteadyStateOptions {
  double tol = 1e-12;
  int n_max = 10000;
};

/// Demon legs after exactly `n` interactions, read against environment `lam`.
inline SteadyState evolve_legs(const MpdoState& m, const SequentialMpo& mpo, int n, const Operator& lam) {
  m.validate();
  if (n < 0) throw std::invalid_argument("evolve: negative number of interactions");
  SteadyState s{m, mpo, lam, initial_legs(mpo, m.bond_dim()), n, 0.0};
  for (int k = 0; k < n; ++k) s.legs = advance_legs(s.legs, m, mpo);
  return s;
}

inline SteadyStateBundle evolve(const MpdoState& m, const SequentialMpo& mpo, int n, int window) {
  return evolve_legs(m, mpo, n, left_environment(m)).bundle(window);
}

/// Finite ring of `n_sites` sites after `n` interactions; the oracle-comparable pipeline.
inline SteadyStateBundle finite_ring(const MpdoState& m, const SequentialMpo& mpo, int n_sites, int n, int window) {
  const int remaining = n_sites - n - window - 1;
  if (remaining < 0) throw std::invalid_argument("finite_ring: ring too short for the requested window");
  return evolve_legs(m, mpo, n, ring_environment(m, remaining)).bundle(window);
}

/// Iterates the transfer contraction on the infinite chain until the 4×4
/// pre-interaction ρ_DM moves by less than `tol` in trace distance.
inline SteadyState steady_state_legs(const MpdoState& m, const SequentialMpo& mpo, SteadyStateOptions opt = {}) {
  m.validate();
  if (!(opt.tol > 0)) throw std::invalid_argument("steady_state: tol must be positive");
  if (opt.n_max < 1) throw std::invalid_argument("steady_state: n_max must be positive");
  SteadyState s{m, mpo, left_environment(m), initial_legs(mpo, m.bond_dim()), 0, 0.0};
  Operator prev = read_pre(s.environment, m, s.legs, 1);
  for (int n = 1; n <= opt.n_max; ++n) {
    s.legs = advance_legs(s.legs, m, mpo);
    Operator cur = read_pre(s.environment, m, s.legs, 1);
    s.residual = trace_distance(cur, prev);
    s.converged_n = n;
    if (s.residual < opt.tol) return s;
    prev = std::move(cur);
  }
  throw SteadyStateError("steady_state: no convergence within " + std::to_string(opt.n_max) +
                         " interactions (residual " + std::to_string(s.residual) + ")");
}

inline SteadyStateBundle steady_state(const MpdoState& m, const SequentialMpo& mpo, int window,
                                      SteadyStateOptions opt = {}) {
  if (window < 1) throw std::invalid_argument("steady_state: window must be at least 1");
  return steady_state_legs(m, mpo, opt).bundle(window);
}

// ---------------------------------------------------------------------------
// Classical-history decomposition.
// ---------------------------------------------------------------------------

struct ClassicalHistory {
  std::vector<int> bits;  // k_1..k_n, k_1 the first interacted site
  double probability = 0.0;
  Operator rho_d;       // T^{k_n} ∘ ⋯ ∘ T^{k_1}(ρ_D(0))
  Operator rho_window;  // conditional state of M ⊗ M̃(w)
};

/// Enumerates bit strings on the first `n` sites with probability above `cutoff`.
/// Demon states come from the transfer channels; window states from the tape alone.
inline std::vector<ClassicalHistory> classical_histories(const MpdoState& m, const Superoperator& phi,
                                                         const Operator& rho_d0, int n, int window,
                                                         double cutoff = 1e-14) {
  m.validate();
  if (n < 0 || n > 20) throw std::invalid_argument("classical_histories: n must lie in [0, 20]");
  if (window < 0) throw std::invalid_argument("classical_histories: negative window");
  const std::array<Superoperator, 2> transfer{transfer_channel(phi, 0), transfer_channel(phi, 1)};
  const Operator lam = left_environment(m);
  const Operator e = transfer_matrix(m);
  const int sites = window + 1;

  // env[j] = Λ E^{sites + n − j}: left environment seen by a prefix of length j.
  std::vector<Operator> env(static_cast<std::size_t>(n) + 1);
  Operator acc = lam;
  for (int t = 0; t < sites; ++t) acc = acc * e;
  env[static_cast<std::size_t>(n)] = acc;
  for (int j = n - 1; j >= 0; --j) {
    env[static_cast<std::size_t>(j)] = env[static_cast<std::size_t>(j) + 1] * e;
  }
  const Complex z = env[0].trace();
  if (!(std::abs(z) > 1e-300)) throw std::domain_error("classical_histories: vanishing normalization");

  std::vector<ClassicalHistory> out;
  std::vector<int> bits;
  const Eigen::Index chi = m.bond_dim();
  std::function<void(const Operator&, const Operator&)> rec = [&](const Operator& right, const Operator& rho_d) {
    const auto j = bits.size();
    const double prob = (env[j] * right).trace().real() / z.real();
    if (prob < cutoff) return;
    if (static_cast<int>(j) == n) {
      ClassicalHistory h;
      h.bits = bits;
      h.probability = prob;
      h.rho_d = rho_d;
      std::vector<const Operator*> heads{&right};
      h.rho_window = detail::read_window(lam, m, heads, 0, sites);
      out.push_back(std::move(h));
      return;
    }
    for (int k = 0; k < 2; ++k) {
      bits.push_back(k);
      const BasisLabel label = k == 0 ? BasisLabel::Zero : BasisLabel::One;
      rec(m.tensor(label) * right, transfer[static_cast<std::size_t>(k)].apply(rho_d));
      bits.pop_back();
    }
  };
  rec(Operator::Identity(chi, chi), rho_d0);
  return out;
}

/// Σ_k p_k ρ_D^(k) ⊗ ρ_window^(k).
inline Operator reassemble(const std::vector<ClassicalHistory>& histories) {
  if (histories.empty()) throw std::invalid_argument("reassemble: no histories");
  Operator total = Operator::Zero(2 * histories.front().rho_window.rows(), 2 * histories.front().rho_window.cols());
  for (const auto& h : histories) total += h.probability * kron(h.rho_d, h.rho_window);
  return total;
}

// ---------------------------------------------------------------------------
// Dense brute-force oracle on D ⊗ (n qubits), D the leftmost factor.
// ---------------------------------------------------------------------------

/// Applies a two-qubit channel to qubits (0, target) of a dense register.
inline Operator apply_pair_channel(const Operator& rho, const Superoperator& phi, int n_qubits, int target) {
  if (phi.operator_dim() != 4) throw std::invalid_argument("apply_pair_channel: expected a two-qubit channel");
  if (target <= 0 || target >= n_qubits) throw std::invalid_argument("apply_pair_channel: bad target qubit");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (rho.rows() != dim || rho.cols() != dim) throw std::invalid_argument("apply_pair_channel: dimension mismatch");
  const Eigen::Index bit_d = Eigen::Index{1} << (n_qubits - 1);
  const Eigen::Index bit_t = Eigen::Index{1} << (n_qubits - 1 - target);
  const std::array<Eigen::Index, 4> offsets{0, bit_t, bit_d, bit_d | bit_t};  // index 2·d + t

  Operator out(dim, dim);
  Eigen::Matrix<Complex, 16, 1> v;
  const Eigen::Matrix<Complex, 16, 16> mat = phi.matrix();
  for (Eigen::Index r0 = 0; r0 < dim; ++r0) {
    if (r0 & (bit_d | bit_t)) continue;
    for (Eigen::Index c0 = 0; c0 < dim; ++c0) {
      if (c0 & (bit_d | bit_t)) continue;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) v(a * 4 + b) = rho(r0 + offsets[a], c0 + offsets[b]);
      const Eigen::Matrix<Complex, 16, 1> w = mat * v;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) out(r0 + offsets[a], c0 + offsets[b]) = w(a * 4 + b);
    }
  }
  return out;
}

/// Applies channels[j] between D and memory site j+1, for j = 0..channels.size()−1.
inline Operator brute_force(const Operator& rho, const std::vector<Superoperator>& channels, int memory_qubits) {
  if (memory_qubits < 1 || memory_qubits > 11) throw std::invalid_argument("brute_force: at most 11 memory qubits");
  if (static_cast<int>(channels.size()) > memory_qubits)
    throw std::invalid_argument("brute_force: more interactions than memory qubits");
  Operator state = rho;
  for (std::size_t j = 0; j < channels.size(); ++j)
    state = apply_pair_channel(state, channels[j], memory_qubits + 1, static_cast<int>(j) + 1);
  return state;
}

inline Operator brute_force(const Operator& rho, const Superoperator& phi, int memory_qubits, int steps) {
  if (steps < 0) throw std::invalid_argument("brute_force: negative number of interactions");
  return brute_force(rho, std::vector<Superoperator>(static_cast<std::size_t>(steps), phi), memory_qubits);
}

}  // namespace qdemon
