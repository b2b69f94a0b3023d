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
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace qdemon {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Tolerances shared by the density-operator checks.
inline constexpr double kEigenvalueFloor = 1e-12;
inline constexpr double kNegativeEigenvalueTol = 1e-10;
inline constexpr double kDensityTol = 1e-9;

/// Operator basis {σ⁰, σ¹, σ⁺, σ⁻}. Each element is a matrix unit |r⟩⟨c| in the
/// fixed z basis, so the basis is orthonormal under ⟨A,B⟩ = tr(A†B).
enum class BasisLabel : std::uint8_t { Zero = 0, One = 1, Plus = 2, Minus = 3 };

inline constexpr std::array<BasisLabel, 4> kBasisLabels{BasisLabel::Zero, BasisLabel::One,
                                                        BasisLabel::Plus, BasisLabel::Minus};

inline constexpr std::size_t index_of(BasisLabel l) { return static_cast<std::size_t>(l); }

inline constexpr bool is_classical(BasisLabel l) {
  return l == BasisLabel::Zero || l == BasisLabel::One;
}

/// Row and column of the matrix unit carrying label `l`.
inline constexpr std::pair<int, int> matrix_unit(BasisLabel l) {
  switch (l) {
    case BasisLabel::Zero: return {0, 0};
    case BasisLabel::One: return {1, 1};
    case BasisLabel::Plus: return {0, 1};
    case BasisLabel::Minus: return {1, 0};
  }
  return {0, 0};
}

inline constexpr BasisLabel label_of(int row, int col) {
  if (row == col) return row == 0 ? BasisLabel::Zero : BasisLabel::One;
  return row == 0 ? BasisLabel::Plus : BasisLabel::Minus;
}

/// tr σⁱ: one for the projectors, zero for the ladder operators.
inline constexpr double basis_trace(BasisLabel l) { return is_classical(l) ? 1.0 : 0.0; }

inline const char* to_string(BasisLabel l) {
  switch (l) {
    case BasisLabel::Zero: return "0";
    case BasisLabel::One: return "1";
    case BasisLabel::Plus: return "+";
    case BasisLabel::Minus: return "-";
  }
  return "?";
}

inline Operator basis_operator(BasisLabel l) {
  Operator m = Operator::Zero(2, 2);
  const auto [r, c] = matrix_unit(l);
  m(r, c) = 1.0;
  return m;
}

/// Single-qubit operators by symbol: 0, 1, +, -, x, y, z, I.
/// σ⁻ = |1⟩⟨0| lowers the classical label, so σ_D⁻ takes |g⟩ = |0⟩ to |e⟩ = |1⟩.
inline Operator pauli(std::string_view symbol) {
  if (symbol == "0") return basis_operator(BasisLabel::Zero);
  if (symbol == "1") return basis_operator(BasisLabel::One);
  if (symbol == "+") return basis_operator(BasisLabel::Plus);
  if (symbol == "-") return basis_operator(BasisLabel::Minus);
  Operator m = Operator::Zero(2, 2);
  if (symbol == "x") {
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
  } else if (symbol == "y") {
    m(0, 1) = -kI;
    m(1, 0) = kI;
  } else if (symbol == "z") {
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
  } else if (symbol == "I") {
    m = Operator::Identity(2, 2);
  } else {
    throw std::invalid_argument("pauli: unknown label '" + std::string(symbol) + "'");
  }
  return m;
}

inline Operator dagger(const Operator& a) { return a.adjoint(); }

inline Operator hermitize(const Operator& a) { return 0.5 * (a + a.adjoint()); }

inline double hermiticity_error(const Operator& a) { return (a - a.adjoint()).cwiseAbs().maxCoeff(); }

inline Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Operator kron(std::span<const Operator> factors) {
  if (factors.empty()) return Operator::Identity(1, 1);
  Operator out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Vectorization. Row-major stacking: vec(A)[i*d + j] = A(i, j). Under this
// convention vec(X A Y) = (X ⊗ Yᵀ) vec(A); every superoperator in the project
// is built against it.
// ---------------------------------------------------------------------------

inline ComplexVector vectorize(const Operator& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("vectorize: operator must be square");
  const Eigen::Index d = a.rows();
  ComplexVector v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = a(i, j);
  return v;
}

inline Operator devectorize(const ComplexVector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw std::invalid_argument("devectorize: length is not a perfect square");
  Operator a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = v(i * d + j);
  return a;
}

/// Linear map on d×d operators, stored as a d²×d² matrix acting on vectorize().
class Superoperator {
 public:
  Superoperator() = default;
  explicit Superoperator(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols())
      throw std::invalid_argument("Superoperator: matrix must be square");
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(matrix_.rows()))));
    if (d * d != matrix_.rows())
      throw std::invalid_argument("Superoperator: dimension is not a perfect square");
    operator_dim_ = d;
  }

  static Superoperator identity(Eigen::Index operator_dim) {
    return Superoperator(Eigen::MatrixXcd::Identity(operator_dim * operator_dim, operator_dim * operator_dim));
  }
  static Superoperator zero(Eigen::Index operator_dim) {
    return Superoperator(Eigen::MatrixXcd::Zero(operator_dim * operator_dim, operator_dim * operator_dim));
  }

  [[nodiscard]] const Eigen::MatrixXcd& matrix() const { return matrix_; }
  [[nodiscard]] Eigen::Index operator_dim() const { return operator_dim_; }
  [[nodiscard]] Eigen::Index dim() const { return matrix_.rows(); }

  [[nodiscard]] Operator apply(const Operator& a) const {
    if (a.rows() != operator_dim_ || a.cols() != operator_dim_)
      throw std::invalid_argument("Superoperator::apply: dimension mismatch");
    return devectorize(matrix_ * vectorize(a));
  }

  /// (this ∘ other)(A) = this(other(A)).
  [[nodiscard]] Superoperator compose(const Superoperator& other) const {
    if (other.operator_dim_ != operator_dim_) throw std::invalid_argument("Superoperator::compose: dimension mismatch");
    return Superoperator(matrix_ * other.matrix_);
  }

  Superoperator& operator+=(const Superoperator& other) {
    if (other.operator_dim_ != operator_dim_) throw std::invalid_argument("Superoperator: dimension mismatch");
    matrix_ += other.matrix_;
    return *this;
  }
  friend Superoperator operator+(Superoperator a, const Superoperator& b) { return a += b; }
  friend Superoperator operator-(const Superoperator& a, const Superoperator& b) {
    return Superoperator(a.matrix_ - b.matrix_);
  }
  friend Superoperator operator*(Complex s, const Superoperator& a) { return Superoperator(s * a.matrix_); }

 private:
  Eigen::MatrixXcd matrix_{Eigen::MatrixXcd::Zero(1, 1)};
  Eigen::Index operator_dim_{1};
};

/// Superoperator of A ↦ X A Y†.
inline Superoperator sandwich(const Operator& x, const Operator& y) { return Superoperator(kron(x, y.conjugate())); }

/// Superoperator of A ↦ X A.
inline Superoperator left_multiply(const Operator& x) {
  return Superoperator(kron(x, Operator::Identity(x.rows(), x.cols())));
}

/// Superoperator of A ↦ A X.
inline Superoperator right_multiply(const Operator& x) {
  return Superoperator(kron(Operator::Identity(x.rows(), x.cols()), x.transpose()));
}

/// Unitary adjoint action A ↦ U A U†.
inline Superoperator unitary_action(const Operator& u) { return sandwich(u, u); }

/// Largest deviation of 1̂ being a left fixed covector, i.e. of trace preservation.
inline double trace_preservation_error(const Superoperator& s) {
  const ComplexVector id = vectorize(Operator::Identity(s.operator_dim(), s.operator_dim()));
  return (id.adjoint() * s.matrix() - id.adjoint()).cwiseAbs().maxCoeff();
}

/// Choi matrix Σ_ij |i⟩⟨j| ⊗ S(|i⟩⟨j|); PSD iff S is completely positive.
inline Operator choi_matrix(const Superoperator& s) {
  const Eigen::Index d = s.operator_dim();
  Operator choi = Operator::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      Operator unit = Operator::Zero(d, d);
      unit(i, j) = 1.0;
      choi.block(i * d, j * d, d, d) = s.apply(unit);
    }
  return choi;
}

inline RealVector hermitian_eigenvalues(const Operator& a) {
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitize(a), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

inline double min_choi_eigenvalue(const Superoperator& s) { return hermitian_eigenvalues(choi_matrix(s)).minCoeff(); }

/// exp(L t) by scaling-and-squaring with Padé approximants (Eigen MatrixFunctions).
inline Superoperator matexp(const Superoperator& generator, double t) {
  if (!std::isfinite(t) || !generator.matrix().allFinite())
    throw std::domain_error("matexp: non-finite generator or time");
  Eigen::MatrixXcd scaled = generator.matrix() * t;
  Eigen::MatrixXcd result = scaled.exp();
  if (!result.allFinite()) throw std::overflow_error("matexp: result overflowed");
  return Superoperator(std::move(result));
}

// ---------------------------------------------------------------------------
// Partial trace over qubit/qudit registers. Subsystem 0 is the leftmost
// (most significant) kron factor.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::size_t> strides_of(std::span<const int> dims) {
  std::vector<std::size_t> strides(dims.size());
  std::size_t s = 1;
  for (std::size_t k = dims.size(); k-- > 0;) {
    strides[k] = s;
    s *= static_cast<std::size_t>(dims[k]);
  }
  return strides;
}

/// Offsets into the full index space for every multi-index over `subset`.
inline std::vector<std::size_t> subset_offsets(std::span<const int> dims, std::span<const std::size_t> strides,
                                               std::span<const std::size_t> subset) {
  std::vector<std::size_t> offsets{0};
  for (const std::size_t k : subset) {
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * static_cast<std::size_t>(dims[k]));
    for (const std::size_t base : offsets)
      for (int v = 0; v < dims[k]; ++v) next.push_back(base + static_cast<std::size_t>(v) * strides[k]);
    offsets = std::move(next);
  }
  return offsets;
}

}  // namespace detail

inline std::size_t total_dim(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t acc, int d) { return acc * static_cast<std::size_t>(d); });
}

/// Reduced operator on the subsystems in `keep` (returned in their original order).
inline Operator partial_trace(const Operator& rho, std::span<const int> dims, std::span<const std::size_t> keep) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("partial_trace: operator must be square");
  for (const int d : dims)
    if (d <= 0) throw std::invalid_argument("partial_trace: subsystem dimensions must be positive");
  if (total_dim(dims) != static_cast<std::size_t>(rho.rows()))
    throw std::invalid_argument("partial_trace: product of dims does not match operator dimension");

  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw std::invalid_argument("partial_trace: duplicate subsystem index");
  if (!kept.empty() && kept.back() >= dims.size()) throw std::invalid_argument("partial_trace: subsystem index out of range");

  std::vector<std::size_t> traced;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (!std::binary_search(kept.begin(), kept.end(), k)) traced.push_back(k);

  const auto strides = detail::strides_of(dims);
  const auto keep_off = detail::subset_offsets(dims, strides, kept);
  const auto trace_off = detail::subset_offsets(dims, strides, traced);

  const auto n = static_cast<Eigen::Index>(keep_off.size());
  Operator out = Operator::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      Complex acc{0.0, 0.0};
      for (const std::size_t t : trace_off)
        acc += rho(static_cast<Eigen::Index>(keep_off[i] + t), static_cast<Eigen::Index>(keep_off[j] + t));
      out(i, j) = acc;
    }
  return out;
}

inline Operator partial_trace(const Operator& rho, std::initializer_list<int> dims,
                              std::initializer_list<std::size_t> keep) {
  const std::vector<int> d(dims);
  const std::vector<std::size_t> k(keep);
  return partial_trace(rho, std::span<const int>(d), std::span<const std::size_t>(k));
}

/// n-qubit register dims.
inline std::vector<int> qubit_dims(std::size_t n) { return std::vector<int>(n, 2); }

// ---------------------------------------------------------------------------
// Density operators and entropies (natural log throughout).
// ---------------------------------------------------------------------------

inline bool is_density_operator(const Operator& rho, double trace_tol = 1e-12, double eig_tol = kNegativeEigenvalueTol) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) return false;
  if (hermiticity_error(rho) > kNegativeEigenvalueTol) return false;
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > trace_tol) return false;
  return hermitian_eigenvalues(rho).minCoeff() >= -eig_tol;
}

namespace detail {

inline void require_density(const Operator& rho, const char* where) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument(std::string(where) + ": operator must be square");
  if (hermiticity_error(rho) > kDensityTol) throw std::domain_error(std::string(where) + ": operator is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > kDensityTol)
    throw std::domain_error(std::string(where) + ": trace differs from one");
}

inline double entropy_of_spectrum(const RealVector& eigenvalues, const char* where) {
  double s = 0.0;
  for (const double p : eigenvalues) {
    if (p < -kNegativeEigenvalueTol) throw std::domain_error(std::string(where) + ": operator is not positive semidefinite");
    if (p > kEigenvalueFloor) s -= p * std::log(p);
  }
  return s;
}

}  // namespace detail

/// S(ρ) = −tr ρ ln ρ in nats.
inline double von_neumann_entropy(const Operator& rho) {
  detail::require_density(rho, "von_neumann_entropy");
  return detail::entropy_of_spectrum(hermitian_eigenvalues(rho), "von_neumann_entropy");
}

/// I(A:B) = S(A) + S(B) − S(AB), with A the subsystems in `part_a` and B the rest.
inline double mutual_information(const Operator& rho, std::span<const int> dims, std::span<const std::size_t> part_a) {
  std::vector<std::size_t> part_b;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (std::find(part_a.begin(), part_a.end(), k) == part_a.end()) part_b.push_back(k);
  return von_neumann_entropy(partial_trace(rho, dims, part_a)) + von_neumann_entropy(partial_trace(rho, dims, part_b)) -
         von_neumann_entropy(rho);
}

/// Bipartite form: ρ on A ⊗ B with dims (d_a, d_b).
inline double mutual_information(const Operator& rho, int dim_a, int dim_b) {
  const std::array<int, 2> dims{dim_a, dim_b};
  const std::array<std::size_t, 1> a{0};
  return mutual_information(rho, dims, a);
}

/// D(ρ‖σ) = −S(ρ) − tr ρ ln σ. Returns +∞ when supp ρ ⊄ supp σ.
inline double relative_entropy(const Operator& rho, const Operator& sigma) {
  detail::require_density(rho, "relative_entropy");
  detail::require_density(sigma, "relative_entropy");
  if (rho.rows() != sigma.rows()) throw std::invalid_argument("relative_entropy: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitize(sigma));
  const RealVector& s = solver.eigenvalues();
  const Operator& v = solver.eigenvectors();
  const Operator rho_h = hermitize(rho);
  double cross = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double weight = (v.col(k).adjoint() * rho_h * v.col(k))(0, 0).real();
    if (s(k) <= kEigenvalueFloor) {
      if (s(k) < -kNegativeEigenvalueTol) throw std::domain_error("relative_entropy: sigma is not positive semidefinite");
      if (weight > kEigenvalueFloor) return std::numeric_limits<double>::infinity();
      continue;
    }
    cross += weight * std::log(s(k));
  }
  return -von_neumann_entropy(rho) - cross;
}

/// ½‖ρ − σ‖₁ for Hermitian arguments.
inline double trace_distance(const Operator& rho, const Operator& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  return 0.5 * hermitian_eigenvalues(rho - sigma).cwiseAbs().sum();
}

/// ζ = ⟨σᶻ⟩ of a qubit state.
inline double bias(const Operator& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) throw std::invalid_argument("bias: expected a qubit operator");
  return (rho(0, 0) - rho(1, 1)).real();
}

/// exp(−iφσᶻ/2).
inline Operator rotation_z(double phi) {
  Operator u = Operator::Zero(2, 2);
  u(0, 0) = std::exp(Complex(0.0, -phi / 2));
  u(1, 1) = std::exp(Complex(0.0, phi / 2));
  return u;
}

inline Operator ket_projector(const ComplexVector& psi) { return psi * psi.adjoint(); }

/// Binary entropy H(p) in nats.
inline double binary_entropy(double p) {
  double h = 0.0;
  if (p > kEigenvalueFloor) h -= p * std::log(p);
  if (1.0 - p > kEigenvalueFloor) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

}  // namespace qdemon
