#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace symq {

using Complex = std::complex<double>;

/// Largest qubit count for which the 2^n computational-basis form is built.
inline constexpr int kMaxExhaustiveQubits = 12;

/// Exact binomial coefficient C(a, b); 0 when b < 0 or b > a.
/// Throws std::overflow_error if the result does not fit in 64 bits
/// (never the case for a <= 62) and std::invalid_argument for a < 0.
std::uint64_t binom(int a, int b);

/// Label of the symmetric state |S(j, n-j)>: j qubits in |0>, n-j in |1>.
struct SymLabel {
  int j = 0;
  int n = 1;

  /// Throws std::invalid_argument unless n >= 1 and 0 <= j <= n.
  static SymLabel make(int j, int n);

  friend bool operator==(const SymLabel&, const SymLabel&) = default;
};

enum class SymBasis {
  exhaustive,  // 2^n amplitudes over computational basis strings
  dicke,       // n+1 amplitudes over SymLabel j
};

/// A normalized symmetric n-qubit state.
///
/// Exhaustive basis index convention: qubit q (0-based, left to right in the
/// tensor product) is bit (n-1-q) of the index, and a 0 bit is |0>. The
/// Dicke basis stores one coefficient per j = 0..n.
class SymmetricStateVector {
 public:
  /// Validates length and norm (1e-12). Exhaustive input must also be
  /// invariant under every qubit transposition.
  static SymmetricStateVector exhaustive(int n, Eigen::VectorXcd amplitudes);
  static SymmetricStateVector dicke(int n, Eigen::VectorXcd coefficients);

  int qubits() const { return n_; }
  SymBasis basis() const { return basis_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

  /// Expands Dicke coefficients onto the computational basis (n <= 12).
  SymmetricStateVector to_exhaustive() const;

 private:
  SymmetricStateVector(int n, SymBasis basis, Eigen::VectorXcd amplitudes)
      : n_(n), basis_(basis), amplitudes_(std::move(amplitudes)) {}

  int n_;
  SymBasis basis_;
  Eigen::VectorXcd amplitudes_;
};

/// |S(j, n-j)> on the computational basis: every string with j zeros has
/// amplitude 1/sqrt(C(n, j)). Throws std::length_error for n > 12.
SymmetricStateVector symmetric_basis_state(SymLabel label);

/// |S(j, n-j)> in the compact Dicke basis (a unit vector at index j).
SymmetricStateVector dicke_basis_state(SymLabel label);

struct DecompositionTerm {
  int k = 0;                // zeros in the first m qubits
  double coefficient = 0;   // sqrt(C(m,k) C(n-m,j-k) / C(n,j))
  SymLabel left;            // (k, m-k) on qubits 1..m
  SymLabel right;           // (j-k, (n-m)-(j-k)) on qubits m+1..n
};

/// Splits |S(j, n-j)> over the first m qubits and the remaining n-m.
/// Terms with a vanishing binomial are omitted. Requires 1 <= m <= n-1.
std::vector<DecompositionTerm> decompose(SymLabel label, int m);

/// Kronecker product a (x) b of two state vectors, a on the leading slots.
Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/// Amplitudes with the tensor slots of qubits a and b exchanged.
Eigen::VectorXcd swap_qubits(const Eigen::VectorXcd& amplitudes, int n, int a, int b);

/// True when every qubit transposition leaves the vector unchanged within tol.
bool is_permutation_symmetric(const Eigen::VectorXcd& amplitudes, int n, double tol = 1e-12);

}  // namespace symq
