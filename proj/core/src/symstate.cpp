#include "symq/symstate.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace symq {
namespace {

constexpr double kNormTol = 1e-12;

void require_normalized(const Eigen::VectorXcd& v) {
  if (std::abs(v.norm() - 1.0) > kNormTol) {
    throw std::invalid_argument("state is not normalized: |v| = " + std::to_string(v.norm()));
  }
}

void require_exhaustive_capacity(int n) {
  if (n > kMaxExhaustiveQubits) {
    throw std::length_error("exhaustive symmetric state limited to " +
                            std::to_string(kMaxExhaustiveQubits) + " qubits, got " +
                            std::to_string(n));
  }
}

int zeros_in(std::uint64_t index, int n) { return n - std::popcount(index); }

}  // namespace

std::uint64_t binom(int a, int b) {
  if (a < 0) throw std::invalid_argument("binom: negative upper argument");
  if (b < 0 || b > a) return 0;
  if (b > a - b) b = a - b;
  std::uint64_t result = 1;
  for (int i = 1; i <= b; ++i) {
    // result is C(a-b+i-1, i-1); result * (a-b+i) is divisible by i.
    const std::uint64_t g = std::gcd(result, static_cast<std::uint64_t>(i));
    const std::uint64_t factor = static_cast<std::uint64_t>(a - b + i) / (static_cast<std::uint64_t>(i) / g);
    const std::uint64_t reduced = result / g;
    if (reduced > std::numeric_limits<std::uint64_t>::max() / factor) {
      throw std::overflow_error("binom(" + std::to_string(a) + ", " + std::to_string(b) +
                                ") exceeds 64 bits");
    }
    result = reduced * factor;
  }
  return result;
}

SymLabel SymLabel::make(int j, int n) {
  if (n < 1 || j < 0 || j > n) {
    throw std::invalid_argument("invalid symmetric label (j=" + std::to_string(j) +
                                ", n=" + std::to_string(n) + ")");
  }
  return SymLabel{j, n};
}

SymmetricStateVector SymmetricStateVector::exhaustive(int n, Eigen::VectorXcd amplitudes) {
  if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
  require_exhaustive_capacity(n);
  if (amplitudes.size() != (Eigen::Index{1} << n)) {
    throw std::invalid_argument("exhaustive amplitudes must have length 2^n");
  }
  require_normalized(amplitudes);
  if (!is_permutation_symmetric(amplitudes, n)) {
    throw std::invalid_argument("amplitudes are not symmetric under qubit exchange");
  }
  return SymmetricStateVector(n, SymBasis::exhaustive, std::move(amplitudes));
}

SymmetricStateVector SymmetricStateVector::dicke(int n, Eigen::VectorXcd coefficients) {
  if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
  if (coefficients.size() != n + 1) {
    throw std::invalid_argument("Dicke coefficients must have length n+1");
  }
  require_normalized(coefficients);
  return SymmetricStateVector(n, SymBasis::dicke, std::move(coefficients));
}

SymmetricStateVector SymmetricStateVector::to_exhaustive() const {
  if (basis_ == SymBasis::exhaustive) return *this;
  require_exhaustive_capacity(n_);
  const auto dim = Eigen::Index{1} << n_;
  Eigen::VectorXcd out(dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const int j = zeros_in(static_cast<std::uint64_t>(b), n_);
    out[b] = amplitudes_[j] / std::sqrt(static_cast<double>(binom(n_, j)));
  }
  return SymmetricStateVector(n_, SymBasis::exhaustive, std::move(out));
}

SymmetricStateVector symmetric_basis_state(SymLabel label) {
  label = SymLabel::make(label.j, label.n);
  require_exhaustive_capacity(label.n);
  return dicke_basis_state(label).to_exhaustive();
}

SymmetricStateVector dicke_basis_state(SymLabel label) {
  label = SymLabel::make(label.j, label.n);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(label.n + 1);
  c[label.j] = 1.0;
  return SymmetricStateVector::dicke(label.n, std::move(c));
}

std::vector<DecompositionTerm> decompose(SymLabel label, int m) {
  label = SymLabel::make(label.j, label.n);
  const int n = label.n;
  const int j = label.j;
  if (m < 1 || m > n - 1) {
    throw std::invalid_argument("decompose: subset size must satisfy 1 <= m <= n-1 (m=" +
                                std::to_string(m) + ", n=" + std::to_string(n) + ")");
  }
  const double total = static_cast<double>(binom(n, j));
  std::vector<DecompositionTerm> terms;
  for (int k = 0; k <= m; ++k) {
    const std::uint64_t left = binom(m, k);
    const std::uint64_t right = binom(n - m, j - k);
    if (left == 0 || right == 0) continue;
    DecompositionTerm t;
    t.k = k;
    t.coefficient = std::sqrt(static_cast<double>(left) * static_cast<double>(right) / total);
    t.left = SymLabel{k, m};
    t.right = SymLabel{j - k, n - m};
    terms.push_back(t);
  }
  return terms;
}

Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a[i] * b;
  }
  return out;
}

Eigen::VectorXcd swap_qubits(const Eigen::VectorXcd& amplitudes, int n, int a, int b) {
  if (a < 0 || b < 0 || a >= n || b >= n) throw std::out_of_range("swap_qubits: bad qubit index");
  if (amplitudes.size() != (Eigen::Index{1} << n)) {
    throw std::invalid_argument("swap_qubits: length is not 2^n");
  }
  const std::uint64_t bit_a = std::uint64_t{1} << (n - 1 - a);
  const std::uint64_t bit_b = std::uint64_t{1} << (n - 1 - b);
  Eigen::VectorXcd out(amplitudes.size());
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i) {
    auto idx = static_cast<std::uint64_t>(i);
    const bool va = idx & bit_a;
    const bool vb = idx & bit_b;
    if (va != vb) idx ^= (bit_a | bit_b);
    out[static_cast<Eigen::Index>(idx)] = amplitudes[i];
  }
  return out;
}

bool is_permutation_symmetric(const Eigen::VectorXcd& amplitudes, int n, double tol) {
  // Adjacent transpositions generate the symmetric group.
  for (int q = 0; q + 1 < n; ++q) {
    if ((swap_qubits(amplitudes, n, q, q + 1) - amplitudes).cwiseAbs().maxCoeff() > tol) {
      return false;
    }
  }
  return true;
}

}  // namespace symq
