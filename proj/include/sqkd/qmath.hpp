#pragma once

// Exact small-dimension complex linear algebra and entropy primitives.
// Everything here is a pure function of its inputs; all logarithms are base 2.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sqkd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace detail {
inline constexpr double kLn2 = 0.6931471805599453094172321214581766;
}

/// Binary Shannon entropy h(x) = -x log2 x - (1-x) log2(1-x), with 0 log 0 = 0.
/// Accurate down to x near 0 or 1 (the (1-x) term is evaluated with log1p so
/// contributions of order x/ln2 survive for subnormal-scale x).
inline double binary_entropy(double x) {
  constexpr double slack = 1e-12;
  if (!(x >= -slack && x <= 1.0 + slack)) {
    std::ostringstream msg;
    msg << "binary_entropy: argument " << x << " outside [0,1]";
    throw std::domain_error(msg.str());
  }
  x = std::min(1.0, std::max(0.0, x));
  const double y = std::min(x, 1.0 - x);
  if (y <= 0.0) return 0.0;
  return -y * std::log2(y) - (1.0 - y) * std::log1p(-y) / detail::kLn2;
}

/// Shannon entropy of a probability distribution (entries >= 0, sum ~ 1).
inline double shannon_entropy(std::span<const double> dist) {
  double sum = 0.0;
  for (double p : dist) {
    if (p < -1e-12) {
      std::ostringstream msg;
      msg << "shannon_entropy: negative probability " << p;
      throw std::domain_error(msg.str());
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "shannon_entropy: distribution sums to " << sum;
    throw std::domain_error(msg.str());
  }
  double s = 0.0;
  for (double p : dist)
    if (p > 0.0) s -= p * std::log2(p);
  return s;
}

inline double shannon_entropy(std::initializer_list<double> dist) {
  return shannon_entropy(std::span<const double>(dist.begin(), dist.size()));
}

/// Max-norm of M - M^dagger.
template <typename Derived>
double hermiticity_residual(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Max-norm of U^dagger U - I.
template <typename Derived>
double unitarity_residual(const Eigen::MatrixBase<Derived>& u) {
  const auto n = u.cols();
  return (u.adjoint() * u - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

/// Von Neumann entropy -tr(rho log2 rho) of a Hermitian, trace-one operator.
/// Eigenvalues in [-1e-9, 0) are treated as round-off and clamped to zero.
inline double von_neumann_entropy(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw std::domain_error("von_neumann_entropy: matrix not square");
  const double herm = hermiticity_residual(rho);
  if (herm > 1e-9) {
    std::ostringstream msg;
    msg << "von_neumann_entropy: hermiticity residual " << herm;
    throw std::domain_error(msg.str());
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "von_neumann_entropy: trace " << tr << " != 1";
    throw std::domain_error(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double lambda : solver.eigenvalues()) {
    if (lambda < -1e-9) {
      std::ostringstream msg;
      msg << "von_neumann_entropy: eigenvalue " << lambda << " below tolerance";
      throw std::domain_error(msg.str());
    }
    if (lambda > 0.0) s -= lambda * std::log2(lambda);
  }
  return s;
}

/// A cq-state given by two families of sub-normalized conditional vectors
/// {|E_i^0>}, {|E_i^1>} in the environment space, with overall weight 1/N:
///   rho = (1/N) |0><0| (x) sum_i |E_i^0><E_i^0|  +  (1/N) |1><1| (x) sum_i |E_i^1><E_i^1|.
/// The pairing (E_i^0, E_i^1) is the caller's choice and is not permuted here.
struct CqDecomposition {
  std::vector<Vector> zero;
  std::vector<Vector> one;
  double normalization = 1.0;  // N
};

/// Entropy lower bound for a cq-state: pairs (E_i^0, E_i^1) contribute
///   ((|E_i^0|^2 + |E_i^1|^2)/N) * (h(|E_i^0|^2 / (|E_i^0|^2+|E_i^1|^2)) - h(lambda_i)),
///   lambda_i = 1/2 (1 + sqrt((|E_i^0|^2-|E_i^1|^2)^2 + 4 Re^2<E_i^0|E_i^1>) / (|E_i^0|^2+|E_i^1|^2)).
/// The bound can be vacuous; the result is clamped below at zero.
inline double theorem1_bound(const CqDecomposition& blocks) {
  if (!(blocks.normalization > 0.0))
    throw std::domain_error("theorem1_bound: normalization must be positive");
  const std::size_t pairs = std::min(blocks.zero.size(), blocks.one.size());
  double bound = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const double a = blocks.zero[i].squaredNorm();
    const double b = blocks.one[i].squaredNorm();
    const double ab = a + b;
    if (ab <= 0.0) continue;
    const double re = (blocks.zero[i].dot(blocks.one[i])).real();
    double lambda = 0.5 * (1.0 + std::sqrt((a - b) * (a - b) + 4.0 * re * re) / ab);
    lambda = std::min(1.0, std::max(0.5, lambda));  // Cauchy-Schwarz guarantees this range
    bound += (ab / blocks.normalization) * (binary_entropy(a / ab) - binary_entropy(lambda));
  }
  return std::max(0.0, bound);
}

/// Exact S(A|E) = S(AE) - S(E) of the literal cq density operator built from
/// the blocks, by eigendecomposition. The blocks must form a valid (trace-one)
/// state or the underlying entropy call rejects them.
inline double conditional_entropy_cq(const CqDecomposition& blocks) {
  if (!(blocks.normalization > 0.0))
    throw std::domain_error("conditional_entropy_cq: normalization must be positive");
  if (blocks.zero.empty() && blocks.one.empty())
    throw std::domain_error("conditional_entropy_cq: no vectors");
  const Eigen::Index dim = blocks.zero.empty() ? blocks.one.front().size() : blocks.zero.front().size();
  for (const auto& v : blocks.zero)
    if (v.size() != dim) throw std::domain_error("conditional_entropy_cq: mixed vector dimensions");
  for (const auto& v : blocks.one)
    if (v.size() != dim) throw std::domain_error("conditional_entropy_cq: mixed vector dimensions");

  Matrix rho0 = Matrix::Zero(dim, dim);
  Matrix rho1 = Matrix::Zero(dim, dim);
  for (const auto& v : blocks.zero) rho0 += v * v.adjoint() / blocks.normalization;
  for (const auto& v : blocks.one) rho1 += v * v.adjoint() / blocks.normalization;

  Matrix joint = Matrix::Zero(2 * dim, 2 * dim);
  joint.topLeftCorner(dim, dim) = rho0;
  joint.bottomRightCorner(dim, dim) = rho1;
  return von_neumann_entropy(joint) - von_neumann_entropy(rho0 + rho1);
}

}  // namespace sqkd
