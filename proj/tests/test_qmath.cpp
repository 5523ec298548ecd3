#include "sqkd/qmath.hpp"

#include "sqkd/rng.hpp"

#include <doctest.h>

#include <random>

using namespace sqkd;

TEST_SUITE_BEGIN("qmath");

TEST_CASE("binary entropy anchors") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  // Frozen from a 40-digit evaluation of -x log2 x - (1-x) log2(1-x).
  CHECK(binary_entropy(0.11) == doctest::Approx(0.499915958164528).epsilon(1e-13));
  CHECK_THROWS_AS(binary_entropy(-1e-6), std::domain_error);
  CHECK_THROWS_AS(binary_entropy(1.0 + 1e-6), std::domain_error);
  // Values within 1e-12 of the boundary are clamped, not rejected.
  CHECK(binary_entropy(-1e-13) == 0.0);
  CHECK(binary_entropy(1.0 + 1e-13) == 0.0);
}

TEST_CASE("binary entropy is symmetric and accurate near the edges") {
  std::mt19937_64 eng(7);
  for (int i = 0; i < 2000; ++i) {
    const double x = uniform_double(eng);
    CHECK(std::abs(binary_entropy(x) - binary_entropy(1.0 - x)) <= 1e-12);
  }
  // The (1-x) term must survive tiny x: h(x) ~ x (log2(1/x) + 1/ln2).
  const double tiny = 1e-40;
  const double expected = tiny * (std::log2(1.0 / tiny) + 1.0 / 0.69314718055994531);
  CHECK(binary_entropy(tiny) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("shannon entropy") {
  CHECK(shannon_entropy({1.0, 0.0, 0.0, 0.0}) == 0.0);
  CHECK(shannon_entropy({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(shannon_entropy({0.5, 0.25, 0.25}) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(shannon_entropy({0.5, 0.4}), std::domain_error);
  CHECK_THROWS_AS(shannon_entropy({0.5, 0.6, -0.1}), std::domain_error);
}

TEST_CASE("von Neumann entropy") {
  Matrix half = 0.5 * Matrix::Identity(2, 2);
  CHECK(von_neumann_entropy(half) == doctest::Approx(1.0).epsilon(1e-14));

  Vector psi(2);
  psi << Complex(0.6, 0.0), Complex(0.0, 0.8);
  Matrix pure = psi * psi.adjoint();
  CHECK(von_neumann_entropy(pure) == doctest::Approx(0.0).epsilon(1e-12));

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 0.9;
  diag(1, 1) = 0.1;
  CHECK(von_neumann_entropy(diag) == doctest::Approx(binary_entropy(0.1)).epsilon(1e-14));

  Matrix bad = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(von_neumann_entropy(bad), std::domain_error);  // trace 2
  Matrix nonherm = half;
  nonherm(0, 1) = Complex(0.1, 0.1);
  CHECK_THROWS_AS(von_neumann_entropy(nonherm), std::domain_error);
}

TEST_CASE("diagonal von Neumann entropy equals Shannon entropy of the diagonal") {
  std::mt19937_64 eng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(eng() % 6);
    std::vector<double> p(n);
    double sum = 0.0;
    for (double& x : p) sum += (x = uniform_double(eng) + 1e-3);
    Matrix rho = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) rho(i, i) = (p[i] /= sum);
    CHECK(std::abs(von_neumann_entropy(rho) - shannon_entropy(p)) <= 1e-10);
  }
}

namespace {

/// Random trace-one cq ensemble with `pairs` vectors per branch.
CqDecomposition random_blocks(std::mt19937_64& eng, int dim, int pairs) {
  GaussianSource gauss(eng());
  CqDecomposition cq;
  double total = 0.0;
  for (int side = 0; side < 2; ++side) {
    auto& branch = side == 0 ? cq.zero : cq.one;
    for (int i = 0; i < pairs; ++i) {
      Vector v(dim);
      for (int d = 0; d < dim; ++d) v(d) = Complex(gauss(), gauss());
      v *= uniform_double(eng);  // vary the branch weights
      total += v.squaredNorm();
      branch.push_back(v);
    }
  }
  cq.normalization = total;  // trace one by construction
  return cq;
}

}  // namespace

TEST_CASE("theorem-1 style bound anchors") {
  Vector u(2), w(2);
  u << 1.0, 0.0;
  w << 0.0, 1.0;

  // Equal weights, orthogonal directions: lambda = 1/2, the bound collapses.
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(theorem1_bound({{(s * u).eval()}, {(s * w).eval()}, 1.0}) ==
        doctest::Approx(0.0).epsilon(1e-14));

  // Parallel vectors with real overlap 1/2: lambda = 1, full uncertainty.
  CHECK(theorem1_bound({{(s * u).eval()}, {(s * u).eval()}, 1.0}) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // All weight on one branch: H(1) = 0.
  CHECK(theorem1_bound({{u}, {(0.0 * u).eval()}, 1.0}) == doctest::Approx(0.0).epsilon(1e-14));

  CHECK_THROWS_AS(theorem1_bound({{u}, {w}, 0.0}), std::domain_error);
}

TEST_CASE("exact cq conditional entropy anchors") {
  Vector u(2), w(2);
  u << 1.0, 0.0;
  w << 0.0, 1.0;
  // Orthogonal unit vectors: the environment reads the bit perfectly.
  CHECK(conditional_entropy_cq({{u}, {w}, 2.0}) == doctest::Approx(0.0).epsilon(1e-12));
  // Identical unit vectors: the environment learns nothing.
  CHECK(conditional_entropy_cq({{u}, {u}, 2.0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bound never exceeds the exact conditional entropy") {
  std::mt19937_64 eng(2024);
  double worst = -1.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int dim = 2 + static_cast<int>(eng() % 7);   // ancilla dimension <= 8
    const int pairs = 1 + static_cast<int>(eng() % 3);
    const CqDecomposition cq = random_blocks(eng, dim, pairs);
    const double bound = theorem1_bound(cq);
    const double exact = conditional_entropy_cq(cq);
    worst = std::max(worst, bound - exact);
  }
  CHECK(worst <= 1e-9);
}

TEST_SUITE_END();
