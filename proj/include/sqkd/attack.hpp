#pragma once

// Exact representation of a collective attack on the two-way channel and the
// derived quantities: Eve's conditional states, every observable statistic,
// the post-selected key state, and the exact conditional entropy.

#include "sqkd/qmath.hpp"
#include "sqkd/statistics.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace sqkd {

/// A pair of unitaries (one per channel direction) acting on the transit qubit
/// tensored with Eve's ancilla, plus her initial pure ancilla state.
///
/// Basis ordering throughout: |t> (x) |ancilla>, index t * ancilla_dim + a.
struct AttackPair {
  Eigen::Index ancilla_dim = 0;  // d_E
  Matrix forward_unitary;        // acts on the A->B hop, size 2 d_E
  Matrix reverse_unitary;        // acts on the B->A hop, size 2 d_E
  Vector ancilla;                // |chi>, size d_E

  /// Throws std::domain_error when the unitarity residual exceeds 1e-10 or the
  /// ancilla norm deviates from 1 by more than 1e-12.
  void validate() const;
};

/// Eve's conditional states, labeled by what the honest parties did.
///
/// forward[j]: her state after the first hop, j = 2 a + b for preparation bit
/// a and B's measurement outcome b (j in {0,1} for |0> sent, {2,3} for |1>).
/// resend[j][k]: after the second hop, when B resent his outcome (= j mod 2)
/// and A finally measured k in the Z basis.
/// reflect[i]: the one-way-channel picture of the reflection path, i.e. the
/// blocks of (U_R U_F)|a, chi>; reflect[0..1] for a = 0, reflect[2..3] for a = 1.
struct EveVectors {
  std::array<Vector, 4> forward;
  std::array<std::array<Vector, 2>, 4> resend;
  std::array<Vector, 4> reflect;
};

/// The four Eve vectors of the post-selected key state, with normalization N.
/// Theorem pairing: (keep_00, keep_11) and (flip_01, flip_10).
struct KeyState {
  Vector keep_00;  // A sent 0, B got 0, A re-measured 0
  Vector keep_11;  // A sent 1, B got 1, A re-measured 1
  Vector flip_01;  // A sent 0, B got 1, A re-measured 0
  Vector flip_10;  // A sent 1, B got 0, A re-measured 1
  double normalization = 0.0;  // N = half the sum of the four squared norms

  /// As a cq-decomposition with weight 1/(2N), ready for the entropy bound.
  CqDecomposition to_cq() const;
};

EveVectors eve_vectors(const AttackPair& attack);

/// Every observable row, computed by exact state evolution. Conditional rows
/// whose conditioning probability is below 1e-12 come back absent.
ChannelStatistics observables(const AttackPair& attack);

/// Throws std::domain_error when N < 1e-12 (no key iterations survive).
KeyState key_state(const AttackPair& attack);

/// Exact S(A|E) of the key state, by eigendecomposition.
double exact_conditional_entropy(const AttackPair& attack);

/// Independent depolarizing noise of strength q on each hop, realized as a
/// Stinespring dilation with a fresh 4-dimensional sub-ancilla per hop
/// (composite d_E = 16). Reproduces the symmetric statistics with
/// q_forward = q_return = q and q_x = 2 q (1 - q).
AttackPair depolarizing_attack(double q);

/// Haar-style random attack: orthonormalized seeded Gaussian matrices.
/// Deterministic per (ancilla_dim, seed).
AttackPair random_attack(int ancilla_dim, std::uint64_t seed);

/// JSON document {"d_E":..., "chi":[[re,im],...], "U_F":[[re,im],...] (row-major), "U_R":[...]}.
void write_attack_json(const AttackPair& attack, std::ostream& out);
AttackPair read_attack_json(std::istream& in);
AttackPair load_attack_file(const std::string& path);

}  // namespace sqkd
