#pragma once

// Oracle self-checks: every algebraic identity tying observable statistics to
// Eve's inner products, fuzzed over random attacks, plus soundness of the
// entropy bound against the exact conditional entropy.

#include <cstdint>
#include <iosfwd>

namespace sqkd {

struct FuzzReport {
  int attacks = 0;
  // Worst absolute residuals over the corpus.
  double norm_bookkeeping = 0.0;    // sum_k |e^k_(i,j)|^2 = |e_j|^2 and row normalization
  double im_identities = 0.0;       // Y-outcome rows vs Im<e^0|e^1>
  double q_identities = 0.0;        // q_1, q_2 observable form vs inner-product form
  double y_block_identities = 0.0;  // 0Y-preparation rows vs the recovered inner products
  double g0g3_identity = 0.0;       // reflection-path Re<g0|g3> expression
  double mode3_sum = 0.0;           // recovered Lambda_1 + Lambda_2 vs direct value
  double mode3_cross = 0.0;         // recovered cross terms vs direct inner products
  double theorem1_excess = 0.0;     // bound minus exact entropy (soundness, <= tol)
  double mode2_excess = 0.0;        // mode-2 lambda_sum minus true sum (soundness, <= tol)
  double feasibility_excess = 0.0;  // |lambda_sum| minus (cs1 + cs2)

  bool pass(double tol = 1e-9) const;
};

/// Runs every check against `attack_count` seeded random attacks.
FuzzReport fuzz_identities(int attack_count, std::uint64_t seed, int ancilla_dim = 4);

void print_report(const FuzzReport& report, std::ostream& out);

}  // namespace sqkd
