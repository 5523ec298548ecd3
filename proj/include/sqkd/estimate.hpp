#pragma once

// Converts observable statistics into constraints on the inner products of
// Eve's conditional states. MODE-2 uses two-basis (Z, X) statistics and
// Cauchy-Schwarz; MODE-3 adds Y-basis rows and recovers the constraint sum
// exactly.

#include "sqkd/statistics.hpp"

#include <array>
#include <optional>

namespace sqkd {

/// Squared norms |e^k_j|^2 of the eight return-path conditional states,
/// indexed by the forward label j (0,1 for |0> sent; 2,3 for |1> sent; B's
/// resent bit is j mod 2) and A's final Z outcome k. Each is a product of a
/// forward and a return probability.
struct NormTable {
  std::array<std::array<double, 2>, 4> value{};
  double normalization = 0.0;  // N = half the sum of the four key-branch norms

  double keep_00() const { return value[0][0]; }  // key branch A=0, B=0
  double keep_11() const { return value[3][1]; }  // key branch A=1, B=1
  double flip_01() const { return value[1][0]; }  // key branch A=0, B=1
  double flip_10() const { return value[2][1]; }  // key branch A=1, B=0
};

/// Constraints on Lambda_1 = Re<keep_00|keep_11> and Lambda_2 = Re<flip_01|flip_10>.
struct InnerProductBounds {
  NormTable norms;
  double lambda_sum = 0.0;          // value (MODE-3) or lower bound (MODE-2) for Lambda_1 + Lambda_2
  bool lambda_sum_is_exact = false;
  double cs1 = 0.0;                 // |Lambda_1| <= cs1
  double cs2 = 0.0;                 // |Lambda_2| <= cs2
  double q1 = 0.0, q2 = 0.0;
  std::array<std::optional<double>, 2> cross_re{};  // Re<e^0_(0,0)|e^1_(0,2)>, Re<e^0_(1,1)|e^1_(1,3)> (MODE-3)
  bool clipped = false;             // lambda_sum was clipped into [-(cs1+cs2), cs1+cs2]
};

/// The eight norms and N. Forward rows with probability below 1e-12 contribute
/// zero even when the conditional return row is absent; otherwise a missing
/// row raises MissingStatisticError naming the statistic.
NormTable norms_from_statistics(const ChannelStatistics& stats);

/// Two-basis estimation: lambda_sum is the general lower bound with the two
/// unknown cross terms replaced by their Cauchy-Schwarz maxima.
InnerProductBounds mode2_bounds(const ChannelStatistics& stats);

/// Three-basis estimation: recovers the imaginary parts from Y-basis rows,
/// solves the sum/difference system for both cross terms, and sets lambda_sum
/// exactly. Falls back to Cauchy-Schwarz (mode2-style) for any term whose
/// Y-basis rows are absent; lambda_sum_is_exact reports which happened.
InnerProductBounds mode3_bounds(const ChannelStatistics& stats);

}  // namespace sqkd
