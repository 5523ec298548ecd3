#pragma once

// Devetak-Winter key-rate lower bound: worst-case entropy minimization over
// the free inner product, H(A|B), effective rate, and noise thresholds.

#include "sqkd/estimate.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sqkd {

/// Observed statistics are consistent with no attack at all.
struct InfeasibleStatisticsError : std::runtime_error {
  explicit InfeasibleStatisticsError(const std::string& what) : std::runtime_error(what) {}
};

struct KeyRateReport {
  double entropy_bound = 0.0;    // lower bound on S(A|E)
  double conditional_h = 0.0;    // H(A|B)
  double rate = 0.0;             // r = entropy_bound - conditional_h
  double effective_rate = 0.0;   // r~ = p_acc * r / 2
  double acceptance_prob = 0.0;  // p_acc
  double lambda1_worst = 0.0;
  double lambda2_worst = 0.0;
  double key_error = 0.0;        // raw-key disagreement probability
};

enum class ChannelKind { Independent, Dependent, Custom };

/// Symmetric two-parameter channel family used for evaluation: per-hop Z
/// error q, and round-trip reflection error q_x derived from the kind.
struct ChannelFamily {
  ChannelKind kind = ChannelKind::Independent;
  double q = 0.0;
  double q_x = 0.0;

  static ChannelFamily independent(double q) {
    return {ChannelKind::Independent, q, 2.0 * q * (1.0 - q)};
  }
  static ChannelFamily dependent(double q) { return {ChannelKind::Dependent, q, q}; }
  static ChannelFamily custom(double q, double q_x) { return {ChannelKind::Custom, q, q_x}; }

  ChannelStatistics statistics(Mode mode) const;
};

const char* to_string(ChannelKind kind);

/// H(A|B) of the post-selected raw-key distribution implied by the norms.
double h_a_given_b(const NormTable& norms);

struct EntropyBoundResult {
  double value = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Minimizes the two-pair entropy bound over Lambda_2 in the feasible
/// interval, with Lambda_1 = lambda_sum - Lambda_2 (2001-point scan plus
/// golden-section refinement; the objective can be bimodal near thresholds,
/// so a local search alone is not trusted).
///
/// With fixed_sum = false the sum constraint is relaxed to
/// Lambda_1 + Lambda_2 >= lambda_sum and both parameters are searched; this
/// is a sensitivity diagnostic, not the default evaluation.
EntropyBoundResult entropy_lower_bound(const InnerProductBounds& bounds, bool fixed_sum = true);

/// Full report for one set of observed statistics. p_acc defaults to the
/// acceptance probability implied by the norms (equal to their N).
KeyRateReport key_rate(Mode mode, const ChannelStatistics& stats,
                       std::optional<double> p_acc = std::nullopt);

/// Largest q with positive rate on the symmetric family, by bisection on
/// [0, 0.5] to width 1e-5.
double noise_threshold(Mode mode, ChannelKind kind);

/// Sweep CSV: mode,kind,q,q_x,s_ae_lower,h_ab,rate,effective_rate,lambda2_worst,log10_rate
/// (log10_rate blank when the rate is not positive). Rows are emitted in grid
/// order; evaluation parallelizes across grid points.
void write_keyrate_sweep(std::ostream& out, Mode mode, ChannelKind kind,
                         const std::vector<double>& q_grid, char sep = ',',
                         std::optional<double> q_x_custom = std::nullopt);

/// Evenly spaced grid of n points on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int n);

}  // namespace sqkd
