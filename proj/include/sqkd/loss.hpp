#pragma once

// Key-rate bound over a lossy (fiber) channel and maximal-distance search.
// Vacuum events concede full information to the adversary, so the loss-less
// entropy bound is scaled by the single-hop transmission probability while
// H(A|B) is recomputed for the detection rule that keeps A's vacuum outcomes.

#include "sqkd/statistics.hpp"

#include <iosfwd>
#include <vector>

namespace sqkd {

struct LossConfig {
  double alpha = 0.25;  // fiber attenuation, dB/km
  double distance = 0.0;  // km
  double q = 0.0;    // per-hop Z error, conditioned on detection
  double q_x = 0.0;  // round-trip reflection error, conditioned on detection
  Mode mode = Mode::Three;

  double loss_prob() const;  // p_l per hop
};

/// Per-hop loss probability 1 - 10^(-alpha d / 10).
double loss_probability(double alpha, double distance);

/// (1 - p_l) * S(A|E)-bound  -  H(A|B) under the lossy raw-key distribution.
double lossy_key_rate(const LossConfig& cfg);

/// Largest distance (km) with positive rate, bisection to width 0.01 km.
/// Returns 0 when no key survives even without loss, and +infinity when the
/// rate never turns negative (alpha = 0, or noise-free channels).
double max_distance(double q, double q_x, double alpha, Mode mode);

/// Distance sweep CSV: mode,q,q_x,alpha,d,p_l,rate.
void write_loss_sweep(std::ostream& out, const LossConfig& base,
                      const std::vector<double>& distances, char sep = ',');

}  // namespace sqkd
