#include "sqkd/estimate.hpp"

#include <cmath>
#include <stdexcept>

namespace sqkd {

namespace {

constexpr double kConditioningFloor = 1e-12;

Prep prep_of_label(int j) { return j < 2 ? Prep::ZeroZ : Prep::OneZ; }

/// Joint mass p[A->B](i,j) * p[A->A](i,j,k). Zero when the conditioning
/// probability vanishes, regardless of whether the conditional row exists;
/// otherwise an absent row raises MissingStatisticError.
double mass(const ChannelStatistics& s, Prep i, int j, Outcome k) {
  const double p = s.forward_prob(i, j);
  if (p < kConditioningFloor) return 0.0;
  return p * s.resend_prob(i, j, k);
}

double q_value(const ChannelStatistics& s, int j) {
  return 2.0 * mass(s, Prep::PlusX, j, Outcome::PlusX) - s.forward_prob(Prep::PlusX, j) +
         0.5 * s.forward_prob(Prep::ZeroZ, j) - mass(s, Prep::ZeroZ, j, Outcome::PlusX) +
         0.5 * s.forward_prob(Prep::OneZ, j) - mass(s, Prep::OneZ, j, Outcome::PlusX);
}

/// Re<g0|g3> of the reflection path from observable rows only. Expanding the
/// six outcome probabilities in terms of the reflection vectors g_i and using
/// <g0|g2> + <g1|g3> = 0 gives
///   Re<g0|g3> = 1 - p(+,R,-) - p(0Y,R,1Y)
///               - (p(0,R,+) + p(1,R,+) + p(0,R,0Y) + p(1,R,0Y) - 2) / 2.
double reflect_g0g3(const ChannelStatistics& s) {
  return 1.0 - s.reflect_prob(Prep::PlusX, Outcome::MinusX) -
         s.reflect_prob(Prep::ZeroY, Outcome::OneY) -
         0.5 * (s.reflect_prob(Prep::ZeroZ, Outcome::PlusX) +
                s.reflect_prob(Prep::OneZ, Outcome::PlusX) +
                s.reflect_prob(Prep::ZeroZ, Outcome::ZeroY) +
                s.reflect_prob(Prep::OneZ, Outcome::ZeroY) - 2.0);
}

/// Joint mass for the 0Y preparation, same zero-conditioning convention.
double y_mass(const ChannelStatistics& s, int j, Outcome k) {
  const double p = s.forward_prob(Prep::ZeroY, j);
  if (p < kConditioningFloor) return 0.0;
  return p * s.resend_prob(Prep::ZeroY, j, k);
}

/// Exact Re<e^0_lo|e^1_hi> for the block where B resent bit b (labels lo = b,
/// hi = 2 + b). The sum of the two conjugate cross terms is q_b; their
/// difference comes out of the 0Y-preparation rows once the four observable
/// imaginary parts are subtracted.
double block_cross_re(const ChannelStatistics& s, const NormTable& norms, int b, double q_b) {
  const int lo = b, hi = 2 + b;
  const double fwd_lo = s.forward_prob(Prep::ZeroZ, b);
  const double fwd_hi = s.forward_prob(Prep::OneZ, b);
  const double im_lo = mass(s, Prep::ZeroZ, b, Outcome::ZeroY) - 0.5 * fwd_lo;
  const double im_hi = mass(s, Prep::OneZ, b, Outcome::ZeroY) - 0.5 * fwd_hi;
  const double im_cross0 =
      0.5 * (norms.value[lo][0] + norms.value[hi][0]) - y_mass(s, b, Outcome::ZeroZ);
  const double im_cross1 =
      0.5 * (norms.value[lo][1] + norms.value[hi][1]) - y_mass(s, b, Outcome::OneZ);
  const double diff = 0.5 * (4.0 * y_mass(s, b, Outcome::ZeroY) - fwd_lo - fwd_hi) -
                      (im_lo - im_cross0) - (im_hi - im_cross1);
  return 0.5 * (q_b + diff);
}

void clip_feasible(InnerProductBounds& b) {
  const double cap = b.cs1 + b.cs2;
  const double clamped = std::min(cap, std::max(-cap, b.lambda_sum));
  if (std::abs(clamped - b.lambda_sum) > 1e-12) b.clipped = true;
  b.lambda_sum = clamped;
}

}  // namespace

NormTable norms_from_statistics(const ChannelStatistics& stats) {
  NormTable t;
  for (int j = 0; j < 4; ++j) {
    const Prep i = prep_of_label(j);
    const int b = j % 2;
    for (int k = 0; k < 2; ++k)
      t.value[j][k] = mass(stats, i, b, k == 0 ? Outcome::ZeroZ : Outcome::OneZ);
  }
  t.normalization = 0.5 * (t.keep_00() + t.keep_11() + t.flip_01() + t.flip_10());
  return t;
}

InnerProductBounds mode2_bounds(const ChannelStatistics& stats) {
  InnerProductBounds b;
  b.norms = norms_from_statistics(stats);
  b.q1 = q_value(stats, 0);
  b.q2 = q_value(stats, 1);
  b.cs1 = std::sqrt(b.norms.keep_00() * b.norms.keep_11());
  b.cs2 = std::sqrt(b.norms.flip_01() * b.norms.flip_10());
  // The reflection X error pins Lambda_1 + Lambda_2 up to two cross terms that
  // two-basis statistics cannot see; replacing those by their Cauchy-Schwarz
  // maxima leaves a sound lower bound.
  b.lambda_sum = 2.0 - 2.0 * stats.reflect_prob(Prep::PlusX, Outcome::MinusX) -
                 (b.q1 + b.q2 + stats.reflect_prob(Prep::ZeroZ, Outcome::PlusX) +
                  stats.reflect_prob(Prep::OneZ, Outcome::PlusX) +
                  std::sqrt(b.norms.value[0][1] * b.norms.value[3][0]) +
                  std::sqrt(b.norms.value[1][1] * b.norms.value[2][0]));
  b.lambda_sum_is_exact = false;
  clip_feasible(b);
  return b;
}

InnerProductBounds mode3_bounds(const ChannelStatistics& stats) {
  if (stats.mode != Mode::Three)
    throw std::domain_error("mode3_bounds: statistics carry no third-basis rows");

  InnerProductBounds b;
  b.norms = norms_from_statistics(stats);
  b.q1 = q_value(stats, 0);
  b.q2 = q_value(stats, 1);
  b.cs1 = std::sqrt(b.norms.keep_00() * b.norms.keep_11());
  b.cs2 = std::sqrt(b.norms.flip_01() * b.norms.flip_10());

  double g03 = 0.0;
  try {
    g03 = reflect_g0g3(stats);
  } catch (const MissingStatisticError&) {
    // Without the Y reflection rows the exact route is gone entirely.
    return mode2_bounds(stats);
  }

  b.lambda_sum = g03;
  b.lambda_sum_is_exact = true;
  const std::array<double, 2> q_b = {b.q1, b.q2};
  const std::array<double, 2> cross_cap = {
      std::sqrt(b.norms.value[0][0] * b.norms.value[2][1]),
      std::sqrt(b.norms.value[1][0] * b.norms.value[3][1])};
  for (int block = 0; block < 2; ++block) {
    try {
      const double c = block_cross_re(stats, b.norms, block, q_b[block]);
      b.cross_re[block] = c;
      b.lambda_sum -= c;
    } catch (const MissingStatisticError&) {
      // Degenerate Y rows for this block: bound the cross term by
      // Cauchy-Schwarz instead. Still sound, merely looser.
      b.lambda_sum -= cross_cap[block];
      b.lambda_sum_is_exact = false;
    }
  }
  clip_feasible(b);
  return b;
}

}  // namespace sqkd
