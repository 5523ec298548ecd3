#include "sqkd/verify.hpp"

#include "sqkd/attack.hpp"
#include "sqkd/estimate.hpp"
#include "sqkd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace sqkd {

namespace {

double im_ip(const Vector& a, const Vector& b) { return a.dot(b).imag(); }
double re_ip(const Vector& a, const Vector& b) { return a.dot(b).real(); }

void track(double& worst, double residual) { worst = std::max(worst, std::abs(residual)); }

}  // namespace

bool FuzzReport::pass(double tol) const {
  return norm_bookkeeping <= 1e-10 && im_identities <= tol && q_identities <= tol &&
         y_block_identities <= tol && g0g3_identity <= tol && mode3_sum <= tol &&
         mode3_cross <= tol && theorem1_excess <= tol && mode2_excess <= tol &&
         feasibility_excess <= tol;
}

FuzzReport fuzz_identities(int attack_count, std::uint64_t seed, int ancilla_dim) {
  FuzzReport report;
  report.attacks = attack_count;

  for (int trial = 0; trial < attack_count; ++trial) {
    const AttackPair attack = random_attack(ancilla_dim, derive_seed(seed, trial));
    const EveVectors ev = eve_vectors(attack);
    const ChannelStatistics stats = observables(attack);

    // Unitarity bookkeeping: forward norms split across B's outcomes, return
    // norms split across A's outcomes.
    track(report.norm_bookkeeping,
          ev.forward[0].squaredNorm() + ev.forward[1].squaredNorm() - 1.0);
    track(report.norm_bookkeeping,
          ev.forward[2].squaredNorm() + ev.forward[3].squaredNorm() - 1.0);
    for (int j = 0; j < 4; ++j)
      track(report.norm_bookkeeping, ev.resend[j][0].squaredNorm() +
                                         ev.resend[j][1].squaredNorm() -
                                         ev.forward[j].squaredNorm());
    for (Prep i : kAllPreps) {
      track(report.norm_bookkeeping,
            stats.forward_prob(i, 0) + stats.forward_prob(i, 1) - 1.0);
      for (int b = 0; b < 3; ++b) {
        const Outcome k0 = static_cast<Outcome>(2 * b);
        const Outcome k1 = complement_of(k0);
        track(report.norm_bookkeeping,
              stats.reflect_prob(i, k0) + stats.reflect_prob(i, k1) - 1.0);
        for (int j = 0; j < 2; ++j)
          if (stats.has_resend(i, j, k0))
            track(report.norm_bookkeeping,
                  stats.resend_prob(i, j, k0) + stats.resend_prob(i, j, k1) - 1.0);
      }
    }

    // Y-outcome rows measure the imaginary parts within each return branch.
    const Prep zp[2] = {Prep::ZeroZ, Prep::OneZ};
    for (int j = 0; j < 4; ++j) {
      const Prep i = zp[j / 2];
      const int b = j % 2;
      track(report.im_identities,
            im_ip(ev.resend[j][0], ev.resend[j][1]) -
                stats.forward_prob(i, b) * (stats.resend_prob(i, b, Outcome::ZeroY) - 0.5));
    }

    // q identities: observable combination vs sum of conjugate cross terms.
    auto q_obs = [&](int j) {
      return 2.0 * stats.forward_prob(Prep::PlusX, j) *
                 stats.resend_prob(Prep::PlusX, j, Outcome::PlusX) -
             stats.forward_prob(Prep::PlusX, j) +
             stats.forward_prob(Prep::ZeroZ, j) *
                 (0.5 - stats.resend_prob(Prep::ZeroZ, j, Outcome::PlusX)) +
             stats.forward_prob(Prep::OneZ, j) *
                 (0.5 - stats.resend_prob(Prep::OneZ, j, Outcome::PlusX));
    };
    const double q1_direct = re_ip(ev.resend[0][0], ev.resend[2][1]) +
                             re_ip(ev.resend[0][1], ev.resend[2][0]);
    const double q2_direct = re_ip(ev.resend[1][0], ev.resend[3][1]) +
                             re_ip(ev.resend[1][1], ev.resend[3][0]);
    track(report.q_identities, q_obs(0) - q1_direct);
    track(report.q_identities, q_obs(1) - q2_direct);

    // 0Y-preparation rows: the displayed Z-outcome identities and the full
    // Y-outcome expression, per return branch b.
    for (int b = 0; b < 2; ++b) {
      const int lo = b, hi = 2 + b;
      const double p_y = stats.forward_prob(Prep::ZeroY, b);
      const double n_lo = stats.forward_prob(Prep::ZeroZ, b);
      const double n_hi = stats.forward_prob(Prep::OneZ, b);
      auto nrm = [&](int j, int k) { return ev.resend[j][k].squaredNorm(); };
      track(report.y_block_identities,
            im_ip(ev.resend[lo][0], ev.resend[hi][0]) -
                (0.5 * (nrm(lo, 0) + nrm(hi, 0)) -
                 p_y * stats.resend_prob(Prep::ZeroY, b, Outcome::ZeroZ)));
      track(report.y_block_identities,
            im_ip(ev.resend[lo][1], ev.resend[hi][1]) -
                (0.5 * (nrm(lo, 1) + nrm(hi, 1)) -
                 p_y * stats.resend_prob(Prep::ZeroY, b, Outcome::OneZ)));
      const double lhs = 4.0 * p_y * stats.resend_prob(Prep::ZeroY, b, Outcome::ZeroY);
      const double rhs =
          n_lo + n_hi +
          2.0 * (re_ip(ev.resend[lo][0], ev.resend[hi][1]) -
                 re_ip(ev.resend[lo][1], ev.resend[hi][0])) +
          2.0 * (im_ip(ev.resend[lo][0], ev.resend[lo][1]) -
                 im_ip(ev.resend[lo][0], ev.resend[hi][0])) +
          2.0 * (im_ip(ev.resend[hi][0], ev.resend[hi][1]) -
                 im_ip(ev.resend[lo][1], ev.resend[hi][1]));
      track(report.y_block_identities, lhs - rhs);
    }

    // Reflection-path identity for Re<g0|g3>.
    const double g0g3_obs =
        1.0 - stats.reflect_prob(Prep::PlusX, Outcome::MinusX) -
        stats.reflect_prob(Prep::ZeroY, Outcome::OneY) -
        0.5 * (stats.reflect_prob(Prep::ZeroZ, Outcome::PlusX) +
               stats.reflect_prob(Prep::OneZ, Outcome::PlusX) +
               stats.reflect_prob(Prep::ZeroZ, Outcome::ZeroY) +
               stats.reflect_prob(Prep::OneZ, Outcome::ZeroY) - 2.0);
    track(report.g0g3_identity, g0g3_obs - re_ip(ev.reflect[0], ev.reflect[3]));

    // Estimation completeness and soundness.
    const double lambda1 = re_ip(ev.resend[0][0], ev.resend[3][1]);
    const double lambda2 = re_ip(ev.resend[1][0], ev.resend[2][1]);
    const InnerProductBounds m3 = mode3_bounds(stats);
    track(report.mode3_sum, m3.lambda_sum - (lambda1 + lambda2));
    if (m3.cross_re[0])
      track(report.mode3_cross, *m3.cross_re[0] - re_ip(ev.resend[0][0], ev.resend[2][1]));
    if (m3.cross_re[1])
      track(report.mode3_cross, *m3.cross_re[1] - re_ip(ev.resend[1][0], ev.resend[3][1]));

    const InnerProductBounds m2 = mode2_bounds(stats);
    report.mode2_excess = std::max(report.mode2_excess, m2.lambda_sum - (lambda1 + lambda2));
    report.feasibility_excess =
        std::max({report.feasibility_excess, std::abs(m2.lambda_sum) - (m2.cs1 + m2.cs2),
                  std::abs(m3.lambda_sum) - (m3.cs1 + m3.cs2)});

    // Entropy-bound soundness on the key state.
    const KeyState ks = key_state(attack);
    const double bound = theorem1_bound(ks.to_cq());
    const double exact = exact_conditional_entropy(attack);
    report.theorem1_excess = std::max(report.theorem1_excess, bound - exact);
  }
  return report;
}

void print_report(const FuzzReport& report, std::ostream& out) {
  out << "attacks fuzzed:                 " << report.attacks << "\n";
  out << "norm bookkeeping residual:      " << report.norm_bookkeeping << "\n";
  out << "Im-identity residual:           " << report.im_identities << "\n";
  out << "q-identity residual:            " << report.q_identities << "\n";
  out << "Y-block identity residual:      " << report.y_block_identities << "\n";
  out << "reflection identity residual:   " << report.g0g3_identity << "\n";
  out << "three-basis sum residual:       " << report.mode3_sum << "\n";
  out << "three-basis cross residual:     " << report.mode3_cross << "\n";
  out << "entropy bound excess:           " << report.theorem1_excess << "\n";
  out << "two-basis bound excess:         " << report.mode2_excess << "\n";
  out << "feasibility excess:             " << report.feasibility_excess << "\n";
  out << (report.pass() ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "\n";
}

}  // namespace sqkd
