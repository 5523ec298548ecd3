#include "sqkd/keyrate.hpp"

#include "sqkd/parallel.hpp"
#include "sqkd/qmath.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace sqkd {

ChannelStatistics ChannelFamily::statistics(Mode mode) const {
  return symmetric_statistics(q, q, q_x, mode);
}

const char* to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Independent: return "independent";
    case ChannelKind::Dependent: return "dependent";
    case ChannelKind::Custom: return "custom";
  }
  return "?";
}

double h_a_given_b(const NormTable& norms) {
  const double two_n = 2.0 * norms.normalization;
  if (!(two_n > 0.0)) throw std::domain_error("h_a_given_b: normalization must be positive");
  const double p00 = norms.keep_00() / two_n;
  const double p01 = norms.flip_01() / two_n;
  const double p10 = norms.flip_10() / two_n;
  const double p11 = norms.keep_11() / two_n;
  const double joint = shannon_entropy({p00, p01, p10, p11});
  return joint - binary_entropy(p00 + p10);
}

namespace {

/// One pair's contribution to the entropy bound, weight (a+b)/(2N).
double pair_term(double a, double b, double re, double two_n) {
  const double ab = a + b;
  if (ab <= 1e-300) return 0.0;
  double lambda = 0.5 * (1.0 + std::sqrt((a - b) * (a - b) + 4.0 * re * re) / ab);
  lambda = std::min(1.0, std::max(0.5, lambda));
  return (ab / two_n) * (binary_entropy(a / ab) - binary_entropy(lambda));
}

struct Objective {
  const InnerProductBounds& b;
  double two_n;
  double operator()(double l1, double l2) const {
    return pair_term(b.norms.keep_00(), b.norms.keep_11(), l1, two_n) +
           pair_term(b.norms.flip_01(), b.norms.flip_10(), l2, two_n);
  }
};

/// Golden-section minimization of f on [lo, hi] down to the given width.
template <typename F>
double golden_minimize(F&& f, double lo, double hi, double width) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > width) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

EntropyBoundResult entropy_lower_bound(const InnerProductBounds& bounds, bool fixed_sum) {
  const double two_n = 2.0 * bounds.norms.normalization;
  if (!(two_n > 0.0))
    throw std::domain_error("entropy_lower_bound: normalization must be positive");
  const Objective obj{bounds, two_n};
  const double s = bounds.lambda_sum;

  if (fixed_sum) {
    const double lo = std::max(-bounds.cs2, s - bounds.cs1);
    const double hi = std::min(bounds.cs2, s + bounds.cs1);
    if (lo > hi + 1e-12) {
      std::ostringstream msg;
      msg << "entropy_lower_bound: empty feasible interval for Lambda_2 "
          << "(lambda_sum=" << s << ", cs1=" << bounds.cs1 << ", cs2=" << bounds.cs2 << ")";
      throw InfeasibleStatisticsError(msg.str());
    }
    auto f = [&](double l2) { return obj(s - l2, l2); };
    constexpr int kScan = 2001;
    double best_l2 = lo, best = f(lo);
    if (hi > lo) {
      for (int i = 0; i < kScan; ++i) {
        const double l2 = lo + (hi - lo) * i / (kScan - 1);
        const double v = f(l2);
        if (v < best) {
          best = v;
          best_l2 = l2;
        }
      }
      const double step = (hi - lo) / (kScan - 1);
      const double a = std::max(lo, best_l2 - step);
      const double b = std::min(hi, best_l2 + step);
      const double refined = golden_minimize(f, a, b, 1e-10);
      if (f(refined) < best) best_l2 = refined;
    }
    return {std::max(0.0, f(best_l2)), s - best_l2, best_l2};
  }

  // Sensitivity variant: Lambda_1 + Lambda_2 >= lambda_sum instead of equality.
  // The equality line is part of the region, so its optimum seeds the search.
  constexpr int kGrid = 501;
  double best = std::numeric_limits<double>::infinity();
  double best_l1 = 0.0, best_l2 = 0.0;
  bool feasible = false;
  {
    const EntropyBoundResult on_line = entropy_lower_bound(bounds, true);
    best = obj(on_line.lambda1, on_line.lambda2);
    best_l1 = on_line.lambda1;
    best_l2 = on_line.lambda2;
    feasible = true;
  }
  for (int i = 0; i < kGrid; ++i) {
    const double l1 = -bounds.cs1 + 2.0 * bounds.cs1 * i / (kGrid - 1);
    const double l2_min = std::max(-bounds.cs2, s - l1);
    if (l2_min > bounds.cs2 + 1e-12) continue;
    for (int j = 0; j < kGrid; ++j) {
      const double l2 = l2_min + (bounds.cs2 - l2_min) * j / (kGrid - 1);
      const double v = obj(l1, l2);
      feasible = true;
      if (v < best) {
        best = v;
        best_l1 = l1;
        best_l2 = l2;
      }
    }
  }
  if (!feasible)
    throw InfeasibleStatisticsError("entropy_lower_bound: empty feasible region");
  for (int round = 0; round < 3; ++round) {
    best_l1 = golden_minimize([&](double l1) { return obj(l1, best_l2); },
                              std::max(-bounds.cs1, s - best_l2), bounds.cs1, 1e-10);
    best_l2 = golden_minimize([&](double l2) { return obj(best_l1, l2); },
                              std::max(-bounds.cs2, s - best_l1), bounds.cs2, 1e-10);
  }
  return {std::max(0.0, obj(best_l1, best_l2)), best_l1, best_l2};
}

KeyRateReport key_rate(Mode mode, const ChannelStatistics& stats, std::optional<double> p_acc) {
  const InnerProductBounds bounds = mode == Mode::Two ? mode2_bounds(stats) : mode3_bounds(stats);
  const EntropyBoundResult eb = entropy_lower_bound(bounds);
  KeyRateReport report;
  report.entropy_bound = eb.value;
  report.conditional_h = h_a_given_b(bounds.norms);
  report.rate = report.entropy_bound - report.conditional_h;
  report.acceptance_prob = p_acc.value_or(bounds.norms.normalization);
  report.effective_rate = 0.5 * report.acceptance_prob * report.rate;
  report.lambda1_worst = eb.lambda1;
  report.lambda2_worst = eb.lambda2;
  // Grouped so the symmetric case reduces to exactly q^2 / (q^2 + (1-q)^2).
  const double flips = bounds.norms.flip_01() + bounds.norms.flip_10();
  const double keeps = bounds.norms.keep_00() + bounds.norms.keep_11();
  report.key_error = flips / (flips + keeps);
  return report;
}

namespace {

ChannelFamily family_at(ChannelKind kind, double q, std::optional<double> q_x_custom) {
  switch (kind) {
    case ChannelKind::Independent: return ChannelFamily::independent(q);
    case ChannelKind::Dependent: return ChannelFamily::dependent(q);
    case ChannelKind::Custom:
      if (!q_x_custom) throw std::invalid_argument("custom channel needs an explicit q_x");
      return ChannelFamily::custom(q, *q_x_custom);
  }
  throw std::invalid_argument("bad channel kind");
}

}  // namespace

double noise_threshold(Mode mode, ChannelKind kind) {
  if (kind == ChannelKind::Custom)
    throw std::invalid_argument("noise_threshold: kind must be independent or dependent");
  auto rate_at = [&](double q) {
    return key_rate(mode, family_at(kind, q, std::nullopt).statistics(mode)).rate;
  };
  double lo = 1e-6;
  if (!(rate_at(lo) > 0.0))
    throw std::runtime_error("noise_threshold: rate not positive at q = 1e-6");
  double hi = 0.5;
  if (rate_at(hi) > 0.0) return hi;
  while (hi - lo > 1e-5) {
    const double mid = 0.5 * (lo + hi);
    (rate_at(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return grid;
}

void write_keyrate_sweep(std::ostream& out, Mode mode, ChannelKind kind,
                         const std::vector<double>& q_grid, char sep,
                         std::optional<double> q_x_custom) {
  std::vector<KeyRateReport> rows(q_grid.size());
  std::vector<double> q_x(q_grid.size());
  parallel_for(q_grid.size(), [&](std::size_t i) {
    const ChannelFamily fam = family_at(kind, q_grid[i], q_x_custom);
    q_x[i] = fam.q_x;
    rows[i] = key_rate(mode, fam.statistics(mode));
  });
  out << "mode" << sep << "kind" << sep << "q" << sep << "q_x" << sep << "s_ae_lower" << sep
      << "h_ab" << sep << "rate" << sep << "effective_rate" << sep << "lambda2_worst" << sep
      << "log10_rate\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    const auto& r = rows[i];
    out << static_cast<int>(mode) << sep << to_string(kind) << sep << fmt(q_grid[i]) << sep
        << fmt(q_x[i]) << sep << fmt(r.entropy_bound) << sep << fmt(r.conditional_h) << sep
        << fmt(r.rate) << sep << fmt(r.effective_rate) << sep << fmt(r.lambda2_worst) << sep;
    if (r.rate > 0.0) out << fmt(std::log10(r.rate));
    out << "\n";
  }
}

}  // namespace sqkd
