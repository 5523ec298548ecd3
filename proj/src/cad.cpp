#include "sqkd/cad.hpp"

#include "sqkd/parallel.hpp"
#include "sqkd/qmath.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sqkd {

void CadConfig::validate() const {
  if (block_size < 1) throw std::domain_error("cad: block size must be >= 1");
  if (!(q >= 0.0 && q <= 0.5)) throw std::domain_error("cad: q outside [0, 0.5]");
}

double cad_error(int block_size, double q) {
  if (block_size < 1) throw std::domain_error("cad_error: block size must be >= 1");
  if (!(q >= 0.0 && q <= 0.5)) throw std::domain_error("cad_error: q outside [0, 0.5]");
  if (q == 0.0) return 0.0;
  if (q == 0.5) return 0.5;
  // Direct ratio while the powers stay in normal range.
  double a = 1.0, b = 1.0;
  for (int i = 0; i < block_size && a >= std::numeric_limits<double>::min(); ++i) {
    a *= q;
    b *= 1.0 - q;
  }
  if (a >= std::numeric_limits<double>::min()) return a / (a + b);
  // q^C underflowed: e_C = 1 / (1 + ((1-q)/q)^C) in log space.
  const double t = block_size * (std::log1p(-q) - std::log(q));
  return t > 700.0 ? std::exp(-t) : 1.0 / (1.0 + std::exp(t));
}

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;

/// 1 - h((1 - x)/2) for x in [-1, 1], even in x. Direct evaluation dies of
/// cancellation once x^2 drops below machine epsilon, so small |x| switches to
/// the series sum_k x^(2k) / (k (2k-1)) / (2 ln 2).
double entropy_deficit(double x) {
  x = std::abs(x);
  if (x >= 1.0) return 1.0;
  if (x > 0.125)
    return 0.5 * ((1.0 + x) * std::log1p(x) + (1.0 - x) * std::log1p(-x)) / kLn2;
  if (x == 0.0) return 0.0;
  const double x2 = x * x;
  double term = x2;
  double sum = 0.0;
  for (int k = 1; k < 60; ++k) {
    const double contrib = term / (k * (2 * k - 1));
    sum += contrib;
    if (contrib < 1e-30 * sum) break;
    term *= x2;
  }
  return 0.5 * sum / kLn2;
}

double pow_int(double base, int exp) {
  // |base| <= 1 here; plain pow is fine, this only pins the corner cases.
  if (base == 0.0) return exp == 0 ? 1.0 : 0.0;
  return std::pow(base, exp);
}

struct Eigenpair {
  double eq, diff;
};

Eigenpair four_state_pair(double q, double lambda4) {
  Eigenpair p;
  p.eq = (1.0 - 3.0 * q + 2.0 * lambda4) / (1.0 - q);
  // At q = 0 the quotient is 0/0; its coefficient e_C also vanishes, so any
  // finite value works -- take 0 by continuity.
  p.diff = q == 0.0 ? 0.0 : std::abs(q - 2.0 * lambda4) / q;
  return p;
}

/// S(A|E) and the (possibly negative) raw rate for given eigenvalues.
struct Evaluation {
  double entropy, raw_rate;
};

Evaluation evaluate(int c, double e_c, const Eigenpair& pair) {
  const double entropy = (1.0 - e_c) * entropy_deficit(pow_int(pair.eq, c)) +
                         e_c * entropy_deficit(pow_int(pair.diff, c));
  return {entropy, entropy - binary_entropy(e_c)};
}

}  // namespace

CadReport cad_rate(const CadConfig& cfg) {
  cfg.validate();
  const double e_c = cad_error(cfg.block_size, cfg.q);
  CadReport report;
  report.error_rate = e_c;

  if (cfg.basis == BasisMode::SixState) {
    const Eigenpair pair{(1.0 - 2.0 * cfg.q) / (1.0 - cfg.q), 0.0};
    const Evaluation ev = evaluate(cfg.block_size, e_c, pair);
    report.entropy = ev.entropy;
    report.rate = std::max(0.0, ev.raw_rate);
    report.lambda4 = 0.0;
  } else {
    auto raw = [&](double l4) {
      return evaluate(cfg.block_size, e_c, four_state_pair(cfg.q, l4)).raw_rate;
    };
    double best_l4 = 0.0;
    if (cfg.q > 0.0) {
      constexpr int kScan = 1001;
      double best = raw(0.0);
      for (int i = 1; i < kScan; ++i) {
        const double l4 = cfg.q * i / (kScan - 1);
        const double v = raw(l4);
        if (v < best) {
          best = v;
          best_l4 = l4;
        }
      }
      const double step = cfg.q / (kScan - 1);
      double lo = std::max(0.0, best_l4 - step);
      double hi = std::min(cfg.q, best_l4 + step);
      constexpr double kInvPhi = 0.6180339887498948482;
      while (hi - lo > 1e-12) {
        const double c = hi - kInvPhi * (hi - lo);
        const double d = lo + kInvPhi * (hi - lo);
        if (raw(c) < raw(d))
          hi = d;
        else
          lo = c;
      }
      const double refined = 0.5 * (lo + hi);
      if (raw(refined) < best) best_l4 = refined;
    }
    const Evaluation ev = evaluate(cfg.block_size, e_c, four_state_pair(cfg.q, best_l4));
    report.entropy = ev.entropy;
    report.rate = std::max(0.0, ev.raw_rate);
    report.lambda4 = best_l4;
  }
  return report;
}

double cad_effective_rate(const CadConfig& cfg, bool two_channels) {
  cfg.validate();
  const double p_acc =
      pow_int(1.0 - cfg.q, cfg.block_size) + pow_int(cfg.q, cfg.block_size);
  const double single = p_acc * cad_rate(cfg).rate / cfg.block_size;
  return two_channels ? 2.0 * single : single;
}

double cad_threshold(int block_size, BasisMode basis) {
  auto rate_at = [&](double q) { return cad_rate({block_size, basis, q}).rate; };
  double lo = 1e-6;
  if (!(rate_at(lo) > 0.0))
    throw std::runtime_error("cad_threshold: rate not positive at q = 1e-6");
  double hi = 0.5;
  if (rate_at(hi) > 0.0) return hi;
  while (hi - lo > 1e-5) {
    const double mid = 0.5 * (lo + hi);
    (rate_at(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void write_cad_sweep(std::ostream& out, int block_size, BasisMode basis, bool two_channels,
                     const std::vector<double>& q_grid, char sep) {
  std::vector<CadReport> rows(q_grid.size());
  std::vector<double> eff(q_grid.size());
  parallel_for(q_grid.size(), [&](std::size_t i) {
    const CadConfig cfg{block_size, basis, q_grid[i]};
    rows[i] = cad_rate(cfg);
    eff[i] = cad_effective_rate(cfg, two_channels);
  });
  out << "protocol_tag" << sep << "c" << sep << "q" << sep << "rate" << sep << "effective_rate"
      << sep << "entropy" << sep << "log10_rate\n";
  const std::string tag = std::string("BB84-") + (basis == BasisMode::SixState ? "XYZ" : "XZ") +
                          "[" + std::to_string(block_size) + "]" + (two_channels ? "x2" : "");
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    out << tag << sep << block_size << sep << fmt(q_grid[i]) << sep << fmt(rows[i].rate) << sep
        << fmt(eff[i]) << sep << fmt(rows[i].entropy) << sep;
    if (rows[i].rate > 0.0) out << fmt(std::log10(rows[i].rate));
    out << "\n";
  }
}

}  // namespace sqkd
