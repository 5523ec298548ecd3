#include "sqkd/loss.hpp"

#include "sqkd/keyrate.hpp"
#include "sqkd/parallel.hpp"
#include "sqkd/qmath.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sqkd {

double loss_probability(double alpha, double distance) {
  if (alpha < 0.0 || distance < 0.0)
    throw std::domain_error("loss_probability: alpha and distance must be non-negative");
  return 1.0 - std::pow(10.0, -alpha * distance / 10.0);
}

double LossConfig::loss_prob() const { return loss_probability(alpha, distance); }

namespace {

/// H(A|B) of the raw-key distribution when A keeps vacuum outcomes: the kept
/// mass mixes the detected key branches with weight (1 - p_l) and the vacuum
/// branch (perfectly correlated with B's bit) with weight p_l.
double lossy_h_ab(double q, double p_l) {
  const double keep = (1.0 - q) * (1.0 - q) * (1.0 - p_l) + p_l * (1.0 - q);
  const double flip = q * q * (1.0 - p_l) + p_l * q;
  const double m = 2.0 * (keep + flip);
  const double p00 = keep / m, p01 = flip / m;
  const double joint = shannon_entropy({p00, p01, p01, p00});
  return joint - binary_entropy(p00 + p01);
}

}  // namespace

double lossy_key_rate(const LossConfig& cfg) {
  // The transmission factor is computed directly: 1 - p_l underflows to zero
  // once p_l rounds to 1, long before the key actually dies on a noise-free
  // channel.
  const double transmission = std::pow(10.0, -cfg.alpha * cfg.distance / 10.0);
  const double p_l = cfg.loss_prob();
  const KeyRateReport lossless =
      key_rate(cfg.mode, symmetric_statistics(cfg.q, cfg.q, cfg.q_x, cfg.mode));
  return transmission * lossless.entropy_bound - lossy_h_ab(cfg.q, p_l);
}

double max_distance(double q, double q_x, double alpha, Mode mode) {
  LossConfig cfg{alpha, 0.0, q, q_x, mode};
  if (!(lossy_key_rate(cfg) > 0.0)) return 0.0;
  if (alpha == 0.0) return std::numeric_limits<double>::infinity();
  // With q = 0 the kept raw key is error-free at every distance, so the rate
  // is a positive multiple of the transmission and never crosses zero.
  if (q == 0.0) return std::numeric_limits<double>::infinity();

  auto rate_at = [&](double d) {
    LossConfig c = cfg;
    c.distance = d;
    return lossy_key_rate(c);
  };
  double lo = 0.0, hi = 1.0;
  constexpr double kGuard = 1e6;  // km; past this the channel is effectively loss-free
  while (rate_at(hi) > 0.0) {
    hi *= 2.0;
    if (hi > kGuard) return std::numeric_limits<double>::infinity();
  }
  while (hi - lo > 0.01) {
    const double mid = 0.5 * (lo + hi);
    (rate_at(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void write_loss_sweep(std::ostream& out, const LossConfig& base,
                      const std::vector<double>& distances, char sep) {
  std::vector<double> rates(distances.size());
  std::vector<double> p_ls(distances.size());
  parallel_for(distances.size(), [&](std::size_t i) {
    LossConfig cfg = base;
    cfg.distance = distances[i];
    p_ls[i] = cfg.loss_prob();
    rates[i] = lossy_key_rate(cfg);
  });
  out << "mode" << sep << "q" << sep << "q_x" << sep << "alpha" << sep << "d" << sep << "p_l"
      << sep << "rate\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < distances.size(); ++i)
    out << static_cast<int>(base.mode) << sep << fmt(base.q) << sep << fmt(base.q_x) << sep
        << fmt(base.alpha) << sep << fmt(distances[i]) << sep << fmt(p_ls[i]) << sep
        << fmt(rates[i]) << "\n";
}

}  // namespace sqkd
