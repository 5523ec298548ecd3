#include "sqkd/simulate.hpp"

#include "sqkd/parallel.hpp"
#include "sqkd/rng.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace sqkd {

void ProtocolConfig::validate() const {
  if (!(p_z > 0.0 && p_z < 1.0))
    throw std::domain_error("protocol: p_z must lie strictly inside (0,1)");
  if (!(p_keep > 0.0 && p_keep < 1.0))
    throw std::domain_error("protocol: p_keep must lie strictly inside (0,1)");
  if (iterations == 0) throw std::domain_error("protocol: iteration count must be positive");
}

std::uint64_t IterationCounts::total() const {
  return std::accumulate(table.begin(), table.end(), std::uint64_t{0});
}

namespace {

constexpr std::size_t kShards = 256;

struct OutcomeBra {
  Complex c0, c1;
};

OutcomeBra bra_of(Outcome k) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (k) {
    case Outcome::ZeroZ: return {1.0, 0.0};
    case Outcome::OneZ: return {0.0, 1.0};
    case Outcome::PlusX: return {s, s};
    case Outcome::MinusX: return {s, -s};
    case Outcome::ZeroY: return {s, Complex(0.0, s)};
    case Outcome::OneY: return {s, Complex(0.0, -s)};
  }
  throw std::logic_error("bra_of: bad outcome");
}

struct ShardResult {
  IterationCounts counts;
  std::vector<std::uint8_t> key_a, key_b;
};

/// Preparation and its qubit amplitudes, sampled per the protocol mix.
struct Preparation {
  Prep label;
  int key_bit;  // A's Z bit, -1 for non-Z preparations
};

Preparation sample_prep(Mode mode, double p_z, std::mt19937_64& eng) {
  const double u = uniform_double(eng);
  if (u < p_z) {
    const int bit = uniform_double(eng) < 0.5 ? 0 : 1;
    return {bit == 0 ? Prep::ZeroZ : Prep::OneZ, bit};
  }
  if (mode == Mode::Two) return {Prep::PlusX, -1};
  return {uniform_double(eng) < 0.5 ? Prep::PlusX : Prep::ZeroY, -1};
}

Basis sample_basis(Mode mode, double p_z, std::mt19937_64& eng) {
  const double u = uniform_double(eng);
  if (u < p_z) return Basis::Z;
  if (mode == Mode::Two) return Basis::X;
  return uniform_double(eng) < 0.5 ? Basis::X : Basis::Y;
}

ShardResult run_shard(const ProtocolConfig& cfg, const AttackPair& attack,
                      std::uint64_t shard_seed, std::uint64_t iterations) {
  std::mt19937_64 eng(shard_seed);
  const Eigen::Index d = attack.ancilla_dim;
  ShardResult result;

  Vector joint(2 * d), after_forward(2 * d), returned(2 * d), resent(2 * d);
  for (std::uint64_t it = 0; it < iterations; ++it) {
    const Preparation prep = sample_prep(cfg.mode, cfg.p_z, eng);
    // A -> B hop.
    const double s = 1.0 / std::sqrt(2.0);
    joint.setZero();
    switch (prep.label) {
      case Prep::ZeroZ: joint.head(d) = attack.ancilla; break;
      case Prep::OneZ: joint.tail(d) = attack.ancilla; break;
      case Prep::PlusX:
        joint.head(d) = s * attack.ancilla;
        joint.tail(d) = s * attack.ancilla;
        break;
      case Prep::ZeroY:
        joint.head(d) = s * attack.ancilla;
        joint.tail(d) = Complex(0.0, s) * attack.ancilla;
        break;
    }
    after_forward.noalias() = attack.forward_unitary * joint;

    // B's operation.
    BobRecord bob;
    int bob_bit = -1;
    if (uniform_double(eng) < cfg.p_z) {
      const double p0 = after_forward.head(d).squaredNorm();
      const double p1 = after_forward.tail(d).squaredNorm();
      bob_bit = uniform_double(eng) * (p0 + p1) < p0 ? 0 : 1;
      bob = bob_bit == 0 ? BobRecord::Resend0 : BobRecord::Resend1;
      resent.setZero();
      const auto block = bob_bit == 0 ? after_forward.head(d) : after_forward.tail(d);
      const double norm = std::sqrt(bob_bit == 0 ? p0 : p1);
      if (bob_bit == 0)
        resent.head(d) = block / norm;
      else
        resent.tail(d) = block / norm;
      returned.noalias() = attack.reverse_unitary * resent;
    } else {
      bob = BobRecord::Reflect;
      returned.noalias() = attack.reverse_unitary * after_forward;
    }

    // A's measurement.
    const Basis basis = sample_basis(cfg.mode, cfg.p_z, eng);
    const Outcome k0 = static_cast<Outcome>(2 * static_cast<int>(basis));
    const Outcome k1 = complement_of(k0);
    const OutcomeBra b0 = bra_of(k0);
    const double p_first =
        (std::conj(b0.c0) * returned.head(d) + std::conj(b0.c1) * returned.tail(d)).squaredNorm();
    const double p_total = returned.squaredNorm();
    const Outcome outcome = uniform_double(eng) * p_total < p_first ? k0 : k1;

    const bool accept = prep.key_bit >= 0 && basis == Basis::Z &&
                        static_cast<int>(outcome) == prep.key_bit;
    const bool test = uniform_double(eng) >= cfg.p_keep;
    result.counts.at(prep.label, bob, outcome, accept, test) += 1;
    if (accept && !test && bob != BobRecord::Reflect) {
      result.key_a.push_back(static_cast<std::uint8_t>(prep.key_bit));
      result.key_b.push_back(static_cast<std::uint8_t>(bob_bit));
    }
  }
  return result;
}

}  // namespace

SimulationOutcome run_protocol(const ProtocolConfig& cfg, const AttackPair& attack) {
  cfg.validate();
  attack.validate();

  const std::size_t shards = cfg.iterations < kShards ? 1 : kShards;
  const std::uint64_t base = cfg.iterations / shards;
  const std::uint64_t rem = cfg.iterations % shards;

  std::vector<ShardResult> results(shards);
  parallel_for(shards, [&](std::size_t s) {
    const std::uint64_t n = base + (s < rem ? 1 : 0);
    results[s] = run_shard(cfg, attack, derive_seed(cfg.seed, s), n);
  });

  SimulationOutcome outcome;
  outcome.config = cfg;
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.counts.table.size(); ++i)
      outcome.counts.table[i] += r.counts.table[i];
    outcome.raw_key_a.insert(outcome.raw_key_a.end(), r.key_a.begin(), r.key_a.end());
    outcome.raw_key_b.insert(outcome.raw_key_b.end(), r.key_b.begin(), r.key_b.end());
  }
  return outcome;
}

ChannelStatistics empirical_statistics(const SimulationOutcome& outcome) {
  ChannelStatistics stats;
  stats.mode = outcome.config.mode;
  const auto& counts = outcome.counts;

  auto cell = [&](Prep i, BobRecord b, Outcome k) {
    std::uint64_t n = 0;
    for (bool accept : {false, true})
      for (bool test : {false, true}) n += counts.get(i, b, k, accept, test);
    return n;
  };

  for (Prep i : kAllPreps) {
    // Forward rows: condition on Measure-and-Resend.
    std::array<std::uint64_t, 2> measured{};
    for (int j = 0; j < 2; ++j) {
      const BobRecord b = j == 0 ? BobRecord::Resend0 : BobRecord::Resend1;
      for (Outcome k : kAllOutcomes) measured[j] += cell(i, b, k);
    }
    const std::uint64_t measured_total = measured[0] + measured[1];
    if (measured_total > 0)
      for (int j = 0; j < 2; ++j)
        stats.forward[index(i)][j] =
            static_cast<double>(measured[j]) / static_cast<double>(measured_total);

    // Return rows: condition additionally on A's basis choice.
    for (int j = 0; j < 2; ++j) {
      const BobRecord b = j == 0 ? BobRecord::Resend0 : BobRecord::Resend1;
      for (int basis = 0; basis < 3; ++basis) {
        const Outcome k0 = static_cast<Outcome>(2 * basis);
        const Outcome k1 = complement_of(k0);
        const std::uint64_t n0 = cell(i, b, k0), n1 = cell(i, b, k1);
        if (n0 + n1 == 0) continue;
        stats.resend[index(i)][j][index(k0)] =
            static_cast<double>(n0) / static_cast<double>(n0 + n1);
        stats.resend[index(i)][j][index(k1)] =
            static_cast<double>(n1) / static_cast<double>(n0 + n1);
      }
    }
    for (int basis = 0; basis < 3; ++basis) {
      const Outcome k0 = static_cast<Outcome>(2 * basis);
      const Outcome k1 = complement_of(k0);
      const std::uint64_t n0 = cell(i, BobRecord::Reflect, k0);
      const std::uint64_t n1 = cell(i, BobRecord::Reflect, k1);
      if (n0 + n1 == 0) continue;
      stats.reflect[index(i)][index(k0)] = static_cast<double>(n0) / static_cast<double>(n0 + n1);
      stats.reflect[index(i)][index(k1)] = static_cast<double>(n1) / static_cast<double>(n0 + n1);
    }
  }
  return stats;
}

std::string bits_to_hex(const std::vector<std::uint8_t>& bits) {
  static const char* digits = "0123456789abcdef";
  std::string hex;
  hex.reserve((bits.size() + 3) / 4);
  int nibble = 0, filled = 0;
  for (std::uint8_t bit : bits) {
    nibble = (nibble << 1) | (bit & 1);
    if (++filled == 4) {
      hex.push_back(digits[nibble]);
      nibble = 0;
      filled = 0;
    }
  }
  if (filled > 0) hex.push_back(digits[nibble << (4 - filled)]);
  return hex;
}

void write_outcome_csv(const SimulationOutcome& outcome, std::ostream& out, char sep) {
  out << "# seed=" << outcome.config.seed << "\n";
  out << "# iterations=" << outcome.config.iterations << "\n";
  out << "# mode=MODE" << static_cast<int>(outcome.config.mode) << "\n";
  out << "# p_z=" << outcome.config.p_z << " p_keep=" << outcome.config.p_keep << "\n";
  out << "# raw_key_bits=" << outcome.raw_key_a.size() << "\n";
  out << "# raw_key_a=" << bits_to_hex(outcome.raw_key_a) << "\n";
  out << "# raw_key_b=" << bits_to_hex(outcome.raw_key_b) << "\n";
  out << "prep" << sep << "bob" << sep << "alice" << sep << "accept" << sep << "test" << sep
      << "count\n";
  static const char* bob_tag[3] = {"R", "0", "1"};
  for (Prep i : kAllPreps)
    for (int b = 0; b < 3; ++b)
      for (Outcome k : kAllOutcomes)
        for (bool accept : {false, true})
          for (bool test : {false, true}) {
            const std::uint64_t n =
                outcome.counts.get(i, static_cast<BobRecord>(b), k, accept, test);
            if (n == 0) continue;
            out << to_string(i) << sep << bob_tag[b] << sep << to_string(k) << sep
                << (accept ? 1 : 0) << sep << (test ? 1 : 0) << sep << n << "\n";
          }
}

}  // namespace sqkd
