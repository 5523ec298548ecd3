#pragma once

// Iteration-level stochastic simulation of the two-way protocol against a
// fixed collective attack, by exact conditional-state collapse. Empirical
// tallies converge to the exact observables of the attack.

#include "sqkd/attack.hpp"
#include "sqkd/statistics.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace sqkd {

struct ProtocolConfig {
  Mode mode = Mode::Three;
  double p_z = 0.9;       // probability of the Z basis (A) and of Measure-and-Resend (B)
  double p_keep = 0.9;    // probability an iteration is not sacrificed for testing
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// B's action on an iteration: reflected, or measured-and-resent bit 0/1.
enum class BobRecord : int { Reflect = 0, Resend0 = 1, Resend1 = 2 };

/// Tally over (preparation, B's record, A's outcome, accept flag, test flag).
struct IterationCounts {
  std::array<std::uint64_t, 4 * 3 * 6 * 2 * 2> table{};

  static constexpr std::size_t slot(Prep i, BobRecord b, Outcome k, bool accept, bool test) {
    return (((static_cast<std::size_t>(i) * 3 + static_cast<std::size_t>(b)) * 6 +
             static_cast<std::size_t>(k)) *
                2 +
            (accept ? 1 : 0)) *
               2 +
           (test ? 1 : 0);
  }
  std::uint64_t& at(Prep i, BobRecord b, Outcome k, bool accept, bool test) {
    return table[slot(i, b, k, accept, test)];
  }
  std::uint64_t get(Prep i, BobRecord b, Outcome k, bool accept, bool test) const {
    return table[slot(i, b, k, accept, test)];
  }
  std::uint64_t total() const;
};

struct SimulationOutcome {
  ProtocolConfig config;
  IterationCounts counts;
  std::vector<std::uint8_t> raw_key_a;  // one bit per key-distillation iteration
  std::vector<std::uint8_t> raw_key_b;
};

/// Runs the protocol for the configured number of iterations. Deterministic
/// per seed: work splits into fixed shards with derived seeds and merges in
/// shard order, so the outcome does not depend on the worker count.
SimulationOutcome run_protocol(const ProtocolConfig& cfg, const AttackPair& attack);

/// Ratio estimators for every statistic; rows whose conditioning count is
/// zero are absent.
ChannelStatistics empirical_statistics(const SimulationOutcome& outcome);

/// Counts CSV with `# seed=`, `# iterations=` and hex raw keys in the header
/// comments, then rows prep,bob,alice,accept,test,count (zero rows omitted).
void write_outcome_csv(const SimulationOutcome& outcome, std::ostream& out, char sep = ',');

/// Raw key bits packed most-significant-bit first into hex digits.
std::string bits_to_hex(const std::vector<std::uint8_t>& bits);

}  // namespace sqkd
