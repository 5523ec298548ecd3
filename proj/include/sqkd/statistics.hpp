#pragma once

// Observable channel statistics of the two-way protocol and their CSV form.
//
// Three families of conditional probabilities are tracked, mirroring what the
// two parties can tally from non-key iterations:
//   forward[i][j]   : P(B measures j | A sent state i, B measured-and-resent)
//   resend[i][j][k] : P(A measures k | A sent i, B measured-and-resent j)
//   reflect[i][k]   : P(A measures k | A sent i, B reflected)
// Conditional rows whose conditioning event has (near-)zero probability are
// carried as absent rather than 0/0.

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace sqkd {

enum class Mode { Two = 2, Three = 3 };

/// States the quantum party prepares. Y preparation only occurs in MODE-3.
enum class Prep : int { ZeroZ = 0, OneZ = 1, PlusX = 2, ZeroY = 3 };

/// Measurement outcomes on the return path (the basis is implied).
enum class Outcome : int { ZeroZ = 0, OneZ = 1, PlusX = 2, MinusX = 3, ZeroY = 4, OneY = 5 };

enum class Basis : int { Z = 0, X = 1, Y = 2 };

constexpr int index(Prep p) { return static_cast<int>(p); }
constexpr int index(Outcome k) { return static_cast<int>(k); }
constexpr Basis basis_of(Outcome k) { return static_cast<Basis>(static_cast<int>(k) / 2); }
constexpr Outcome complement_of(Outcome k) {
  return static_cast<Outcome>(static_cast<int>(k) ^ 1);
}

std::string to_string(Prep p);
std::string to_string(Outcome k);
Prep parse_prep(const std::string& token);
Outcome parse_outcome(const std::string& token);

constexpr std::array<Prep, 4> kAllPreps = {Prep::ZeroZ, Prep::OneZ, Prep::PlusX, Prep::ZeroY};
constexpr std::array<Outcome, 6> kAllOutcomes = {Outcome::ZeroZ,  Outcome::OneZ, Outcome::PlusX,
                                                 Outcome::MinusX, Outcome::ZeroY, Outcome::OneY};

/// Raised when a computation needs a statistic that is absent.
struct MissingStatisticError : std::runtime_error {
  explicit MissingStatisticError(const std::string& what) : std::runtime_error(what) {}
};

struct ChannelStatistics {
  Mode mode = Mode::Three;
  std::array<std::array<std::optional<double>, 2>, 4> forward{};
  std::array<std::array<std::array<std::optional<double>, 6>, 2>, 4> resend{};
  std::array<std::array<std::optional<double>, 6>, 4> reflect{};

  bool has_forward(Prep i, int j) const { return forward[index(i)][j].has_value(); }
  bool has_resend(Prep i, int j, Outcome k) const {
    return resend[index(i)][j][index(k)].has_value();
  }
  bool has_reflect(Prep i, Outcome k) const { return reflect[index(i)][index(k)].has_value(); }

  /// Accessors throw MissingStatisticError naming the statistic when absent.
  double forward_prob(Prep i, int j) const;
  double resend_prob(Prep i, int j, Outcome k) const;
  double reflect_prob(Prep i, Outcome k) const;

  /// Checks range and row normalization (each conditional pair sums to 1 +- 1e-9).
  void validate() const;
};

/// Statistics of the symmetric attack family: Z error q_forward on the way to
/// B, q_return on the way back, reflection error q_x in the X (and Y) basis,
/// and every basis-mismatched row equal to 1/2.
ChannelStatistics symmetric_statistics(double q_forward, double q_return, double q_x,
                                       Mode mode = Mode::Three);

/// Flat CSV: "path,prep,bob,alice,probability" with a "# mode=" header line.
/// Values round-trip losslessly at 17 significant digits.
void write_statistics_csv(const ChannelStatistics& stats, std::ostream& out, char sep = ',');
ChannelStatistics read_statistics_csv(std::istream& in);

}  // namespace sqkd
