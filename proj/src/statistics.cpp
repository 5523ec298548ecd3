#include "sqkd/statistics.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sqkd {

std::string to_string(Prep p) {
  switch (p) {
    case Prep::ZeroZ: return "0";
    case Prep::OneZ: return "1";
    case Prep::PlusX: return "+";
    case Prep::ZeroY: return "0Y";
  }
  throw std::logic_error("to_string(Prep): bad value");
}

std::string to_string(Outcome k) {
  switch (k) {
    case Outcome::ZeroZ: return "0";
    case Outcome::OneZ: return "1";
    case Outcome::PlusX: return "+";
    case Outcome::MinusX: return "-";
    case Outcome::ZeroY: return "0Y";
    case Outcome::OneY: return "1Y";
  }
  throw std::logic_error("to_string(Outcome): bad value");
}

Prep parse_prep(const std::string& token) {
  if (token == "0") return Prep::ZeroZ;
  if (token == "1") return Prep::OneZ;
  if (token == "+") return Prep::PlusX;
  if (token == "0Y") return Prep::ZeroY;
  throw std::runtime_error("unknown prepared state '" + token + "'");
}

Outcome parse_outcome(const std::string& token) {
  if (token == "0") return Outcome::ZeroZ;
  if (token == "1") return Outcome::OneZ;
  if (token == "+") return Outcome::PlusX;
  if (token == "-") return Outcome::MinusX;
  if (token == "0Y") return Outcome::ZeroY;
  if (token == "1Y") return Outcome::OneY;
  throw std::runtime_error("unknown outcome '" + token + "'");
}

double ChannelStatistics::forward_prob(Prep i, int j) const {
  const auto& v = forward[index(i)][j];
  if (!v)
    throw MissingStatisticError("missing statistic p[A->B](" + to_string(i) + " -> " +
                                std::to_string(j) + ")");
  return *v;
}

double ChannelStatistics::resend_prob(Prep i, int j, Outcome k) const {
  const auto& v = resend[index(i)][j][index(k)];
  if (!v)
    throw MissingStatisticError("missing statistic p[A->A](" + to_string(i) + ", " +
                                std::to_string(j) + " -> " + to_string(k) + ")");
  return *v;
}

double ChannelStatistics::reflect_prob(Prep i, Outcome k) const {
  const auto& v = reflect[index(i)][index(k)];
  if (!v)
    throw MissingStatisticError("missing statistic p[A->A](" + to_string(i) + ", R -> " +
                                to_string(k) + ")");
  return *v;
}

namespace {

void check_range(double p, const std::string& label) {
  if (!(p >= -1e-9 && p <= 1.0 + 1e-9))
    throw std::domain_error("statistic " + label + " = " + std::to_string(p) +
                            " outside [0,1]");
}

void check_pair(const std::optional<double>& a, const std::optional<double>& b,
                const std::string& label) {
  if (a.has_value() != b.has_value())
    throw std::domain_error("statistic row " + label + " only partially populated");
  if (a && std::abs(*a + *b - 1.0) > 1e-9)
    throw std::domain_error("statistic row " + label + " sums to " + std::to_string(*a + *b));
}

}  // namespace

void ChannelStatistics::validate() const {
  for (Prep i : kAllPreps) {
    for (int j = 0; j < 2; ++j)
      if (forward[index(i)][j]) check_range(*forward[index(i)][j], "p[A->B]");
    check_pair(forward[index(i)][0], forward[index(i)][1], "p[A->B](" + to_string(i) + ")");
    for (Outcome k : kAllOutcomes) {
      for (int j = 0; j < 2; ++j)
        if (resend[index(i)][j][index(k)]) check_range(*resend[index(i)][j][index(k)], "p[A->A]");
      if (reflect[index(i)][index(k)]) check_range(*reflect[index(i)][index(k)], "p[A->A,R]");
    }
    for (int b = 0; b < 3; ++b) {
      const Outcome k0 = static_cast<Outcome>(2 * b);
      const Outcome k1 = static_cast<Outcome>(2 * b + 1);
      for (int j = 0; j < 2; ++j)
        check_pair(resend[index(i)][j][index(k0)], resend[index(i)][j][index(k1)],
                   "p[A->A](" + to_string(i) + "," + std::to_string(j) + ")");
      check_pair(reflect[index(i)][index(k0)], reflect[index(i)][index(k1)],
                 "p[A->A](" + to_string(i) + ",R)");
    }
  }
}

ChannelStatistics symmetric_statistics(double q_forward, double q_return, double q_x, Mode mode) {
  for (double q : {q_forward, q_return, q_x})
    if (!(q >= 0.0 && q <= 0.5))
      throw std::domain_error("symmetric_statistics: parameter " + std::to_string(q) +
                              " outside [0, 0.5]");

  ChannelStatistics s;
  s.mode = mode;
  const bool three = (mode == Mode::Three);

  const auto preps = three ? std::vector<Prep>{Prep::ZeroZ, Prep::OneZ, Prep::PlusX, Prep::ZeroY}
                           : std::vector<Prep>{Prep::ZeroZ, Prep::OneZ, Prep::PlusX};
  const auto outcomes =
      three ? std::vector<Outcome>{Outcome::ZeroZ, Outcome::OneZ, Outcome::PlusX,
                                   Outcome::MinusX, Outcome::ZeroY, Outcome::OneY}
            : std::vector<Outcome>{Outcome::ZeroZ, Outcome::OneZ, Outcome::PlusX, Outcome::MinusX};

  for (Prep i : preps) {
    // Forward hop: Z preparations see the Z error, anything else is unbiased.
    if (i == Prep::ZeroZ || i == Prep::OneZ) {
      const int bit = index(i);
      s.forward[index(i)][bit] = 1.0 - q_forward;
      s.forward[index(i)][1 - bit] = q_forward;
    } else {
      s.forward[index(i)][0] = 0.5;
      s.forward[index(i)][1] = 0.5;
    }
    // Return hop after B resends |j>: Z rows carry the return error, the rest
    // are mismatched and unbiased.
    for (int j = 0; j < 2; ++j) {
      for (Outcome k : outcomes) {
        double p = 0.5;
        if (basis_of(k) == Basis::Z) p = (index(k) == j) ? 1.0 - q_return : q_return;
        s.resend[index(i)][j][index(k)] = p;
      }
    }
    // Reflection: the error of the whole round trip is q_x in every basis that
    // matches the preparation; mismatched rows are unbiased.
    for (Outcome k : outcomes) {
      double p = 0.5;
      const bool matches = (i == Prep::ZeroZ && basis_of(k) == Basis::Z) ||
                           (i == Prep::OneZ && basis_of(k) == Basis::Z) ||
                           (i == Prep::PlusX && basis_of(k) == Basis::X) ||
                           (i == Prep::ZeroY && basis_of(k) == Basis::Y);
      if (matches) {
        const bool is_error = (i == Prep::ZeroZ && k == Outcome::OneZ) ||
                              (i == Prep::OneZ && k == Outcome::ZeroZ) ||
                              (i == Prep::PlusX && k == Outcome::MinusX) ||
                              (i == Prep::ZeroY && k == Outcome::OneY);
        p = is_error ? q_x : 1.0 - q_x;
      }
      s.reflect[index(i)][index(k)] = p;
    }
  }
  return s;
}

namespace {

std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

void write_statistics_csv(const ChannelStatistics& stats, std::ostream& out, char sep) {
  out << "# mode=MODE" << static_cast<int>(stats.mode) << "\n";
  out << "path" << sep << "prep" << sep << "bob" << sep << "alice" << sep << "probability\n";
  for (Prep i : kAllPreps) {
    for (int j = 0; j < 2; ++j)
      if (stats.has_forward(i, j))
        out << "A->B" << sep << to_string(i) << sep << j << sep << sep
            << format_probability(stats.forward_prob(i, j)) << "\n";
    for (int j = 0; j < 2; ++j)
      for (Outcome k : kAllOutcomes)
        if (stats.has_resend(i, j, k))
          out << "A->A" << sep << to_string(i) << sep << j << sep << to_string(k) << sep
              << format_probability(stats.resend_prob(i, j, k)) << "\n";
    for (Outcome k : kAllOutcomes)
      if (stats.has_reflect(i, k))
        out << "A->A" << sep << to_string(i) << sep << "R" << sep << to_string(k) << sep
            << format_probability(stats.reflect_prob(i, k)) << "\n";
  }
}

ChannelStatistics read_statistics_csv(std::istream& in) {
  ChannelStatistics stats;
  stats.mode = Mode::Two;
  bool mode_seen = false;
  std::string line;
  bool header_skipped = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("# mode=MODE", 0) == 0) {
      stats.mode = (line == "# mode=MODE3") ? Mode::Three : Mode::Two;
      mode_seen = true;
      continue;
    }
    if (line[0] == '#') continue;
    const char sep = line.find('\t') != std::string::npos ? '\t' : ',';
    if (!header_skipped && line.rfind("path", 0) == 0) {
      header_skipped = true;
      continue;
    }
    auto fields = split_line(line, sep);
    if (fields.size() != 5)
      throw std::runtime_error("statistics csv line " + std::to_string(lineno) +
                               ": expected 5 fields");
    const Prep i = parse_prep(fields[1]);
    const double p = std::stod(fields[4]);
    if (fields[0] == "A->B") {
      stats.forward[index(i)][std::stoi(fields[2])] = p;
    } else if (fields[0] == "A->A" && fields[2] == "R") {
      stats.reflect[index(i)][index(parse_outcome(fields[3]))] = p;
    } else if (fields[0] == "A->A") {
      stats.resend[index(i)][std::stoi(fields[2])][index(parse_outcome(fields[3]))] = p;
    } else {
      throw std::runtime_error("statistics csv line " + std::to_string(lineno) +
                               ": unknown path tag '" + fields[0] + "'");
    }
  }
  if (!mode_seen) {
    // Fall back on content: any populated Y row implies three bases.
    for (Prep i : kAllPreps)
      for (Outcome k : {Outcome::ZeroY, Outcome::OneY})
        if (stats.has_reflect(i, k) || stats.has_resend(i, 0, k) || stats.has_resend(i, 1, k))
          stats.mode = Mode::Three;
    if (stats.has_forward(Prep::ZeroY, 0)) stats.mode = Mode::Three;
  }
  stats.validate();
  return stats;
}

}  // namespace sqkd
