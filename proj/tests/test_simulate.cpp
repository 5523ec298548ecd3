#include "sqkd/simulate.hpp"

#include <doctest.h>

#include <sstream>

using namespace sqkd;

TEST_SUITE_BEGIN("simulate");

namespace {

AttackPair identity_attack() {
  AttackPair a;
  a.ancilla_dim = 2;
  a.forward_unitary = Matrix::Identity(4, 4);
  a.reverse_unitary = Matrix::Identity(4, 4);
  a.ancilla = Vector::Zero(2);
  a.ancilla(0) = 1.0;
  return a;
}

}  // namespace

TEST_CASE("identity attack produces error-free keys") {
  const ProtocolConfig cfg{Mode::Three, 0.9, 0.9, 20000, 42};
  const SimulationOutcome out = run_protocol(cfg, identity_attack());
  CHECK(out.counts.total() == cfg.iterations);
  REQUIRE(out.raw_key_a.size() == out.raw_key_b.size());
  CHECK(out.raw_key_a.size() > 0);
  for (std::size_t i = 0; i < out.raw_key_a.size(); ++i)
    CHECK(out.raw_key_a[i] == out.raw_key_b[i]);

  const ChannelStatistics stats = empirical_statistics(out);
  CHECK(stats.reflect_prob(Prep::PlusX, Outcome::PlusX) == 1.0);
  CHECK(stats.forward_prob(Prep::ZeroZ, 0) == 1.0);
}

TEST_CASE("same seed reproduces the outcome exactly") {
  const ProtocolConfig cfg{Mode::Three, 0.8, 0.85, 5000, 7};
  const AttackPair attack = random_attack(3, 99);
  const SimulationOutcome a = run_protocol(cfg, attack);
  const SimulationOutcome b = run_protocol(cfg, attack);
  CHECK(a.counts.table == b.counts.table);
  CHECK(a.raw_key_a == b.raw_key_a);
  CHECK(a.raw_key_b == b.raw_key_b);

  ProtocolConfig other = cfg;
  other.seed = 8;
  const SimulationOutcome c = run_protocol(other, attack);
  CHECK(a.counts.table != c.counts.table);
}

TEST_CASE("tiny runs leave most rows absent without crashing") {
  const ProtocolConfig cfg{Mode::Three, 0.5, 0.5, 10, 3};
  const SimulationOutcome out = run_protocol(cfg, identity_attack());
  CHECK(out.counts.total() == 10);
  const ChannelStatistics stats = empirical_statistics(out);
  int populated = 0;
  for (Prep i : kAllPreps)
    for (int j = 0; j < 2; ++j)
      for (Outcome k : kAllOutcomes)
        if (stats.has_resend(i, j, k)) ++populated;
  CHECK(populated < 20);
}

TEST_CASE("two-basis mode never prepares or measures the third basis") {
  const ProtocolConfig cfg{Mode::Two, 0.7, 0.9, 20000, 5};
  const SimulationOutcome out = run_protocol(cfg, random_attack(2, 17));
  for (int b = 0; b < 3; ++b)
    for (Outcome k : {Outcome::ZeroY, Outcome::OneY})
      for (bool accept : {false, true})
        for (bool test : {false, true}) {
          for (Prep i : kAllPreps)
            CHECK(out.counts.get(i, static_cast<BobRecord>(b), k, accept, test) == 0);
          CHECK(out.counts.get(Prep::ZeroY, static_cast<BobRecord>(b), Outcome::ZeroZ, accept,
                               test) == 0);
        }
}

TEST_CASE("raw key length matches the accepted kept measure-and-resend count") {
  const ProtocolConfig cfg{Mode::Three, 0.9, 0.8, 30000, 11};
  const SimulationOutcome out = run_protocol(cfg, depolarizing_attack(0.05));
  std::uint64_t expected = 0;
  for (Prep i : kAllPreps)
    for (int b = 1; b < 3; ++b)  // measured-and-resent only
      for (Outcome k : kAllOutcomes)
        expected += out.counts.get(i, static_cast<BobRecord>(b), k, true, false);
  CHECK(out.raw_key_a.size() == expected);
}

TEST_CASE("empirical statistics converge to the exact observables") {
  const double q = 0.1;
  const ProtocolConfig cfg{Mode::Three, 0.8, 0.9, 400000, 2026};
  const AttackPair attack = depolarizing_attack(q);
  const SimulationOutcome out = run_protocol(cfg, attack);
  const ChannelStatistics empirical = empirical_statistics(out);
  const ChannelStatistics exact = observables(attack);

  // Spot-check the headline statistics within 5 sigma at their conditioning
  // counts (a loose smoke bound; the acceptance suite runs the full 3-sigma
  // sweep at one million iterations).
  auto sigma_bound = [](double p, double n) { return 5.0 * std::sqrt(p * (1 - p) / n) + 1e-9; };

  std::uint64_t z_forward = 0;
  for (int b = 1; b < 3; ++b)
    for (Outcome k : kAllOutcomes)
      for (bool accept : {false, true})
        for (bool test : {false, true})
          z_forward += out.counts.get(Prep::ZeroZ, static_cast<BobRecord>(b), k, accept, test);
  CHECK(std::abs(empirical.forward_prob(Prep::ZeroZ, 1) - q) <=
        sigma_bound(q, static_cast<double>(z_forward)));

  const double qx = 2.0 * q * (1.0 - q);
  std::uint64_t x_reflect = 0;
  for (Outcome k : {Outcome::PlusX, Outcome::MinusX})
    for (bool accept : {false, true})
      for (bool test : {false, true})
        x_reflect += out.counts.get(Prep::PlusX, BobRecord::Reflect, k, accept, test);
  CHECK(std::abs(empirical.reflect_prob(Prep::PlusX, Outcome::MinusX) - qx) <=
        sigma_bound(qx, static_cast<double>(x_reflect)));
  CHECK(exact.reflect_prob(Prep::PlusX, Outcome::MinusX) == doctest::Approx(qx).epsilon(1e-12));
}

TEST_CASE("key-iteration frequency follows p^3 q N") {
  const double q = 0.08;
  const ProtocolConfig cfg{Mode::Three, 0.85, 0.9, 200000, 314159};
  const SimulationOutcome out = run_protocol(cfg, depolarizing_attack(q));
  const double n_acc = ((1.0 - q) * (1.0 - q) + q * q);
  const double p_key = std::pow(cfg.p_z, 3) * cfg.p_keep * n_acc;
  const double expected = p_key * static_cast<double>(cfg.iterations);
  const double sigma = std::sqrt(p_key * (1.0 - p_key) * static_cast<double>(cfg.iterations));
  CHECK(std::abs(static_cast<double>(out.raw_key_a.size()) - expected) <= 3.0 * sigma);
}

TEST_CASE("hex export packs bits most-significant first") {
  CHECK(bits_to_hex({}) == "");
  CHECK(bits_to_hex({1, 0, 1, 0}) == "a");
  CHECK(bits_to_hex({1, 1, 1, 1, 0, 0, 0, 0}) == "f0");
  CHECK(bits_to_hex({1}) == "8");  // padded on the right
}

TEST_CASE("outcome csv carries the seed and keys in the header") {
  const ProtocolConfig cfg{Mode::Two, 0.9, 0.9, 1000, 77};
  const SimulationOutcome out = run_protocol(cfg, identity_attack());
  std::ostringstream buf;
  write_outcome_csv(out, buf);
  const std::string text = buf.str();
  CHECK(text.find("# seed=77\n") != std::string::npos);
  CHECK(text.find("# raw_key_a=") != std::string::npos);
  CHECK(text.find("prep,bob,alice,accept,test,count\n") != std::string::npos);
}

TEST_CASE("config validation") {
  ProtocolConfig cfg{Mode::Three, 1.0, 0.9, 100, 1};
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
  cfg = {Mode::Three, 0.9, 0.9, 0, 1};
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
}

TEST_SUITE_END();
