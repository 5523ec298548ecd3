// Command-line front end: key-rate sweeps, noise thresholds, distillation
// comparisons, loss curves, protocol simulation, and the oracle verification
// suite. All numeric output is CSV/TSV with 17 significant digits; identical
// invocations produce byte-identical files.

#include "sqkd/attack.hpp"
#include "sqkd/cad.hpp"
#include "sqkd/keyrate.hpp"
#include "sqkd/loss.hpp"
#include "sqkd/simulate.hpp"
#include "sqkd/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace sqkd;

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

/// Writes atomically: temp file in the destination directory, then rename.
void deliver(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Mode parse_mode(int m) {
  if (m == 2) return Mode::Two;
  if (m == 3) return Mode::Three;
  throw CLI::ValidationError("--mode must be 2 or 3");
}

ChannelKind parse_kind(const std::string& s) {
  if (s == "independent") return ChannelKind::Independent;
  if (s == "dependent") return ChannelKind::Dependent;
  if (s == "custom") return ChannelKind::Custom;
  throw CLI::ValidationError("--channel must be independent, dependent or custom");
}

struct CommonOut {
  std::string path;
  std::string format = "csv";
  char sep() const { return format == "tsv" ? '\t' : ','; }
};

void add_output_options(CLI::App* cmd, CommonOut& out) {
  cmd->add_option("-o,--output", out.path, "Output file (stdout when omitted)");
  cmd->add_option("--format", out.format, "Output format")
      ->check(CLI::IsMember({"csv", "tsv"}));
}

ChannelFamily make_family(ChannelKind kind, double q, std::optional<double> qx) {
  switch (kind) {
    case ChannelKind::Independent: return ChannelFamily::independent(q);
    case ChannelKind::Dependent: return ChannelFamily::dependent(q);
    case ChannelKind::Custom:
      if (!qx) throw CLI::ValidationError("custom channel requires --qx");
      return ChannelFamily::custom(q, *qx);
  }
  throw CLI::ValidationError("bad channel kind");
}

int run(int argc, char** argv) {
  CLI::App app{"Two-way semi-quantum key distribution security analysis"};
  app.require_subcommand(1);

  // keyrate ------------------------------------------------------------
  auto* keyrate_cmd = app.add_subcommand("keyrate", "Key-rate bound at a noise point or sweep");
  int kr_mode = 3;
  std::string kr_channel = "independent";
  double kr_q = 0.0;
  std::optional<double> kr_qx;
  bool kr_sweep = false;
  int kr_points = 200;
  std::string kr_stats_file;
  CommonOut kr_out;
  keyrate_cmd->add_option("--mode", kr_mode, "Protocol mode (2 or 3 bases)")
      ->check(CLI::IsMember({2, 3}));
  keyrate_cmd->add_option("--channel", kr_channel, "Channel family")
      ->check(CLI::IsMember({"independent", "dependent", "custom"}));
  keyrate_cmd->add_option("--q", kr_q, "Per-hop Z error");
  keyrate_cmd->add_option("--qx", kr_qx, "Round-trip reflection error (custom channel)");
  keyrate_cmd->add_flag("--sweep", kr_sweep, "Sweep q from 0 to threshold+0.02");
  keyrate_cmd->add_option("--points", kr_points, "Sweep grid size")->check(CLI::PositiveNumber);
  keyrate_cmd->add_option("--stats", kr_stats_file,
                          "Evaluate observed statistics from a CSV file instead of --q");
  add_output_options(keyrate_cmd, kr_out);

  // threshold ----------------------------------------------------------
  auto* threshold_cmd = app.add_subcommand("threshold", "Maximal tolerated noise");
  int th_mode = 3;
  std::string th_channel = "independent";
  CommonOut th_out;
  threshold_cmd->add_option("--mode", th_mode)->check(CLI::IsMember({2, 3}));
  threshold_cmd->add_option("--channel", th_channel)
      ->check(CLI::IsMember({"independent", "dependent"}));
  add_output_options(threshold_cmd, th_out);

  // cad ------------------------------------------------------------------
  auto* cad_cmd = app.add_subcommand("cad", "Distillation-based comparison rates");
  int cad_c = 2;
  int cad_basis = 6;
  bool cad_two = false;
  bool cad_thresh = false;
  std::optional<double> cad_q;
  int cad_points = 200;
  CommonOut cad_out;
  cad_cmd->add_option("--c", cad_c, "Block size")->check(CLI::PositiveNumber);
  cad_cmd->add_option("--basis", cad_basis, "4 or 6 state")->check(CLI::IsMember({4, 6}));
  cad_cmd->add_flag("--two-channels", cad_two, "Double the rate for two channel instances");
  cad_cmd->add_flag("--threshold", cad_thresh, "Print the noise threshold instead of a sweep");
  cad_cmd->add_option("--q", cad_q, "Single noise point instead of a sweep");
  cad_cmd->add_option("--points", cad_points, "Sweep grid size")->check(CLI::PositiveNumber);
  add_output_options(cad_cmd, cad_out);

  // loss -----------------------------------------------------------------
  auto* loss_cmd = app.add_subcommand("loss", "Lossy-channel rates and maximal distance");
  int loss_mode = 3;
  double loss_q = 0.0, loss_qx = 0.0, loss_alpha = 0.25;
  std::optional<double> loss_d;
  bool loss_maxd = false;
  int loss_points = 200;
  CommonOut loss_out;
  loss_cmd->add_option("--mode", loss_mode)->check(CLI::IsMember({2, 3}));
  loss_cmd->add_option("--q", loss_q, "Per-hop Z error (conditioned on detection)")->required();
  loss_cmd->add_option("--qx", loss_qx, "Reflection error (conditioned on detection)")
      ->required();
  loss_cmd->add_option("--alpha", loss_alpha, "Fiber attenuation dB/km");
  loss_cmd->add_option("--d", loss_d, "Single distance in km instead of a sweep");
  loss_cmd->add_flag("--max-distance", loss_maxd, "Print the largest distance with positive rate");
  loss_cmd->add_option("--points", loss_points, "Sweep grid size")->check(CLI::PositiveNumber);
  add_output_options(loss_cmd, loss_out);

  // simulate ---------------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "Stochastic protocol run against an attack");
  int sim_mode = 3;
  double sim_p = 0.9, sim_q = 0.9;
  std::uint64_t sim_iters = 100000, sim_seed = 1;
  std::string sim_attack_file;
  std::string sim_stats_out;
  CommonOut sim_out;
  sim_cmd->add_option("--mode", sim_mode)->check(CLI::IsMember({2, 3}));
  sim_cmd->add_option("--p", sim_p, "Z-basis / measure-and-resend probability");
  sim_cmd->add_option("--q-test", sim_q, "Probability an iteration is kept (not tested)");
  sim_cmd->add_option("--iters", sim_iters, "Iteration count")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_seed, "RNG seed");
  sim_cmd->add_option("--attack", sim_attack_file, "Attack JSON file (identity when omitted)");
  sim_cmd->add_option("--stats-out", sim_stats_out, "Also write empirical statistics CSV here");
  add_output_options(sim_cmd, sim_out);

  // attack ---------------------------------------------------------------
  auto* attack_cmd = app.add_subcommand("attack", "Emit an attack description as JSON");
  std::string atk_kind = "depolarizing";
  double atk_q = 0.1;
  int atk_dim = 4;
  std::uint64_t atk_seed = 1;
  CommonOut atk_out;
  attack_cmd->add_option("--kind", atk_kind, "Attack family")
      ->check(CLI::IsMember({"depolarizing", "random"}));
  attack_cmd->add_option("--q", atk_q, "Depolarizing strength per hop");
  attack_cmd->add_option("--dim", atk_dim, "Ancilla dimension (random attacks)")
      ->check(CLI::Range(2, 16));
  attack_cmd->add_option("--seed", atk_seed, "Seed (random attacks)");
  add_output_options(attack_cmd, atk_out);

  // verify -------------------------------------------------------------------
  auto* verify_cmd = app.add_subcommand("verify", "Fuzz the oracle identities");
  int verify_n = 200;
  std::uint64_t verify_seed = 1;
  int verify_dim = 4;
  verify_cmd->add_option("--fuzz", verify_n, "Number of random attacks")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", verify_seed, "Corpus seed");
  verify_cmd->add_option("--ancilla-dim", verify_dim, "Ancilla dimension")
      ->check(CLI::Range(2, 16));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message / help text
    return code == 0 ? 0 : kExitUsage;
  }

  if (keyrate_cmd->parsed()) {
    const Mode mode = parse_mode(kr_mode);
    const ChannelKind kind = parse_kind(kr_channel);
    std::ostringstream text;
    if (!kr_stats_file.empty()) {
      std::ifstream in(kr_stats_file);
      if (!in) throw std::runtime_error("cannot open '" + kr_stats_file + "'");
      const ChannelStatistics stats = read_statistics_csv(in);
      const KeyRateReport r = key_rate(mode, stats);
      const char s = kr_out.sep();
      text << "mode" << s << "s_ae_lower" << s << "h_ab" << s << "rate" << s << "effective_rate"
           << s << "lambda2_worst\n"
           << kr_mode << s << fmt17(r.entropy_bound) << s << fmt17(r.conditional_h) << s
           << fmt17(r.rate) << s << fmt17(r.effective_rate) << s << fmt17(r.lambda2_worst)
           << "\n";
    } else if (kr_sweep) {
      const double hi = noise_threshold(mode, kind == ChannelKind::Custom
                                                  ? ChannelKind::Independent
                                                  : kind) +
                        0.02;
      write_keyrate_sweep(text, mode, kind, linear_grid(0.0, std::min(hi, 0.5), kr_points),
                          kr_out.sep(), kr_qx);
    } else {
      write_keyrate_sweep(text, mode, kind, {kr_q}, kr_out.sep(), kr_qx);
    }
    deliver(text.str(), kr_out.path);
  } else if (threshold_cmd->parsed()) {
    const double t = noise_threshold(parse_mode(th_mode), parse_kind(th_channel));
    deliver(fmt17(t) + "\n", th_out.path);
  } else if (cad_cmd->parsed()) {
    const BasisMode basis = cad_basis == 6 ? BasisMode::SixState : BasisMode::FourState;
    std::ostringstream text;
    if (cad_thresh) {
      text << fmt17(cad_threshold(cad_c, basis)) << "\n";
    } else if (cad_q) {
      write_cad_sweep(text, cad_c, basis, cad_two, {*cad_q}, cad_out.sep());
    } else {
      const double hi = std::min(cad_threshold(cad_c, basis) + 0.02, 0.5);
      write_cad_sweep(text, cad_c, basis, cad_two, linear_grid(0.0, hi, cad_points),
                      cad_out.sep());
    }
    deliver(text.str(), cad_out.path);
  } else if (loss_cmd->parsed()) {
    const Mode mode = parse_mode(loss_mode);
    std::ostringstream text;
    if (loss_maxd) {
      text << fmt17(max_distance(loss_q, loss_qx, loss_alpha, mode)) << "\n";
    } else if (loss_d) {
      const LossConfig cfg{loss_alpha, *loss_d, loss_q, loss_qx, mode};
      write_loss_sweep(text, cfg, {*loss_d}, loss_out.sep());
    } else {
      const LossConfig base{loss_alpha, 0.0, loss_q, loss_qx, mode};
      const double d_max = max_distance(loss_q, loss_qx, loss_alpha, mode);
      const double hi = std::isfinite(d_max) && d_max > 0.0 ? 1.1 * d_max : 100.0;
      write_loss_sweep(text, base, linear_grid(0.0, hi, loss_points), loss_out.sep());
    }
    deliver(text.str(), loss_out.path);
  } else if (sim_cmd->parsed()) {
    AttackPair attack;
    if (sim_attack_file.empty()) {
      attack.ancilla_dim = 2;
      attack.forward_unitary = Matrix::Identity(4, 4);
      attack.reverse_unitary = Matrix::Identity(4, 4);
      attack.ancilla = Vector::Zero(2);
      attack.ancilla(0) = 1.0;
    } else {
      attack = load_attack_file(sim_attack_file);
    }
    const ProtocolConfig cfg{parse_mode(sim_mode), sim_p, sim_q, sim_iters, sim_seed};
    const SimulationOutcome outcome = run_protocol(cfg, attack);
    std::ostringstream text;
    write_outcome_csv(outcome, text, sim_out.sep());
    deliver(text.str(), sim_out.path);
    if (!sim_stats_out.empty()) {
      std::ostringstream stats_text;
      write_statistics_csv(empirical_statistics(outcome), stats_text, sim_out.sep());
      deliver(stats_text.str(), sim_stats_out);
    }
  } else if (attack_cmd->parsed()) {
    const AttackPair attack = atk_kind == "depolarizing" ? depolarizing_attack(atk_q)
                                                         : random_attack(atk_dim, atk_seed);
    std::ostringstream text;
    write_attack_json(attack, text);
    deliver(text.str(), atk_out.path);
  } else if (verify_cmd->parsed()) {
    const FuzzReport report = fuzz_identities(verify_n, verify_seed, verify_dim);
    print_report(report, std::cout);
    return report.pass() ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError&) {
    // CLI11_PARSE handles these inside run(); anything escaping here is a
    // construction-time problem.
    return kExitUsage;
  } catch (const sqkd::InfeasibleStatisticsError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
