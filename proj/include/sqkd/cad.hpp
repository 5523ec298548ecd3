#pragma once

// Key-rate formulas for BB84 (four- and six-state) followed by classical
// advantage distillation with repetition blocks of size C, used as the
// comparison baseline.

#include <iosfwd>
#include <vector>

namespace sqkd {

enum class BasisMode { FourState = 4, SixState = 6 };

struct CadConfig {
  int block_size = 1;  // C >= 1
  BasisMode basis = BasisMode::SixState;
  double q = 0.0;  // depolarizing noise per channel use, in [0, 0.5]

  void validate() const;
};

struct CadReport {
  double error_rate = 0.0;      // e_C, error of the distilled raw key
  double rate = 0.0;            // key rate, clamped at >= 0
  double effective_rate = 0.0;  // rate scaled by p_acc / C (single channel)
  double entropy = 0.0;         // S(A|E) after distillation
  double lambda4 = 0.0;         // minimizing four-state eigenvalue parameter (0 for six-state)
};

/// Distilled raw-key error q^C / (q^C + (1-q)^C), evaluated in log space so
/// large C does not underflow.
double cad_error(int block_size, double q);

/// Evaluates the distilled key rate. Four-state minimizes over the free
/// eigenvalue parameter lambda_4 in [0, q] (1001-point scan plus
/// golden-section refinement); six-state is closed-form.
CadReport cad_rate(const CadConfig& cfg);

/// Rate per transmitted qubit: rate * ((1-q)^C + q^C) / C, doubled when two
/// independent channel instances run in parallel.
double cad_effective_rate(const CadConfig& cfg, bool two_channels);

/// Largest q with positive rate, bisection to width 1e-5.
double cad_threshold(int block_size, BasisMode basis);

/// Comparison CSV: protocol_tag,c,q,rate,effective_rate,entropy,log10_rate.
void write_cad_sweep(std::ostream& out, int block_size, BasisMode basis, bool two_channels,
                     const std::vector<double>& q_grid, char sep = ',');

}  // namespace sqkd
