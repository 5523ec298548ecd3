#include "sqkd/attack.hpp"

#include "sqkd/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sqkd {

namespace {

constexpr double kConditioningFloor = 1e-12;

/// |t> (x) |v> for a qubit basis state t.
Vector embed(int t, const Vector& v) {
  const Eigen::Index d = v.size();
  Vector out = Vector::Zero(2 * d);
  out.segment(t * d, d) = v;
  return out;
}

Vector top(const Vector& v) { return v.head(v.size() / 2); }
Vector bottom(const Vector& v) { return v.tail(v.size() / 2); }

/// Qubit amplitudes of the six outcome states, as bras applied to a joint
/// state: w = conj(c0) * top + conj(c1) * bottom.
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

Vector project_outcome(const Vector& joint, Outcome k) {
  const OutcomeBra b = bra_of(k);
  return std::conj(b.c0) * top(joint) + std::conj(b.c1) * bottom(joint);
}

Vector prep_qubit(Prep i) {
  const double s = 1.0 / std::sqrt(2.0);
  Vector q(2);
  switch (i) {
    case Prep::ZeroZ: q << 1.0, 0.0; break;
    case Prep::OneZ: q << 0.0, 1.0; break;
    case Prep::PlusX: q << s, s; break;
    case Prep::ZeroY: q << s, Complex(0.0, s); break;
  }
  return q;
}

Vector joint_state(const Vector& qubit, const Vector& ancilla) {
  const Eigen::Index d = ancilla.size();
  Vector out(2 * d);
  out.head(d) = qubit(0) * ancilla;
  out.tail(d) = qubit(1) * ancilla;
  return out;
}

}  // namespace

void AttackPair::validate() const {
  if (ancilla_dim < 1) throw std::domain_error("attack: ancilla dimension must be positive");
  const Eigen::Index n = 2 * ancilla_dim;
  if (forward_unitary.rows() != n || forward_unitary.cols() != n ||
      reverse_unitary.rows() != n || reverse_unitary.cols() != n)
    throw std::domain_error("attack: unitaries must be square of size 2 d_E");
  if (ancilla.size() != ancilla_dim)
    throw std::domain_error("attack: ancilla dimension mismatch");
  const double rf = unitarity_residual(forward_unitary);
  const double rr = unitarity_residual(reverse_unitary);
  if (rf > 1e-10 || rr > 1e-10) {
    std::ostringstream msg;
    msg << "attack: unitarity residual " << std::max(rf, rr) << " exceeds 1e-10";
    throw std::domain_error(msg.str());
  }
  if (std::abs(ancilla.norm() - 1.0) > 1e-12)
    throw std::domain_error("attack: ancilla state not normalized");
}

EveVectors eve_vectors(const AttackPair& attack) {
  attack.validate();
  EveVectors ev;
  for (int a = 0; a < 2; ++a) {
    const Vector w = attack.forward_unitary * embed(a, attack.ancilla);
    ev.forward[2 * a] = top(w);
    ev.forward[2 * a + 1] = bottom(w);
  }
  for (int j = 0; j < 4; ++j) {
    const int bob_bit = j % 2;
    const Vector w = attack.reverse_unitary * embed(bob_bit, ev.forward[j]);
    ev.resend[j][0] = top(w);
    ev.resend[j][1] = bottom(w);
  }
  // Reflection path states; equal to the blocks of U_R U_F |a, chi> by linearity.
  ev.reflect[0] = ev.resend[0][0] + ev.resend[1][0];
  ev.reflect[1] = ev.resend[0][1] + ev.resend[1][1];
  ev.reflect[2] = ev.resend[2][0] + ev.resend[3][0];
  ev.reflect[3] = ev.resend[2][1] + ev.resend[3][1];
  return ev;
}

ChannelStatistics observables(const AttackPair& attack) {
  attack.validate();
  ChannelStatistics stats;
  stats.mode = Mode::Three;
  for (Prep i : kAllPreps) {
    const Vector sent = joint_state(prep_qubit(i), attack.ancilla);
    const Vector after_forward = attack.forward_unitary * sent;
    for (int j = 0; j < 2; ++j) {
      const Vector eve_j = j == 0 ? top(after_forward) : bottom(after_forward);
      const double p_j = eve_j.squaredNorm();
      stats.forward[index(i)][j] = p_j;
      if (p_j < kConditioningFloor) continue;  // conditional rows stay absent
      const Vector resent = embed(j, (eve_j / std::sqrt(p_j)).eval());
      const Vector returned = attack.reverse_unitary * resent;
      for (Outcome k : kAllOutcomes)
        stats.resend[index(i)][j][index(k)] = project_outcome(returned, k).squaredNorm();
    }
    const Vector reflected = attack.reverse_unitary * after_forward;
    for (Outcome k : kAllOutcomes)
      stats.reflect[index(i)][index(k)] = project_outcome(reflected, k).squaredNorm();
  }
  return stats;
}

KeyState key_state(const AttackPair& attack) {
  const EveVectors ev = eve_vectors(attack);
  KeyState ks;
  ks.keep_00 = ev.resend[0][0];
  ks.keep_11 = ev.resend[3][1];
  ks.flip_01 = ev.resend[1][0];
  ks.flip_10 = ev.resend[2][1];
  ks.normalization = 0.5 * (ks.keep_00.squaredNorm() + ks.keep_11.squaredNorm() +
                            ks.flip_01.squaredNorm() + ks.flip_10.squaredNorm());
  if (ks.normalization < 1e-12)
    throw std::domain_error("key_state: degenerate attack, no key iterations survive");
  return ks;
}

CqDecomposition KeyState::to_cq() const {
  CqDecomposition cq;
  cq.zero = {keep_00, flip_01};
  cq.one = {keep_11, flip_10};
  cq.normalization = 2.0 * normalization;
  return cq;
}

double exact_conditional_entropy(const AttackPair& attack) {
  return conditional_entropy_cq(key_state(attack).to_cq());
}

namespace {

/// Unitary dilation of the qubit channel with Kraus operators
/// {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}, p = 2q: the
/// isometry |psi> -> sum_k K_k|psi> (x) |k> on a 4-dimensional environment,
/// completed to an 8x8 unitary by Gram-Schmidt extension.
Matrix depolarizing_dilation(double q) {
  const double p = 2.0 * q;
  const double c0 = std::sqrt(1.0 - 0.75 * p);
  const double c1 = std::sqrt(0.25 * p);
  std::array<Matrix, 4> kraus;
  kraus[0] = c0 * Matrix::Identity(2, 2);
  kraus[1] = Matrix{{0, c1}, {c1, 0}};                                     // X
  kraus[2] = Matrix{{0, Complex(0, -c1)}, {Complex(0, c1), 0}};            // Y
  kraus[3] = Matrix{{c1, 0}, {0, -c1}};                                    // Z
  // Columns for environment input |0>: joint index t*4 + k.
  Matrix u = Matrix::Zero(8, 8);
  for (int t_in = 0; t_in < 2; ++t_in)
    for (int k = 0; k < 4; ++k)
      for (int t_out = 0; t_out < 2; ++t_out)
        u(t_out * 4 + k, t_in * 4 + 0) = kraus[k](t_out, t_in);
  // Extend the remaining columns to an orthonormal basis.
  Eigen::Index filled = 0;
  std::array<Eigen::Index, 8> col_order = {0, 4, 1, 2, 3, 5, 6, 7};
  Matrix basis(8, 8);
  basis.col(0) = u.col(0);
  basis.col(1) = u.col(4);
  filled = 2;
  for (Eigen::Index c = 2; c < 8 && filled < 8; ++c) {
    Vector cand = Vector::Zero(8);
    cand(col_order[c]) = 1.0;
    for (Eigen::Index k = 0; k < filled; ++k) cand -= basis.col(k).dot(cand) * basis.col(k);
    const double nrm = cand.norm();
    if (nrm < 1e-8) continue;
    basis.col(filled++) = cand / nrm;
  }
  if (filled != 8) throw std::logic_error("depolarizing_dilation: completion failed");
  for (Eigen::Index c = 2; c < 8; ++c) {
    const Eigen::Index dest = col_order[c];
    u.col(dest) = basis.col(c);
  }
  return u;
}

}  // namespace

AttackPair depolarizing_attack(double q) {
  if (!(q >= 0.0 && q <= 0.5))
    throw std::domain_error("depolarizing_attack: q outside [0, 0.5]");
  const Matrix hop = depolarizing_dilation(q);
  // Composite ancilla = (forward env) (x) (reverse env), each of dimension 4.
  // Joint ordering |t, f, r| with index t*16 + f*4 + r.
  AttackPair attack;
  attack.ancilla_dim = 16;
  attack.forward_unitary = Matrix::Zero(32, 32);
  attack.reverse_unitary = Matrix::Zero(32, 32);
  for (int t = 0; t < 2; ++t)
    for (int f = 0; f < 4; ++f)
      for (int r = 0; r < 4; ++r)
        for (int t2 = 0; t2 < 2; ++t2) {
          for (int f2 = 0; f2 < 4; ++f2)
            attack.forward_unitary(t2 * 16 + f2 * 4 + r, t * 16 + f * 4 + r) +=
                hop(t2 * 4 + f2, t * 4 + f);
          for (int r2 = 0; r2 < 4; ++r2)
            attack.reverse_unitary(t2 * 16 + f * 4 + r2, t * 16 + f * 4 + r) +=
                hop(t2 * 4 + r2, t * 4 + r);
        }
  attack.ancilla = Vector::Zero(16);
  attack.ancilla(0) = 1.0;  // both environments start in |0>
  attack.validate();
  return attack;
}

AttackPair random_attack(int ancilla_dim, std::uint64_t seed) {
  if (ancilla_dim < 2 || ancilla_dim > 16)
    throw std::domain_error("random_attack: ancilla dimension outside [2, 16]");
  GaussianSource gauss(derive_seed(seed, 0xa77ac4));
  const Eigen::Index n = 2 * ancilla_dim;
  auto haar_like = [&]() {
    Matrix z(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) z(r, c) = Complex(gauss(), gauss());
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    // Fix the phase ambiguity so the draw depends only on the Gaussian sample.
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < n; ++c) {
      const Complex d = r(c, c);
      if (std::abs(d) > 0) q.col(c) *= d / std::abs(d);
    }
    return q;
  };
  AttackPair attack;
  attack.ancilla_dim = ancilla_dim;
  attack.forward_unitary = haar_like();
  attack.reverse_unitary = haar_like();
  attack.ancilla = Vector(ancilla_dim);
  for (Eigen::Index i = 0; i < ancilla_dim; ++i) attack.ancilla(i) = Complex(gauss(), gauss());
  attack.ancilla.normalize();
  attack.validate();
  return attack;
}

namespace {

nlohmann::json complex_list(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    arr.push_back({v(i).real(), v(i).imag()});
  return arr;
}

nlohmann::json complex_list_rowmajor(const Matrix& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      arr.push_back({m(r, c).real(), m(r, c).imag()});
  return arr;
}

Matrix matrix_from_json(const nlohmann::json& arr, Eigen::Index n, const char* name) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(n * n))
    throw std::runtime_error(std::string("attack json: ") + name + " has wrong length");
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& e = arr[r * n + c];
      m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return m;
}

}  // namespace

void write_attack_json(const AttackPair& attack, std::ostream& out) {
  nlohmann::json doc;
  doc["d_E"] = attack.ancilla_dim;
  doc["chi"] = complex_list(attack.ancilla);
  doc["U_F"] = complex_list_rowmajor(attack.forward_unitary);
  doc["U_R"] = complex_list_rowmajor(attack.reverse_unitary);
  out << doc.dump(2) << "\n";
}

AttackPair read_attack_json(std::istream& in) {
  nlohmann::json doc = nlohmann::json::parse(in);
  AttackPair attack;
  attack.ancilla_dim = doc.at("d_E").get<Eigen::Index>();
  const Eigen::Index n = 2 * attack.ancilla_dim;
  const auto& chi = doc.at("chi");
  if (!chi.is_array() || chi.size() != static_cast<std::size_t>(attack.ancilla_dim))
    throw std::runtime_error("attack json: chi has wrong length");
  attack.ancilla = Vector(attack.ancilla_dim);
  for (Eigen::Index i = 0; i < attack.ancilla_dim; ++i)
    attack.ancilla(i) = Complex(chi[i].at(0).get<double>(), chi[i].at(1).get<double>());
  attack.forward_unitary = matrix_from_json(doc.at("U_F"), n, "U_F");
  attack.reverse_unitary = matrix_from_json(doc.at("U_R"), n, "U_R");
  attack.validate();
  return attack;
}

AttackPair load_attack_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open attack file '" + path + "'");
  return read_attack_json(in);
}

}  // namespace sqkd
