#pragma once

#include <array>
#include <span>
#include <vector>

#include "bellspin/quantum_search.hpp"
#include "bellspin/squeezed_split.hpp"

namespace bellspin {

/// Outcome probabilities of collective measurements J_alpha on Alice and
/// J_beta on Bob, resolved by Alice's atom number n_a.
///
/// probs[n_a](r, c) is the probability that Alice holds n_a atoms and finds
/// eigenvalue n_a/2 - r while Bob finds (N - n_a)/2 - c. The indices r, c are
/// the excitation counts in the measured basis.
struct JointDistribution {
  int n_atoms = 0;
  Direction alice;
  Direction bob;
  std::vector<RealMatrix> probs;

  double total() const;
  double probability(int n_a, double k_a, double k_b) const;
};

/// CHSH setting quadruple: Alice a1, a2 and Bob b1, b2.
struct ChshSettings {
  Direction a1, a2, b1, b2;

  std::array<double, 8> angles() const;
  static ChshSettings fromAngles(std::span<const double> x);
};

struct ChshResult {
  int n_atoms = 0;
  double chi_t = 0.0;
  double value = 0.0;
  ChshSettings settings;
};

/// Parity correlators on a fixed split state.
///
/// The state is stored as one Alice x Bob amplitude block per n_a. Every
/// evaluation builds the reduced rotation matrices of all needed spins with
/// one recursion pass per direction and reuses them across correlators;
/// blocks are processed in parallel and summed in a fixed order.
class ParityEvaluator {
 public:
  explicit ParityEvaluator(const SplitState& phi);

  int nAtoms() const { return n_; }
  JointDistribution jointDistribution(const Direction& a, const Direction& b) const;
  double correlator(const Direction& a, const Direction& b) const;
  /// E(a1,b1) + E(a2,b1) + E(a1,b2) - E(a2,b2)
  double chsh(const ChshSettings& s) const;

 private:
  int n_;
  std::vector<ComplexMatrix> blocks_;
};

/// Parity correlators from the single-atom factorization of the split state.
///
/// The beam splitter routes every atom independently (amplitude sqrt(t) to
/// Alice), and the parity of the excitation count along a is the product of
/// a . sigma over Alice's atoms. Averaging each atom's location gives
///
///   E(a, b) = <psi| (g . sigma)^(x N) |psi> = |g|^N <psi| Pi_g |psi>,  g = t a + (1 - t) b,
///
/// with Pi_g the excitation parity along g of the unsplit state. Each
/// direction costs O(N^2) with the eigenvectors of Jx cached.
class FactorizedParityEvaluator {
 public:
  explicit FactorizedParityEvaluator(const DickeState& psi, double transmission = 0.5);

  double correlator(const Direction& a, const Direction& b) const;
  double chsh(const ChshSettings& s) const;
  /// <psi| (-1)^(N/2 - J_n) |psi> for a unit vector n.
  double parityAlong(const Vector3& n) const;

 private:
  int n_;
  double t_;
  Eigen::VectorXcd psi_;  // descending Sz order
  RealMatrix jx_vectors_;
  Eigen::VectorXd jx_values_;
};

/// Probabilities computed block by block with wignerRotation, serially.
JointDistribution jointDistributionReference(const SplitState& phi, const Direction& a, const Direction& b);

JointDistribution jointDistribution(const SplitState& phi, const Direction& a, const Direction& b);

/// sum P (-1)^(r + c) with r, c the excitation counts (empty register: +1).
double parityCorrelator(const JointDistribution& jd);

double chshValue(const SplitState& phi, const ChshSettings& s);

/// Maximizes chshValue over all eight angles of the twisted, balanced-split
/// state. Restart r starts from random angles of substream (cfg.seed, r):
/// even restarts draw all directions uniformly, odd ones cluster them within
/// ~pi/sqrt(N) of a random axis, where correlators of large states live.
/// `warm_starts` run in addition. The search runs on the factorized
/// evaluator; the returned value is recomputed from the joint distribution.
ChshResult optimizeChsh(int n_atoms, double chi_t, const SearchConfig& cfg,
                        const std::vector<ChshSettings>& warm_starts = {});

/// optimizeChsh at each chi_t in the given order. Point k searches with
/// seed substream (cfg.seed, k) and is also warm-started from point k-1.
std::vector<ChshResult> sweepChi(int n_atoms, const std::vector<double>& chi_grid, const SearchConfig& cfg);

/// optimizeChsh for each N. Point k searches with seed substream (cfg.seed, k)
/// and is also warm-started from point k-1.
std::vector<ChshResult> sweepN(double chi_t, const std::vector<int>& n_list, const SearchConfig& cfg);

}  // namespace bellspin
