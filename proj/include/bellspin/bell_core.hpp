#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "bellspin/spin_algebra.hpp"

namespace bellspin {

/// Bell expression in normalized outcomes (each outcome in [-1/2, 1/2]):
///
///   sum_ij w_ij <a_i b_j> + sum_i va_i <a_i> + sum_j vb_j <b_j>  <=  local bound
///
/// The conventional +-1 form relates through w = w' / N^2, v = v' / N with the
/// same bound, so only this representation is stored.
class BellInequality {
 public:
  /// All-zero inequality with m settings per party.
  explicit BellInequality(int m);
  BellInequality(RealMatrix w, Eigen::VectorXd va, Eigen::VectorXd vb,
                 std::optional<double> local_bound = std::nullopt);

  /// CHSH, <a1 b1> + <a2 b1> + <a1 b2> - <a2 b2>, with its local bound 1/2.
  static BellInequality chsh();

  int m() const { return static_cast<int>(w_.rows()); }
  const RealMatrix& w() const { return w_; }
  const Eigen::VectorXd& va() const { return va_; }
  const Eigen::VectorXd& vb() const { return vb_; }
  const std::optional<double>& localBound() const { return local_bound_; }

  BellInequality withLocalBound(double bound) const;
  BellInequality withoutLocalBound() const;
  /// Every coefficient (and a cached bound) multiplied by c.
  BellInequality scaled(double c) const;

  /// Value of the expression for given correlators.
  double evaluate(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  bool operator==(const BellInequality&) const;

 private:
  RealMatrix w_;
  Eigen::VectorXd va_;
  Eigen::VectorXd vb_;
  std::optional<double> local_bound_;
};

struct MeasurementSettings {
  std::vector<Direction> alpha;
  std::vector<Direction> beta;

  int m() const { return static_cast<int>(alpha.size()); }
  /// Alice x, z; Bob (x + z)/sqrt2, (x - z)/sqrt2.
  static MeasurementSettings chshOptimal();
};

/// The Bell operator collapsed onto the spin vectors:
///   B = s_A . W . s_B + s_A . VA + s_B . VB
struct WVDecomposition {
  Eigen::Matrix3d W = Eigen::Matrix3d::Zero();
  Vector3 VA = Vector3::Zero();
  Vector3 VB = Vector3::Zero();
};

WVDecomposition assembleWV(const BellInequality& ineq, const MeasurementSettings& s);

/// Twice the spin of every total-spin sector of N spin-1/2s, descending.
std::vector<int> sectorTwoJs(int n_spins);

/// Bell operator on the sector pair (jA, jB) of N + N spins, built from the
/// normalized projections s = S / N.
HermitianMatrix bellOperator(const WVDecomposition& wv, SpinSector ja, SpinSector jb, int n_spins);

/// Maximum eigenvalue of the Bell operator over every sector pair for a fixed
/// N. Spin matrices are built once, so repeated evaluation inside a settings
/// search stays cheap.
class BellOperatorEvaluator {
 public:
  explicit BellOperatorEvaluator(int n_spins);

  int nSpins() const { return n_; }
  double maxValue(const WVDecomposition& wv) const;

 private:
  struct SectorSpin {
    int two_j;
    std::array<ComplexMatrix, 3> s;  // Sx, Sy, Sz divided by N
  };
  double sectorPairMax(const WVDecomposition& wv, const SectorSpin& a, const SectorSpin& b) const;

  int n_;
  std::vector<SectorSpin> sectors_;
};

/// Largest <B'> over all N + N spin states at fixed settings.
double quantumValue(const BellInequality& ineq, const MeasurementSettings& s, int n_spins);

/// <B'> - local bound; positive values certify Bell correlations.
double witnessValue(double state_expectation, const BellInequality& ineq);

}  // namespace bellspin
