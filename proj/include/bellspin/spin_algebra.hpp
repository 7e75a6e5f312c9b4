#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace bellspin {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector3 = Eigen::Vector3d;

/// Total-spin irrep of a collective spin, labelled by twice the spin.
///
/// All matrices built for a sector use the |j, m> basis ordered by
/// descending Sz eigenvalue: row 0 is m = j, row two_j is m = -j. The row
/// index therefore counts excitations (atoms in internal state 2).
class SpinSector {
 public:
  explicit SpinSector(int two_j);

  int twoJ() const { return two_j_; }
  int dim() const { return two_j_ + 1; }
  double j() const { return 0.5 * two_j_; }
  /// Sz eigenvalue carried by basis row `row`.
  double mAt(int row) const { return j() - row; }

  bool operator==(const SpinSector&) const = default;

 private:
  int two_j_;
};

/// Measurement direction given by polar and azimuthal angles.
///
/// Any real angle pair is accepted and folded into theta in [0, pi],
/// phi in [0, 2 pi) describing the same unit vector.
class Direction {
 public:
  Direction() = default;
  Direction(double theta, double phi);

  static Direction x() { return {kHalfPi, 0.0}; }
  static Direction y() { return {kHalfPi, kHalfPi}; }
  static Direction z() { return {0.0, 0.0}; }
  /// Direction of a nonzero vector; the zero vector maps to +z.
  static Direction fromVector(const Vector3& v);

  double theta() const { return theta_; }
  double phi() const { return phi_; }
  Vector3 unitVector() const;

 private:
  static constexpr double kHalfPi = 1.5707963267948966;
  double theta_ = 0.0;
  double phi_ = 0.0;
};

/// Complex square matrix checked to be Hermitian on construction.
class HermitianMatrix {
 public:
  static constexpr double kTolerance = 1e-12;

  /// Throws std::invalid_argument if `m` is not square or deviates from its
  /// adjoint by more than `tolerance` in any entry.
  explicit HermitianMatrix(ComplexMatrix m, double tolerance = kTolerance);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

struct SpinComponents {
  HermitianMatrix sx;
  HermitianMatrix sy;
  HermitianMatrix sz;
};

/// Angular-momentum matrices (Sx, Sy, Sz) of a sector.
SpinComponents spinComponents(SpinSector sector);

/// d . (Sx, Sy, Sz) on the sector.
HermitianMatrix directionOperator(SpinSector sector, const Direction& d);

/// Reduced rotation matrix <row| exp(-i theta Jy) |col> on spin n/2.
///
/// Built by the four-term spin-1/2 coupling recursion (Risbo), which stays
/// accurate for n in the thousands. Entries are real.
RealMatrix wignerSmallD(int n, double theta);

/// wignerSmallD for every n in [0, n_max] from one pass of the recursion.
std::vector<RealMatrix> wignerSmallDLadder(int n_max, double theta);

/// Rotation matrix with entries exp(-i phi k) <k| exp(-i theta Jy) |col>,
/// where k is the Sz eigenvalue of row `row`. Its columns are the
/// eigenvectors of d . J on spin n/2, column c having eigenvalue n/2 - c.
ComplexMatrix wignerRotation(int n, const Direction& d);

/// Largest eigenvalue of a Hermitian matrix.
double maxEigenvalue(const HermitianMatrix& h);

/// Largest eigenvalue of a raw matrix; rejects input that is not Hermitian
/// within `tolerance`.
double maxEigenvalue(const ComplexMatrix& h, double tolerance = HermitianMatrix::kTolerance);

}  // namespace bellspin
