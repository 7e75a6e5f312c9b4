#include "bellspin/spin_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bellspin {

SpinSector::SpinSector(int two_j) : two_j_(two_j) {
  if (two_j < 0) {
    throw std::invalid_argument("SpinSector: two_j must be non-negative, got " + std::to_string(two_j));
  }
}

namespace {

double wrap(double angle, double period) {
  double r = std::fmod(angle, period);
  if (r < 0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

}  // namespace

Direction::Direction(double theta, double phi) {
  constexpr double pi = std::numbers::pi;
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw std::invalid_argument("Direction: angles must be finite");
  }
  double t = wrap(theta, 2 * pi);
  if (t > pi) {
    t = 2 * pi - t;
    phi += pi;
  }
  theta_ = t;
  phi_ = wrap(phi, 2 * pi);
}

Direction Direction::fromVector(const Vector3& v) {
  const double r = v.norm();
  if (r == 0.0) return Direction::z();
  const double c = std::clamp(v.z() / r, -1.0, 1.0);
  return {std::acos(c), std::atan2(v.y(), v.x())};
}

Vector3 Direction::unitVector() const {
  const double s = std::sin(theta_);
  return {s * std::cos(phi_), s * std::sin(phi_), std::cos(theta_)};
}

HermitianMatrix::HermitianMatrix(ComplexMatrix m, double tolerance) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw std::invalid_argument("HermitianMatrix: matrix is not square");
  }
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double deviation = m_.rows() == 0 ? 0.0 : (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (deviation > tolerance * scale) {
    throw std::invalid_argument("HermitianMatrix: deviation from adjoint " + std::to_string(deviation) +
                                " exceeds tolerance");
  }
}

SpinComponents spinComponents(SpinSector sector) {
  const int d = sector.dim();
  const double j = sector.j();
  ComplexMatrix sx = ComplexMatrix::Zero(d, d);
  ComplexMatrix sy = ComplexMatrix::Zero(d, d);
  ComplexMatrix sz = ComplexMatrix::Zero(d, d);
  for (int r = 0; r < d; ++r) {
    sz(r, r) = sector.mAt(r);
  }
  // S+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>; |m+1> sits one row above |m>.
  for (int r = 1; r < d; ++r) {
    const double m = sector.mAt(r);
    const double c = std::sqrt(j * (j + 1) - m * (m + 1));
    sx(r - 1, r) = 0.5 * c;
    sx(r, r - 1) = 0.5 * c;
    sy(r - 1, r) = Complex(0, -0.5 * c);
    sy(r, r - 1) = Complex(0, 0.5 * c);
  }
  return {HermitianMatrix(std::move(sx)), HermitianMatrix(std::move(sy)), HermitianMatrix(std::move(sz))};
}

HermitianMatrix directionOperator(SpinSector sector, const Direction& d) {
  const SpinComponents s = spinComponents(sector);
  const Vector3 u = d.unitVector();
  return HermitianMatrix(u.x() * s.sx.matrix() + u.y() * s.sy.matrix() + u.z() * s.sz.matrix());
}

namespace {

// One step of the coupling recursion: d^{n} from d^{n-1}. Row/column index
// counts quanta in the second boson mode, so index 0 is m = +j.
RealMatrix risboStep(const RealMatrix& prev, int n, double p, double s, const std::vector<double>& sqrt_int) {
  RealMatrix next(n + 1, n + 1);
  const double inv_n = 1.0 / n;
  for (int k = 0; k <= n; ++k) {
    for (int i = 0; i <= n; ++i) {
      double acc = 0.0;
      if (k < n) {
        double a = 0.0;
        if (i < n) a += p * sqrt_int[n - i] * prev(i, k);
        if (i > 0) a += s * sqrt_int[i] * prev(i - 1, k);
        acc += sqrt_int[n - k] * a;
      }
      if (k > 0) {
        double b = 0.0;
        if (i < n) b -= s * sqrt_int[n - i] * prev(i, k - 1);
        if (i > 0) b += p * sqrt_int[i] * prev(i - 1, k - 1);
        acc += sqrt_int[k] * b;
      }
      next(i, k) = acc * inv_n;
    }
  }
  return next;
}

std::vector<double> sqrtTable(int n) {
  std::vector<double> t(static_cast<size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) t[i] = std::sqrt(static_cast<double>(i));
  return t;
}

}  // namespace

std::vector<RealMatrix> wignerSmallDLadder(int n_max, double theta) {
  if (n_max < 0) throw std::invalid_argument("wignerSmallDLadder: n_max must be non-negative");
  const double p = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const std::vector<double> sq = sqrtTable(n_max);
  std::vector<RealMatrix> out;
  out.reserve(static_cast<size_t>(n_max) + 1);
  out.push_back(RealMatrix::Ones(1, 1));
  for (int n = 1; n <= n_max; ++n) {
    out.push_back(risboStep(out.back(), n, p, s, sq));
  }
  return out;
}

RealMatrix wignerSmallD(int n, double theta) {
  if (n < 0) throw std::invalid_argument("wignerSmallD: n must be non-negative");
  const double p = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const std::vector<double> sq = sqrtTable(n);
  RealMatrix d = RealMatrix::Ones(1, 1);
  for (int k = 1; k <= n; ++k) d = risboStep(d, k, p, s, sq);
  return d;
}

ComplexMatrix wignerRotation(int n, const Direction& d) {
  const RealMatrix small = wignerSmallD(n, d.theta());
  ComplexMatrix out(n + 1, n + 1);
  for (int r = 0; r <= n; ++r) {
    const double k = 0.5 * n - r;
    const Complex phase = std::polar(1.0, -d.phi() * k);
    out.row(r) = phase * small.row(r).cast<Complex>();
  }
  return out;
}

double maxEigenvalue(const HermitianMatrix& h) {
  const ComplexMatrix& m = h.matrix();
  if (m.rows() == 0) throw std::invalid_argument("maxEigenvalue: empty matrix");
  if (m.rows() == 1) return m(0, 0).real();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("maxEigenvalue: eigensolver did not converge");
  }
  return solver.eigenvalues().maxCoeff();
}

double maxEigenvalue(const ComplexMatrix& h, double tolerance) {
  return maxEigenvalue(HermitianMatrix(h, tolerance));
}

}  // namespace bellspin
