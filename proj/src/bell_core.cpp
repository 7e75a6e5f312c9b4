#include "bellspin/bell_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bellspin {

namespace {

void requireFinite(const auto& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string("BellInequality: non-finite ") + what);
}

}  // namespace

BellInequality::BellInequality(int m)
    : BellInequality(RealMatrix::Zero(m < 1 ? 1 : m, m < 1 ? 1 : m), Eigen::VectorXd::Zero(m < 1 ? 1 : m),
                     Eigen::VectorXd::Zero(m < 1 ? 1 : m)) {
  if (m < 1) throw std::invalid_argument("BellInequality: m must be at least 1");
}

BellInequality::BellInequality(RealMatrix w, Eigen::VectorXd va, Eigen::VectorXd vb,
                               std::optional<double> local_bound)
    : w_(std::move(w)), va_(std::move(va)), vb_(std::move(vb)), local_bound_(local_bound) {
  const auto m = w_.rows();
  if (m < 1 || w_.cols() != m || va_.size() != m || vb_.size() != m) {
    throw std::invalid_argument("BellInequality: coefficient shapes must be m x m, m, m with m >= 1");
  }
  requireFinite(w_, "w");
  requireFinite(va_, "va");
  requireFinite(vb_, "vb");
  if (local_bound_ && !std::isfinite(*local_bound_)) {
    throw std::invalid_argument("BellInequality: non-finite local bound");
  }
}

BellInequality BellInequality::chsh() {
  RealMatrix w(2, 2);
  w << 1, 1, 1, -1;
  return {w, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), 0.5};
}

BellInequality BellInequality::withLocalBound(double bound) const { return {w_, va_, vb_, bound}; }

BellInequality BellInequality::withoutLocalBound() const { return {w_, va_, vb_}; }

BellInequality BellInequality::scaled(double c) const {
  std::optional<double> lb;
  if (local_bound_) lb = c * *local_bound_;
  return {c * w_, c * va_, c * vb_, lb};
}

double BellInequality::evaluate(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  return a.dot(w_ * b) + va_.dot(a) + vb_.dot(b);
}

bool BellInequality::operator==(const BellInequality& o) const {
  return w_ == o.w_ && va_ == o.va_ && vb_ == o.vb_ && local_bound_ == o.local_bound_;
}

MeasurementSettings MeasurementSettings::chshOptimal() {
  const double pi = 3.14159265358979323846;
  return {{Direction::x(), Direction::z()}, {Direction(pi / 4, 0.0), Direction(3 * pi / 4, 0.0)}};
}

WVDecomposition assembleWV(const BellInequality& ineq, const MeasurementSettings& s) {
  const int m = ineq.m();
  if (s.m() != m || static_cast<int>(s.beta.size()) != m) {
    throw std::invalid_argument("assembleWV: inequality has " + std::to_string(m) + " settings, got " +
                                std::to_string(s.alpha.size()) + " / " + std::to_string(s.beta.size()));
  }
  WVDecomposition wv;
  std::vector<Vector3> a(m), b(m);
  for (int i = 0; i < m; ++i) {
    a[i] = s.alpha[i].unitVector();
    b[i] = s.beta[i].unitVector();
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) wv.W += ineq.w()(i, j) * a[i] * b[j].transpose();
    wv.VA += ineq.va()(i) * a[i];
    wv.VB += ineq.vb()(i) * b[i];
  }
  return wv;
}

std::vector<int> sectorTwoJs(int n_spins) {
  if (n_spins < 1) throw std::invalid_argument("sectorTwoJs: need at least one spin");
  std::vector<int> out;
  for (int t = n_spins; t >= 0; t -= 2) out.push_back(t);
  return out;
}

namespace {

void requireSector(SpinSector s, int n_spins) {
  if (n_spins < 1) throw std::invalid_argument("bellOperator: N must be at least 1");
  if (s.twoJ() > n_spins || (n_spins - s.twoJ()) % 2 != 0) {
    throw std::invalid_argument("bellOperator: two_j = " + std::to_string(s.twoJ()) +
                                " is not a sector of " + std::to_string(n_spins) + " spins");
  }
}

std::array<ComplexMatrix, 3> normalizedSpins(SpinSector s, int n_spins) {
  const SpinComponents c = spinComponents(s);
  const double inv = 1.0 / n_spins;
  return {inv * c.sx.matrix(), inv * c.sy.matrix(), inv * c.sz.matrix()};
}

// sum_y kron(left[y], right[y]) + kron(local_a, 1) + kron(1, local_b)
ComplexMatrix assembleProduct(const std::array<ComplexMatrix, 3>& left, const std::array<ComplexMatrix, 3>& right,
                              const ComplexMatrix& local_a, const ComplexMatrix& local_b) {
  const Eigen::Index da = local_a.rows();
  const Eigen::Index db = local_b.rows();
  ComplexMatrix out = ComplexMatrix::Zero(da * db, da * db);
  for (int y = 0; y < 3; ++y) {
    for (Eigen::Index ia = 0; ia < da; ++ia) {
      for (Eigen::Index ka = 0; ka < da; ++ka) {
        const Complex l = left[y](ia, ka);
        if (l == Complex(0.0)) continue;
        out.block(ia * db, ka * db, db, db) += l * right[y];
      }
    }
  }
  for (Eigen::Index ia = 0; ia < da; ++ia) {
    for (Eigen::Index ka = 0; ka < da; ++ka) {
      const Complex l = local_a(ia, ka);
      if (l != Complex(0.0)) out.block(ia * db, ka * db, db, db).diagonal().array() += l;
    }
    out.block(ia * db, ia * db, db, db) += local_b;
  }
  return out;
}

}  // namespace

HermitianMatrix bellOperator(const WVDecomposition& wv, SpinSector ja, SpinSector jb, int n_spins) {
  requireSector(ja, n_spins);
  requireSector(jb, n_spins);
  const auto sa = normalizedSpins(ja, n_spins);
  const auto sb = normalizedSpins(jb, n_spins);
  std::array<ComplexMatrix, 3> left;
  ComplexMatrix local_a = ComplexMatrix::Zero(ja.dim(), ja.dim());
  ComplexMatrix local_b = ComplexMatrix::Zero(jb.dim(), jb.dim());
  for (int y = 0; y < 3; ++y) {
    left[y] = ComplexMatrix::Zero(ja.dim(), ja.dim());
    for (int x = 0; x < 3; ++x) left[y] += wv.W(x, y) * sa[x];
    local_a += wv.VA(y) * sa[y];
    local_b += wv.VB(y) * sb[y];
  }
  return HermitianMatrix(assembleProduct(left, sb, local_a, local_b));
}

BellOperatorEvaluator::BellOperatorEvaluator(int n_spins) : n_(n_spins) {
  for (int t : sectorTwoJs(n_spins)) sectors_.push_back({t, normalizedSpins(SpinSector(t), n_spins)});
}

double BellOperatorEvaluator::sectorPairMax(const WVDecomposition& wv, const SectorSpin& a,
                                            const SectorSpin& b) const {
  // With a spin-0 side the operator reduces to s . V on the other side,
  // whose top eigenvalue is j |V| / N.
  if (a.two_j == 0 && b.two_j == 0) return 0.0;
  if (b.two_j == 0) return 0.5 * a.two_j * wv.VA.norm() / n_;
  if (a.two_j == 0) return 0.5 * b.two_j * wv.VB.norm() / n_;

  const Eigen::Index da = a.two_j + 1;
  const Eigen::Index db = b.two_j + 1;
  std::array<ComplexMatrix, 3> left;
  ComplexMatrix local_a = ComplexMatrix::Zero(da, da);
  ComplexMatrix local_b = ComplexMatrix::Zero(db, db);
  for (int y = 0; y < 3; ++y) {
    left[y] = wv.W(0, y) * a.s[0] + wv.W(1, y) * a.s[1] + wv.W(2, y) * a.s[2];
    local_a += wv.VA(y) * a.s[y];
    local_b += wv.VB(y) * b.s[y];
  }
  const ComplexMatrix op = assembleProduct(left, b.s, local_a, local_b);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(op, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("BellOperatorEvaluator: eigensolver failed");
  return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

double BellOperatorEvaluator::maxValue(const WVDecomposition& wv) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& a : sectors_) {
    for (const auto& b : sectors_) best = std::max(best, sectorPairMax(wv, a, b));
  }
  return best;
}

double quantumValue(const BellInequality& ineq, const MeasurementSettings& s, int n_spins) {
  return BellOperatorEvaluator(n_spins).maxValue(assembleWV(ineq, s));
}

double witnessValue(double state_expectation, const BellInequality& ineq) {
  if (!ineq.localBound()) throw std::invalid_argument("witnessValue: inequality has no local bound");
  return state_expectation - *ineq.localBound();
}

}  // namespace bellspin
