#include "bellspin/parity_chsh.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bellspin/nelder_mead.hpp"
#include "bellspin/random.hpp"

namespace bellspin {

double JointDistribution::total() const {
  double s = 0.0;
  for (const auto& b : probs) s += b.sum();
  return s;
}

double JointDistribution::probability(int n_a, double k_a, double k_b) const {
  if (n_a < 0 || n_a > n_atoms) return 0.0;
  const double r = 0.5 * n_a - k_a;
  const double c = 0.5 * (n_atoms - n_a) - k_b;
  if (r != std::floor(r) || c != std::floor(c) || r < 0 || c < 0 || r > n_a || c > n_atoms - n_a) return 0.0;
  return probs[n_a](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

std::array<double, 8> ChshSettings::angles() const {
  return {a1.theta(), a1.phi(), a2.theta(), a2.phi(), b1.theta(), b1.phi(), b2.theta(), b2.phi()};
}

ChshSettings ChshSettings::fromAngles(std::span<const double> x) {
  if (x.size() != 8) throw std::invalid_argument("ChshSettings: expected 8 angles");
  return {{x[0], x[1]}, {x[2], x[3]}, {x[4], x[5]}, {x[6], x[7]}};
}

namespace {

std::vector<ComplexMatrix> amplitudeBlocks(const SplitState& phi) {
  const int n = phi.nAtoms();
  std::vector<ComplexMatrix> blocks(static_cast<size_t>(n) + 1);
  for (int na = 0; na <= n; ++na) blocks[na] = ComplexMatrix::Zero(na + 1, n - na + 1);
  // Alice holds (k, l) of (state 1, state 2); her excitation count is l,
  // Bob's is N - m - l.
  for (int m = 0; m <= n; ++m) {
    for (int k = 0; k <= m; ++k) {
      for (int l = 0; l <= n - m; ++l) blocks[k + l](l, n - m - l) = phi(m, k, l);
    }
  }
  return blocks;
}

// diag(exp(i phi s_r)) with s_r = n/2 - r
Eigen::VectorXcd conjugatePhases(int n, double phi) {
  Eigen::VectorXcd v(n + 1);
  for (int r = 0; r <= n; ++r) v(r) = std::polar(1.0, phi * (0.5 * n - r));
  return v;
}

Eigen::VectorXd paritySigns(int n) {
  Eigen::VectorXd v(n + 1);
  for (int r = 0; r <= n; ++r) v(r) = (r % 2) ? -1.0 : 1.0;
  return v;
}

// d^T * p with real d
ComplexMatrix leftReal(const RealMatrix& d, const ComplexMatrix& p) {
  ComplexMatrix out(d.cols(), p.cols());
  out.real() = d.transpose() * p.real();
  out.imag() = d.transpose() * p.imag();
  return out;
}

// p * d with real d
ComplexMatrix rightReal(const ComplexMatrix& p, const RealMatrix& d) {
  ComplexMatrix out(p.rows(), d.cols());
  out.real() = p.real() * d;
  out.imag() = p.imag() * d;
  return out;
}

double paritySum(const ComplexMatrix& x, const Eigen::VectorXd& sa, const Eigen::VectorXd& sb) {
  return sa.transpose() * x.cwiseAbs2() * sb;
}

}  // namespace

ParityEvaluator::ParityEvaluator(const SplitState& phi) : n_(phi.nAtoms()), blocks_(amplitudeBlocks(phi)) {}

JointDistribution ParityEvaluator::jointDistribution(const Direction& a, const Direction& b) const {
  const auto da = wignerSmallDLadder(n_, a.theta());
  const auto db = wignerSmallDLadder(n_, b.theta());
  JointDistribution jd{n_, a, b, std::vector<RealMatrix>(static_cast<size_t>(n_) + 1)};
#pragma omp parallel for schedule(dynamic)
  for (int na = 0; na <= n_; ++na) {
    const int nb = n_ - na;
    const ComplexMatrix p = conjugatePhases(na, a.phi()).asDiagonal() * blocks_[na];
    const ComplexMatrix q = leftReal(da[na], p) * conjugatePhases(nb, b.phi()).asDiagonal();
    RealMatrix pr = rightReal(q, db[nb]).cwiseAbs2();
    jd.probs[na] = pr.cwiseMax(0.0);
  }
  return jd;
}

double ParityEvaluator::correlator(const Direction& a, const Direction& b) const {
  return parityCorrelator(jointDistribution(a, b));
}

double ParityEvaluator::chsh(const ChshSettings& s) const {
  const std::array<Direction, 2> alice{s.a1, s.a2};
  const std::array<Direction, 2> bob{s.b1, s.b2};
  std::array<std::vector<RealMatrix>, 2> da, db;
  for (int i = 0; i < 2; ++i) {
    da[i] = wignerSmallDLadder(n_, alice[i].theta());
    db[i] = wignerSmallDLadder(n_, bob[i].theta());
  }
  std::vector<std::array<double, 4>> partial(static_cast<size_t>(n_) + 1);
#pragma omp parallel for schedule(dynamic)
  for (int na = 0; na <= n_; ++na) {
    const int nb = n_ - na;
    const Eigen::VectorXd sa = paritySigns(na);
    const Eigen::VectorXd sb = paritySigns(nb);
    for (int i = 0; i < 2; ++i) {
      const ComplexMatrix left = leftReal(da[i][na], conjugatePhases(na, alice[i].phi()).asDiagonal() * blocks_[na]);
      for (int j = 0; j < 2; ++j) {
        const ComplexMatrix q = left * conjugatePhases(nb, bob[j].phi()).asDiagonal();
        partial[na][2 * i + j] = paritySum(rightReal(q, db[j][nb]), sa, sb);
      }
    }
  }
  std::array<double, 4> e{};
  for (const auto& p : partial) {
    for (int t = 0; t < 4; ++t) e[t] += p[t];
  }
  // e = {E(a1,b1), E(a1,b2), E(a2,b1), E(a2,b2)}
  return e[0] + e[2] + e[1] - e[3];
}

FactorizedParityEvaluator::FactorizedParityEvaluator(const DickeState& psi, double transmission)
    : n_(psi.n_atoms), t_(transmission) {
  if (!(transmission > 0.0 && transmission < 1.0)) {
    throw std::invalid_argument("FactorizedParityEvaluator: transmission must lie in (0, 1)");
  }
  if (n_ < 1 || psi.c.size() != static_cast<size_t>(n_) + 1) {
    throw std::invalid_argument("FactorizedParityEvaluator: malformed state");
  }
  psi_.resize(n_ + 1);
  for (int i = 0; i <= n_; ++i) psi_(i) = psi.c[n_ - i];
  // Jx is real tridiagonal in the descending Sz basis.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n_ + 1);
  Eigen::VectorXd sub(n_);
  for (int i = 0; i < n_; ++i) sub(i) = 0.5 * std::sqrt(static_cast<double>(i + 1) * (n_ - i));
  Eigen::SelfAdjointEigenSolver<RealMatrix> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw std::runtime_error("FactorizedParityEvaluator: Jx diagonalization failed");
  jx_vectors_ = es.eigenvectors();
  // The spectrum is -j..j exactly.
  jx_values_ = (2.0 * es.eigenvalues()).array().round() * 0.5;
}

double FactorizedParityEvaluator::parityAlong(const Vector3& n) const {
  const Direction d = Direction::fromVector(n);
  // |<mu_n|psi>| = |(e^{i theta Jy} e^{i phi Jz} psi)_mu| and
  // e^{i theta Jy} = e^{-i pi/2 Jz} e^{i theta Jx} e^{i pi/2 Jz}; the outer
  // diagonal phase drops out of the probabilities.
  Eigen::VectorXcd u(n_ + 1);
  const double turn = d.phi() + 0.5 * std::numbers::pi;
  for (int i = 0; i <= n_; ++i) u(i) = std::polar(1.0, turn * (0.5 * n_ - i)) * psi_(i);
  Eigen::VectorXcd x(n_ + 1);
  x.real() = jx_vectors_.transpose() * u.real();
  x.imag() = jx_vectors_.transpose() * u.imag();
  for (int k = 0; k <= n_; ++k) x(k) *= std::polar(1.0, d.theta() * jx_values_(k));
  Eigen::VectorXd re = jx_vectors_ * x.real();
  Eigen::VectorXd im = jx_vectors_ * x.imag();
  double e = 0.0;
  for (int i = 0; i <= n_; ++i) {
    const double p = re(i) * re(i) + im(i) * im(i);
    e += (i % 2) ? -p : p;
  }
  return e;
}

double FactorizedParityEvaluator::correlator(const Direction& a, const Direction& b) const {
  const Vector3 g = t_ * a.unitVector() + (1.0 - t_) * b.unitVector();
  const double len = g.norm();
  if (len < 1e-300) return 0.0;
  return std::pow(len, n_) * parityAlong(g / len);
}

double FactorizedParityEvaluator::chsh(const ChshSettings& s) const {
  return correlator(s.a1, s.b1) + correlator(s.a2, s.b1) + correlator(s.a1, s.b2) - correlator(s.a2, s.b2);
}

JointDistribution jointDistributionReference(const SplitState& phi, const Direction& a, const Direction& b) {
  const int n = phi.nAtoms();
  JointDistribution jd{n, a, b, {}};
  for (int na = 0; na <= n; ++na) {
    ComplexMatrix block = ComplexMatrix::Zero(na + 1, n - na + 1);
    for (int l = 0; l <= na; ++l) {
      const int k = na - l;
      for (int m = k; m <= n - l; ++m) block(l, n - m - l) = phi(m, k, l);
    }
    const ComplexMatrix ra = wignerRotation(na, a);
    const ComplexMatrix rb = wignerRotation(n - na, b);
    const ComplexMatrix x = ra.adjoint() * block * rb.conjugate();
    jd.probs.push_back(x.cwiseAbs2());
  }
  return jd;
}

JointDistribution jointDistribution(const SplitState& phi, const Direction& a, const Direction& b) {
  return ParityEvaluator(phi).jointDistribution(a, b);
}

double parityCorrelator(const JointDistribution& jd) {
  double e = 0.0;
  for (int na = 0; na <= jd.n_atoms; ++na) {
    e += paritySigns(na).dot(jd.probs[na] * paritySigns(jd.n_atoms - na));
  }
  return e;
}

double chshValue(const SplitState& phi, const ChshSettings& s) { return ParityEvaluator(phi).chsh(s); }

ChshResult optimizeChsh(int n_atoms, double chi_t, const SearchConfig& cfg,
                        const std::vector<ChshSettings>& warm_starts) {
  cfg.validate();
  const DickeState psi = oneAxisTwisted(n_atoms, chi_t);
  const FactorizedParityEvaluator fast(psi);
  const Objective objective = [&](std::span<const double> x) { return -fast.chsh(ChshSettings::fromAngles(x)); };
  NelderMeadOptions opt;
  opt.max_evaluations = cfg.max_iterations;
  opt.ftol = cfg.tolerance;

  const int runs = cfg.restarts + static_cast<int>(warm_starts.size());
  std::vector<NelderMeadResult> results(static_cast<size_t>(runs));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < runs; ++r) {
    std::vector<double> x0(8);
    if (r < cfg.restarts) {
      SplitMix64 rng(substreamSeed(cfg.seed, static_cast<std::uint64_t>(r)));
      if (r % 2 == 0) {
        for (int k = 0; k < 4; ++k) {
          x0[2 * k] = std::acos(rng.uniform(-1.0, 1.0));
          x0[2 * k + 1] = rng.uniform(0.0, 2 * std::numbers::pi);
        }
      } else {
        const double theta = std::acos(rng.uniform(-1.0, 1.0));
        const double phi = rng.uniform(0.0, 2 * std::numbers::pi);
        const double spread = std::numbers::pi / std::sqrt(static_cast<double>(n_atoms));
        for (int k = 0; k < 4; ++k) {
          x0[2 * k] = theta + rng.uniform(-spread, spread);
          x0[2 * k + 1] = phi + rng.uniform(-spread, spread);
        }
      }
    } else {
      const auto a = warm_starts[r - cfg.restarts].angles();
      x0.assign(a.begin(), a.end());
    }
    results[r] = nelderMeadMinimize(objective, std::move(x0), opt);
  }
  size_t best = 0;
  for (size_t r = 1; r < results.size(); ++r) {
    if (results[r].value < results[best].value) best = r;
  }
  ChshResult out;
  out.n_atoms = n_atoms;
  out.chi_t = chi_t;
  out.settings = ChshSettings::fromAngles(results[best].x);
  out.value = ParityEvaluator(splitState(psi)).chsh(out.settings);
  return out;
}

std::vector<ChshResult> sweepChi(int n_atoms, const std::vector<double>& chi_grid, const SearchConfig& cfg) {
  if (chi_grid.empty()) throw std::invalid_argument("sweepChi: empty chi_t grid");
  std::vector<ChshResult> out;
  for (size_t k = 0; k < chi_grid.size(); ++k) {
    SearchConfig c = cfg;
    c.seed = substreamSeed(cfg.seed, k);
    std::vector<ChshSettings> warm;
    if (k > 0) warm.push_back(out.back().settings);
    out.push_back(optimizeChsh(n_atoms, chi_grid[k], c, warm));
  }
  return out;
}

std::vector<ChshResult> sweepN(double chi_t, const std::vector<int>& n_list, const SearchConfig& cfg) {
  if (n_list.empty()) throw std::invalid_argument("sweepN: empty atom-number list");
  std::vector<ChshResult> out;
  for (size_t k = 0; k < n_list.size(); ++k) {
    SearchConfig c = cfg;
    c.seed = substreamSeed(cfg.seed, k);
    std::vector<ChshSettings> warm;
    if (k > 0) warm.push_back(out.back().settings);
    out.push_back(optimizeChsh(n_list[k], chi_t, c, warm));
  }
  return out;
}

}  // namespace bellspin
