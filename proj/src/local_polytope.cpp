#include "bellspin/local_polytope.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bellspin {

namespace {

struct Candidate {
  double value = -std::numeric_limits<double>::infinity();
  std::uint64_t index = 0;
};

// Larger value wins; equal values keep the lower strategy index.
void absorb(Candidate& best, const Candidate& c) {
  if (c.value > best.value || (c.value == best.value && c.index < best.index)) best = c;
}

double bobSign(std::uint64_t index, int j) { return ((index >> j) & 1U) ? -0.5 : 0.5; }

void checkSize(int m) {
  if (m > kMaxLocalBoundSettings) {
    throw std::invalid_argument("localBound: m = " + std::to_string(m) + " exceeds the enumeration limit of " +
                                std::to_string(kMaxLocalBoundSettings) + " settings");
  }
}

LocalBoundResult finish(const BellInequality& ineq, std::uint64_t bob_index) {
  const int m = ineq.m();
  Eigen::VectorXd b(m);
  for (int j = 0; j < m; ++j) b(j) = bobSign(bob_index, j);
  const Eigen::VectorXd alpha = ineq.va() + ineq.w() * b;
  Eigen::VectorXd a(m);
  for (int i = 0; i < m; ++i) a(i) = alpha(i) >= 0.0 ? 0.5 : -0.5;
  LocalBoundResult r;
  r.value = ineq.evaluate(a, b);
  r.argmax.a.assign(a.data(), a.data() + m);
  r.argmax.b.assign(b.data(), b.data() + m);
  return r;
}

}  // namespace

LocalBoundResult localBoundReference(const BellInequality& ineq) {
  const int m = ineq.m();
  checkSize(m);
  Candidate best;
  Eigen::VectorXd b(m);
  for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << m); ++idx) {
    for (int j = 0; j < m; ++j) b(j) = bobSign(idx, j);
    const Eigen::VectorXd alpha = ineq.va() + ineq.w() * b;
    absorb(best, {0.5 * alpha.cwiseAbs().sum() + ineq.vb().dot(b), idx});
  }
  return finish(ineq, best.index);
}

LocalBoundResult localBound(const BellInequality& ineq) {
  const int m = ineq.m();
  checkSize(m);
  const int low_bits = std::min(m, 12);
  const std::int64_t chunks = std::int64_t{1} << (m - low_bits);
  const std::uint64_t per_chunk = std::uint64_t{1} << low_bits;
  const RealMatrix& w = ineq.w();
  const Eigen::VectorXd& vb = ineq.vb();

  std::vector<Candidate> chunk_best(static_cast<size_t>(chunks));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::uint64_t high = static_cast<std::uint64_t>(c) << low_bits;
    Eigen::VectorXd b(m);
    for (int j = 0; j < m; ++j) b(j) = bobSign(high, j);
    Eigen::VectorXd alpha = ineq.va() + w * b;
    double marginal = vb.dot(b);
    Candidate best{0.5 * alpha.cwiseAbs().sum() + marginal, high};
    for (std::uint64_t t = 1; t < per_chunk; ++t) {
      const int j = std::countr_zero(t);
      const double delta = -2.0 * b(j);
      b(j) += delta;
      alpha.noalias() += delta * w.col(j);
      marginal += delta * vb(j);
      const std::uint64_t gray = t ^ (t >> 1);
      absorb(best, {0.5 * alpha.cwiseAbs().sum() + marginal, high | gray});
    }
    chunk_best[static_cast<size_t>(c)] = best;
  }

  Candidate best;
  for (const auto& c : chunk_best) absorb(best, c);
  return finish(ineq, best.index);
}

std::vector<std::vector<double>> enumerateVertices(int m) {
  if (m < 1 || m > kMaxVertexSettings) {
    throw std::invalid_argument("enumerateVertices: m must be in [1, " + std::to_string(kMaxVertexSettings) +
                                "], got " + std::to_string(m));
  }
  const std::uint64_t count = std::uint64_t{1} << (2 * m);
  std::vector<std::vector<double>> out(count);
  for (std::uint64_t v = 0; v < count; ++v) {
    std::vector<double>& row = out[v];
    row.resize(static_cast<size_t>(2 * m + m * m));
    for (int i = 0; i < m; ++i) row[i] = bobSign(v, i);
    for (int j = 0; j < m; ++j) row[m + j] = bobSign(v, m + j);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) row[2 * m + i * m + j] = row[i] * row[m + j];
    }
  }
  return out;
}

double violationGap(const BellInequality& ineq, const MeasurementSettings& s, int n_spins) {
  return quantumValue(ineq, s, n_spins) - localBound(ineq).value;
}

}  // namespace bellspin
