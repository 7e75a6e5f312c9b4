#pragma once

#include <cstdint>
#include <vector>

#include "bellspin/bell_core.hpp"

namespace bellspin {

/// Outcome assignment with every outcome at +-1/2.
struct DeterministicStrategy {
  std::vector<double> a;
  std::vector<double> b;
};

struct LocalBoundResult {
  double value = 0.0;
  DeterministicStrategy argmax;
};

inline constexpr int kMaxLocalBoundSettings = 26;
inline constexpr int kMaxVertexSettings = 13;

/// Exact local bound. Enumerates Bob's 2^m sign vectors; Alice answers each
/// with a_i = sign(va_i + sum_j w_ij b_j) / 2, sign(0) -> +1/2.
///
/// Bob's strategy with bit j clear plays b_j = +1/2; among maximizers the
/// lowest such index is returned. Runs in parallel over index chunks with a
/// Gray-code sweep inside each chunk. Throws std::invalid_argument for
/// m > kMaxLocalBoundSettings.
LocalBoundResult localBound(const BellInequality& ineq);

/// Serial reference for localBound: evaluates every Bob strategy from scratch.
LocalBoundResult localBoundReference(const BellInequality& ineq);

/// Correlator vectors (<a_1..a_m>, <b_1..b_m>, <a_i b_j> row-major) of all
/// 2^(2m) deterministic +-1/2 strategies. Vertex index bits 0..m-1 select
/// Alice's signs and bits m..2m-1 Bob's (set bit = -1/2).
std::vector<std::vector<double>> enumerateVertices(int m);

/// Quantum value minus local bound; positive means violation.
double violationGap(const BellInequality& ineq, const MeasurementSettings& s, int n_spins);

}  // namespace bellspin
