#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bellspin/spin_algebra.hpp"

namespace bellspin {

/// Symmetric state of N two-level atoms in the number basis. Amplitude
/// index m counts atoms in internal state 1, so Jz = m - N/2.
struct DickeState {
  int n_atoms = 0;
  double chi_t = 0.0;
  std::vector<Complex> c;

  double norm() const;
};

/// Coherent state along +x twisted by exp(-i chi_t Jz^2):
/// c_m ~ sqrt(C(N, m)) exp(-i chi_t (m - N/2)^2), normalized.
DickeState oneAxisTwisted(int n_atoms, double chi_t);

/// Atoms shared between Alice and Bob by a beam splitter acting on both
/// internal modes. ψ(m, k, l): of the m state-1 atoms Alice holds k, of the
/// N - m state-2 atoms she holds l; Bob holds the rest.
class SplitState {
 public:
  SplitState(int n_atoms, double chi_t, double transmission, std::vector<Complex> amplitudes);

  int nAtoms() const { return n_; }
  double chiT() const { return chi_t_; }
  double transmission() const { return transmission_; }

  const Complex& operator()(int m, int k, int l) const { return amp_[offset(m, k, l)]; }
  Complex& operator()(int m, int k, int l) { return amp_[offset(m, k, l)]; }
  const std::vector<Complex>& amplitudes() const { return amp_; }

  static size_t tensorSize(int n_atoms);
  double norm() const;

  /// Alice's and Bob's registers exchanged: ψ'(m, k, l) = ψ(m, m - k, N - m - l).
  SplitState swapped() const;

 private:
  size_t offset(int m, int k, int l) const {
    return block_start_[static_cast<size_t>(m)] + static_cast<size_t>(k) * static_cast<size_t>(n_ - m + 1) +
           static_cast<size_t>(l);
  }

  int n_;
  double chi_t_;
  double transmission_;
  std::vector<size_t> block_start_;
  std::vector<Complex> amp_;
};

/// Each mode creation operator a_i^dag -> sqrt(t) a_i^dag + sqrt(1 - t) b_i^dag.
/// Throws std::invalid_argument unless 0 < t < 1.
SplitState splitState(const DickeState& psi, double transmission = 0.5);

/// max over phi of |<GHZ_phi|psi>| with GHZ_phi ~ |+x>^N + e^{i phi} |-x>^N.
double ghzOverlap(const DickeState& psi);

/// Wineland parameter N min_theta Var(cos theta Jy + sin theta Jz) / <Jx>^2 of
/// the unsplit twisted state; empty when <Jx> vanishes.
std::optional<double> winelandXi2(int n_atoms, double chi_t);

/// Same quantity for an arbitrary symmetric state.
std::optional<double> winelandXi2(const DickeState& psi);

/// |10 log10 xi^2|; squeezed states have xi^2 < 1, so this is the squeezing
/// depth in dB.
double squeezingDecibels(double xi2);

/// Versioned JSON dump of a split state for caching between sweeps.
std::string splitStateToJson(const SplitState& s);
SplitState splitStateFromJson(const std::string& text);

}  // namespace bellspin
