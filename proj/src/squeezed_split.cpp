#include "bellspin/squeezed_split.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace bellspin {

namespace {

std::vector<double> logFactorials(int n) {
  std::vector<double> lf(static_cast<size_t>(n) + 1, 0.0);
  for (int i = 2; i <= n; ++i) lf[i] = lf[i - 1] + std::log(static_cast<double>(i));
  return lf;
}

double logBinom(const std::vector<double>& lf, int n, int k) { return lf[n] - lf[k] - lf[n - k]; }

double sumSquares(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

void normalize(std::vector<Complex>& v) {
  const double s = std::sqrt(sumSquares(v));
  if (!(s > 0.0)) throw std::invalid_argument("state has zero norm");
  for (auto& z : v) z /= s;
}

}  // namespace

double DickeState::norm() const { return std::sqrt(sumSquares(c)); }

DickeState oneAxisTwisted(int n_atoms, double chi_t) {
  if (n_atoms < 1) throw std::invalid_argument("oneAxisTwisted: need at least one atom");
  if (!std::isfinite(chi_t)) throw std::invalid_argument("oneAxisTwisted: chi_t must be finite");
  const auto lf = logFactorials(n_atoms);
  // Magnitudes relative to the central binomial avoid overflow at large N.
  const double ref = logBinom(lf, n_atoms, n_atoms / 2);
  DickeState s{n_atoms, chi_t, std::vector<Complex>(static_cast<size_t>(n_atoms) + 1)};
  for (int m = 0; m <= n_atoms; ++m) {
    const double jz = m - 0.5 * n_atoms;
    s.c[m] = std::polar(std::exp(0.5 * (logBinom(lf, n_atoms, m) - ref)), -chi_t * jz * jz);
  }
  normalize(s.c);
  return s;
}

SplitState::SplitState(int n_atoms, double chi_t, double transmission, std::vector<Complex> amplitudes)
    : n_(n_atoms), chi_t_(chi_t), transmission_(transmission), amp_(std::move(amplitudes)) {
  if (n_atoms < 0) throw std::invalid_argument("SplitState: negative atom number");
  block_start_.resize(static_cast<size_t>(n_atoms) + 2);
  size_t acc = 0;
  for (int m = 0; m <= n_atoms; ++m) {
    block_start_[m] = acc;
    acc += static_cast<size_t>(m + 1) * static_cast<size_t>(n_atoms - m + 1);
  }
  block_start_[n_atoms + 1] = acc;
  if (amp_.size() != acc) throw std::invalid_argument("SplitState: amplitude count does not match N");
}

size_t SplitState::tensorSize(int n_atoms) {
  size_t acc = 0;
  for (int m = 0; m <= n_atoms; ++m) acc += static_cast<size_t>(m + 1) * static_cast<size_t>(n_atoms - m + 1);
  return acc;
}

double SplitState::norm() const { return std::sqrt(sumSquares(amp_)); }

SplitState SplitState::swapped() const {
  SplitState out(n_, chi_t_, 1.0 - transmission_, std::vector<Complex>(amp_.size()));
  for (int m = 0; m <= n_; ++m) {
    for (int k = 0; k <= m; ++k) {
      for (int l = 0; l <= n_ - m; ++l) out(m, k, l) = (*this)(m, m - k, n_ - m - l);
    }
  }
  return out;
}

SplitState splitState(const DickeState& psi, double transmission) {
  if (!(transmission > 0.0 && transmission < 1.0)) {
    throw std::invalid_argument("splitState: transmission must lie in (0, 1)");
  }
  const int n = psi.n_atoms;
  if (n < 1 || psi.c.size() != static_cast<size_t>(n) + 1) throw std::invalid_argument("splitState: malformed state");
  const auto lf = logFactorials(n);
  const double log_t = std::log(transmission);
  const double log_r = std::log1p(-transmission);
  std::vector<Complex> amp(SplitState::tensorSize(n));
  SplitState out(n, psi.chi_t, transmission, std::move(amp));

#pragma omp parallel for schedule(dynamic)
  for (int m = 0; m <= n; ++m) {
    const double mag = std::abs(psi.c[m]);
    if (mag == 0.0) continue;
    const Complex phase = psi.c[m] / mag;
    const double log_mag = std::log(mag);
    for (int k = 0; k <= m; ++k) {
      for (int l = 0; l <= n - m; ++l) {
        const int alice = k + l;
        const double lg = log_mag + 0.5 * (logBinom(lf, m, k) + logBinom(lf, n - m, l)) + 0.5 * alice * log_t +
                          0.5 * (n - alice) * log_r;
        out(m, k, l) = std::exp(lg) * phase;
      }
    }
  }
  const double nrm = out.norm();
  if (!(nrm > 0.0)) throw std::invalid_argument("splitState: state has zero norm");
  for (int m = 0; m <= n; ++m) {
    for (int k = 0; k <= m; ++k) {
      for (int l = 0; l <= n - m; ++l) out(m, k, l) /= nrm;
    }
  }
  return out;
}

double ghzOverlap(const DickeState& psi) {
  const int n = psi.n_atoms;
  const auto lf = logFactorials(n);
  Complex plus = 0.0, minus = 0.0;
  for (int m = 0; m <= n; ++m) {
    const double w = std::exp(0.5 * logBinom(lf, n, m) - 0.5 * n * std::numbers::ln2);
    plus += w * psi.c[m];
    minus += ((n - m) % 2 ? -w : w) * psi.c[m];
  }
  // <+x|-x> = 0, so every GHZ_phi has norm sqrt2.
  return (std::abs(plus) + std::abs(minus)) / std::numbers::sqrt2;
}

std::optional<double> winelandXi2(const DickeState& psi) {
  const int n = psi.n_atoms;
  const auto& c = psi.c;
  std::vector<Complex> jx(c.size()), jy(c.size()), jz(c.size());
  for (int m = 0; m <= n; ++m) {
    jz[m] = (m - 0.5 * n) * c[m];
    // J+|m> = sqrt((m+1)(N-m)) |m+1>, J-|m> = sqrt(m(N-m+1)) |m-1>
    Complex raised = m > 0 ? std::sqrt(static_cast<double>(m) * (n - m + 1)) * c[m - 1] : Complex(0.0);
    Complex lowered = m < n ? std::sqrt(static_cast<double>(m + 1) * (n - m)) * c[m + 1] : Complex(0.0);
    jx[m] = 0.5 * (raised + lowered);
    jy[m] = Complex(0, -0.5) * (raised - lowered);
  }
  auto dot = [](const std::vector<Complex>& a, const std::vector<Complex>& b) {
    Complex s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
  };
  const double mx = dot(c, jx).real();
  if (std::abs(mx) <= 1e-10 * std::max(1, n)) return std::nullopt;
  const double my = dot(c, jy).real();
  const double mz = dot(c, jz).real();
  const double vyy = dot(jy, jy).real() - my * my;
  const double vzz = dot(jz, jz).real() - mz * mz;
  const double cyz = dot(jy, jz).real() - my * mz;
  const double vmin = 0.5 * (vyy + vzz) - std::sqrt(0.25 * (vyy - vzz) * (vyy - vzz) + cyz * cyz);
  return n * vmin / (mx * mx);
}

std::optional<double> winelandXi2(int n_atoms, double chi_t) { return winelandXi2(oneAxisTwisted(n_atoms, chi_t)); }

double squeezingDecibels(double xi2) { return std::abs(10.0 * std::log10(xi2)); }

std::string splitStateToJson(const SplitState& s) {
  nlohmann::json j;
  j["format"] = "bellspin.split_state";
  j["version"] = 1;
  j["n_atoms"] = s.nAtoms();
  j["chi_t"] = s.chiT();
  j["transmission"] = s.transmission();
  std::vector<double> re, im;
  re.reserve(s.amplitudes().size());
  im.reserve(s.amplitudes().size());
  for (const auto& z : s.amplitudes()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  j["re"] = re;
  j["im"] = im;
  return j.dump();
}

SplitState splitStateFromJson(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "bellspin.split_state" || j.value("version", 0) != 1) {
    throw std::invalid_argument("splitStateFromJson: unsupported format or version");
  }
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size()) throw std::invalid_argument("splitStateFromJson: re/im length mismatch");
  std::vector<Complex> amp(re.size());
  for (size_t i = 0; i < re.size(); ++i) amp[i] = {re[i], im[i]};
  return {j.at("n_atoms").get<int>(), j.at("chi_t").get<double>(), j.at("transmission").get<double>(),
          std::move(amp)};
}

}  // namespace bellspin
