#include <cmath>
#include <numbers>

#include "bellspin/squeezed_split.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bellspin;

namespace {

constexpr double kPi = std::numbers::pi;

// Kitagawa-Ueda closed form for the one-axis twisted coherent state:
// minimal transverse variance and mean spin length.
double kitagawaUedaXi2(int n, double chi_t) {
  const double mu = 2.0 * chi_t;
  const double a = 1.0 - std::pow(std::cos(mu), n - 2);
  const double b = 4.0 * std::sin(mu / 2) * std::pow(std::cos(mu / 2), n - 2);
  const double vmin = n / 4.0 * (1.0 + (n - 1) / 4.0 * (a - std::sqrt(a * a + b * b)));
  const double jx = n / 2.0 * std::pow(std::cos(chi_t), n - 1);
  return n * vmin / (jx * jx);
}

// exp(-i chi_t Jz^2) applied to the top Jx eigenvector, in the oracle basis.
Eigen::VectorXcd oracleTwisted(int n, double chi_t) {
  const oracle::Spin s = oracle::spinMatrices(n);
  Eigen::SelfAdjointEigenSolver<oracle::CMat> es(s.x);
  Eigen::VectorXcd v = es.eigenvectors().col(n);
  // Fix the global phase by the first component.
  v *= std::abs(v(0)) / v(0);
  return oracle::expMinusI(s.z * s.z, chi_t) * v;
}

}  // namespace

TEST_CASE("twisted state examples") {
  const DickeState one = oneAxisTwisted(1, 0.0);
  CHECK(std::abs(one.c[0] - 1.0 / std::numbers::sqrt2) < 1e-15);
  CHECK(std::abs(one.c[1] - 1.0 / std::numbers::sqrt2) < 1e-15);

  const DickeState two = oneAxisTwisted(2, kPi / 2);
  // Jz^2 = 1, 0, 1 for m = 0, 1, 2
  CHECK(std::abs(two.c[0] - Complex(0, -0.5)) < 1e-15);
  CHECK(std::abs(two.c[1] - 1.0 / std::numbers::sqrt2) < 1e-15);
  CHECK(std::abs(two.c[2] - Complex(0, -0.5)) < 1e-15);

  CHECK_THROWS_AS(oneAxisTwisted(0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(oneAxisTwisted(3, std::nan("")), std::invalid_argument);
}

TEST_CASE("twisted state matches the matrix-exponential construction") {
  for (int n = 1; n <= 12; ++n) {
    for (double chi : {0.0, 0.13, 0.7, kPi / 2}) {
      const DickeState s = oneAxisTwisted(n, chi);
      const Eigen::VectorXcd o = oracleTwisted(n, chi);
      double err = 0.0;
      for (int m = 0; m <= n; ++m) err = std::max(err, std::abs(s.c[m] - o(n - m)));
      CAPTURE(n);
      CAPTURE(chi);
      CHECK(err < 1e-12);
    }
  }
}

TEST_CASE("twisted state stays normalized for large N") {
  for (int n : {1, 50, 500, 5000}) CHECK(std::abs(oneAxisTwisted(n, 0.3).norm() - 1.0) < 1e-12);
}

TEST_CASE("split of a single atom") {
  const SplitState s = splitState(oneAxisTwisted(1, 0.0));
  CHECK(s.amplitudes().size() == SplitState::tensorSize(1));
  CHECK(SplitState::tensorSize(1) == 4);
  for (const auto& z : s.amplitudes()) CHECK(std::abs(z - 0.5) < 1e-15);
  for (const auto& z : s.amplitudes()) CHECK(std::abs(std::norm(z) - 0.25) < 1e-15);
}

TEST_CASE("split state validation") {
  const DickeState psi = oneAxisTwisted(3, 0.2);
  CHECK_THROWS_AS(splitState(psi, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(splitState(psi, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(splitState(psi, -0.3), std::invalid_argument);
  CHECK_THROWS_AS(splitState(psi, std::nan("")), std::invalid_argument);
  DickeState bad = psi;
  bad.c.pop_back();
  CHECK_THROWS_AS(splitState(bad), std::invalid_argument);
  CHECK_THROWS_AS(SplitState(3, 0.0, 0.5, std::vector<Complex>(5)), std::invalid_argument);
}

TEST_CASE("split state norm and marginals") {
  for (int n : {1, 2, 7, 40, 200, 600}) {
    for (double t : {0.5, 0.2}) {
      const SplitState s = splitState(oneAxisTwisted(n, 0.37), t);
      CAPTURE(n);
      CHECK(std::abs(s.norm() - 1.0) < 1e-12);
      if (n > 40) continue;
      // Alice's atom number is binomial(N, t) regardless of the internal state.
      std::vector<double> p(n + 1, 0.0);
      for (int m = 0; m <= n; ++m)
        for (int k = 0; k <= m; ++k)
          for (int l = 0; l <= n - m; ++l) p[k + l] += std::norm(s(m, k, l));
      double binom = 1.0;
      for (int a = 0; a <= n; ++a) {
        if (a > 0) binom = binom * (n - a + 1) / a;
        CHECK(std::abs(p[a] - binom * std::pow(t, a) * std::pow(1 - t, n - a)) < 1e-12);
      }
      // Internal populations are unchanged by the split.
      const DickeState psi = oneAxisTwisted(n, 0.37);
      for (int m = 0; m <= n; ++m) {
        double q = 0.0;
        for (int k = 0; k <= m; ++k)
          for (int l = 0; l <= n - m; ++l) q += std::norm(s(m, k, l));
        CHECK(std::abs(q - std::norm(psi.c[m])) < 1e-12);
      }
    }
  }
}

TEST_CASE("swapping registers exchanges the transmission") {
  for (int n : {1, 3, 6}) {
    const DickeState psi = oneAxisTwisted(n, 0.9);
    const SplitState a = splitState(psi, 0.3).swapped();
    const SplitState b = splitState(psi, 0.7);
    CHECK(a.transmission() == doctest::Approx(0.7));
    double err = 0.0;
    for (size_t i = 0; i < a.amplitudes().size(); ++i) err = std::max(err, std::abs(a.amplitudes()[i] - b.amplitudes()[i]));
    CHECK(err < 1e-14);
    const SplitState twice = splitState(psi, 0.3).swapped().swapped();
    CHECK(twice.amplitudes() == splitState(psi, 0.3).amplitudes());
  }
}

TEST_CASE("split amplitudes match the four-mode Fock construction") {
  for (int n = 1; n <= 4; ++n) {
    const oracle::FockSpace fs(n);
    for (double t : {0.5, 0.27}) {
      for (double chi : {0.0, 0.61, kPi / 2}) {
        const Eigen::VectorXcd f = fs.beamSplitter(t) * oracle::fockTwisted(fs, n, chi);
        const SplitState s = splitState(oneAxisTwisted(n, chi), t);
        double err = 0.0;
        for (int m = 0; m <= n; ++m)
          for (int k = 0; k <= m; ++k)
            for (int l = 0; l <= n - m; ++l) err = std::max(err, std::abs(s(m, k, l) - f(fs.index({k, l, m - k, n - m - l}))));
        CAPTURE(n);
        CAPTURE(t);
        CAPTURE(chi);
        CHECK(err < 1e-12);
      }
    }
  }
}

TEST_CASE("GHZ overlap") {
  for (int n : {2, 4, 10, 30}) CHECK(std::abs(ghzOverlap(oneAxisTwisted(n, kPi / 2)) - 1.0) < 1e-12);
  for (int n : {2, 3, 10, 31}) CHECK(std::abs(ghzOverlap(oneAxisTwisted(n, 0.0)) - 1.0 / std::numbers::sqrt2) < 1e-12);
  // A single atom is (|+x> + |-x>)/sqrt2 at best: |+x> has overlap 1/sqrt2.
  CHECK(std::abs(ghzOverlap(oneAxisTwisted(1, kPi / 2)) - 1.0 / std::numbers::sqrt2) < 1e-12);
  for (int n : {2, 5, 9}) {
    for (double chi : {0.1, 0.5, 1.2}) {
      const double g = ghzOverlap(oneAxisTwisted(n, chi));
      CHECK(g <= 1.0 + 1e-12);
      CHECK(g >= 0.0);
    }
  }
}

TEST_CASE("Wineland parameter") {
  CHECK(std::abs(*winelandXi2(7, 0.0) - 1.0) < 1e-12);
  CHECK(std::abs(*winelandXi2(1, 0.4) - 1.0) < 1e-12);
  CHECK_FALSE(winelandXi2(6, kPi / 2).has_value());

  for (int n : {2, 5, 20, 100, 500}) {
    for (double chi : {0.006, 0.05, 0.2}) {
      // <Jx> ~ cos^(N-1)(chi t) is tiny there and both routes lose digits.
      if (n >= 500 && chi > 0.1) continue;
      CAPTURE(n);
      CAPTURE(chi);
      const auto xi = winelandXi2(n, chi);
      REQUIRE(xi.has_value());
      CHECK(std::abs(*xi - kitagawaUedaXi2(n, chi)) < 1e-9 * std::max(1.0, *xi));
    }
  }
  bool squeezed = false;
  for (int k = 1; k < 40; ++k) squeezed = squeezed || *winelandXi2(2, k * 0.02) < 1.0;
  CHECK(squeezed);

  const double db = squeezingDecibels(*winelandXi2(500, 0.006));
  CHECK(std::abs(db - 10.0) < 0.5);
  CHECK(squeezingDecibels(0.1) == doctest::Approx(10.0));
  CHECK(squeezingDecibels(1.0) == 0.0);
}

TEST_CASE("split state JSON round trip") {
  const SplitState s = splitState(oneAxisTwisted(5, 0.123456789), 0.31);
  const SplitState r = splitStateFromJson(splitStateToJson(s));
  CHECK(r.nAtoms() == 5);
  CHECK(r.chiT() == s.chiT());
  CHECK(r.transmission() == s.transmission());
  CHECK(r.amplitudes() == s.amplitudes());
  CHECK_THROWS(splitStateFromJson("{\"format\":\"other\",\"version\":1}"));
  CHECK_THROWS(splitStateFromJson("not json"));
}
