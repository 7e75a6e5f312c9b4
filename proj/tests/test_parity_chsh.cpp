#include <omp.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bellspin/parity_chsh.hpp"
#include "bellspin/random.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bellspin;

namespace {

constexpr double kPi = std::numbers::pi;

Direction randomDirection(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), p(0.0, 2 * kPi);
  return {std::acos(u(rng)), p(rng)};
}

ChshSettings randomChsh(std::mt19937_64& rng) {
  return {randomDirection(rng), randomDirection(rng), randomDirection(rng), randomDirection(rng)};
}

double maxDiff(const JointDistribution& x, const JointDistribution& y) {
  double d = 0.0;
  for (size_t a = 0; a < x.probs.size(); ++a) d = std::max(d, (x.probs[a] - y.probs[a]).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace

TEST_CASE("joint distribution examples") {
  // One atom along +x, equally likely on either side.
  const SplitState s = splitState(oneAxisTwisted(1, 0.0));
  const JointDistribution xx = jointDistribution(s, Direction::x(), Direction::x());
  REQUIRE(xx.probs.size() == 2);
  CHECK(xx.probs[0].rows() == 1);
  CHECK(xx.probs[0].cols() == 2);
  CHECK(xx.probability(1, 0.5, 0.0) == doctest::Approx(0.5));
  CHECK(xx.probability(0, 0.0, 0.5) == doctest::Approx(0.5));
  CHECK(xx.probability(1, -0.5, 0.0) == doctest::Approx(0.0));
  CHECK(xx.probability(2, 0.0, 0.0) == 0.0);
  CHECK(xx.probability(1, 0.25, 0.0) == 0.0);
  CHECK(parityCorrelator(xx) == doctest::Approx(1.0));

  const JointDistribution zz = jointDistribution(s, Direction::z(), Direction::z());
  CHECK(zz.probability(1, 0.5, 0.0) == doctest::Approx(0.25));
  CHECK(zz.probability(1, -0.5, 0.0) == doctest::Approx(0.25));
  CHECK(parityCorrelator(zz) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(xx.total() == doctest::Approx(1.0));
}

TEST_CASE("joint distribution is normalized") {
  std::mt19937_64 rng(1);
  std::vector<SplitState> states;
  for (int n = 1; n <= 60; n += 3) states.push_back(splitState(oneAxisTwisted(n, 0.4 + 0.01 * n)));
  states.push_back(splitState(oneAxisTwisted(60, kPi / 2)));
  for (int k = 0; k < 100; ++k) {
    const SplitState& s = states[k % states.size()];
    const JointDistribution jd = jointDistribution(s, randomDirection(rng), randomDirection(rng));
    CAPTURE(s.nAtoms());
    CHECK(std::abs(jd.total() - 1.0) < 1e-10);
    for (const auto& p : jd.probs) CHECK(p.minCoeff() >= 0.0);
  }
}

TEST_CASE("fast joint distribution equals the reference route") {
  std::mt19937_64 rng(5);
  for (int n : {1, 2, 3, 8, 17}) {
    const SplitState s = splitState(oneAxisTwisted(n, 0.9), n % 2 ? 0.5 : 0.35);
    for (int k = 0; k < 3; ++k) {
      const Direction a = randomDirection(rng), b = randomDirection(rng);
      CAPTURE(n);
      CHECK(maxDiff(jointDistribution(s, a, b), jointDistributionReference(s, a, b)) < 1e-12);
    }
  }
}

TEST_CASE("joint distribution matches the four-mode Fock construction") {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 4; ++n) {
    const oracle::FockSpace fs(n);
    for (int k = 0; k < 4; ++k) {
      const double chi = std::uniform_real_distribution<double>(0, kPi)(rng);
      const double t = k % 2 ? 0.5 : 0.3;
      const Direction a = randomDirection(rng), b = randomDirection(rng);
      const Eigen::VectorXcd psi = fs.beamSplitter(t) * oracle::fockTwisted(fs, n, chi);
      const auto ref = oracle::fockDistribution(fs, n, psi, a.unitVector(), b.unitVector());
      const JointDistribution jd = jointDistribution(splitState(oneAxisTwisted(n, chi), t), a, b);
      double err = 0.0;
      for (const auto& [key, p] : ref) {
        const auto [na, r, c] = key;
        err = std::max(err, std::abs(jd.probs[na](r, c) - p));
      }
      CAPTURE(n);
      CHECK(err < 1e-10);
      CHECK(std::abs(parityCorrelator(jd) - oracle::fockParity(ref)) < 1e-10);
    }
  }
}

TEST_CASE("CHSH value matches the Fock construction") {
  std::mt19937_64 rng(29);
  for (int n = 1; n <= 4; ++n) {
    const oracle::FockSpace fs(n);
    const double chi = 0.3 * n;
    const Eigen::VectorXcd psi = fs.beamSplitter(0.5) * oracle::fockTwisted(fs, n, chi);
    const ChshSettings s = randomChsh(rng);
    auto e = [&](const Direction& a, const Direction& b) {
      return oracle::fockParity(oracle::fockDistribution(fs, n, psi, a.unitVector(), b.unitVector()));
    };
    const double ref = e(s.a1, s.b1) + e(s.a2, s.b1) + e(s.a1, s.b2) - e(s.a2, s.b2);
    CHECK(std::abs(chshValue(splitState(oneAxisTwisted(n, chi)), s) - ref) < 1e-9);
  }
}

TEST_CASE("factorized correlators equal the block computation") {
  std::mt19937_64 rng(23);
  for (int n = 1; n <= 24; n += (n < 8 ? 1 : 5)) {
    for (double t : {0.5, 0.3}) {
      const DickeState psi = oneAxisTwisted(n, 0.05 + 0.2 * n);
      const ParityEvaluator block(splitState(psi, t));
      const FactorizedParityEvaluator fast(psi, t);
      for (int k = 0; k < 4; ++k) {
        const Direction a = randomDirection(rng), b = randomDirection(rng);
        CAPTURE(n);
        CHECK(std::abs(fast.correlator(a, b) - block.correlator(a, b)) < 1e-10);
      }
      const ChshSettings s = randomChsh(rng);
      CHECK(std::abs(fast.chsh(s) - block.chsh(s)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(FactorizedParityEvaluator(oneAxisTwisted(2, 0.0), 1.0), std::invalid_argument);
}

TEST_CASE("parity along an axis") {
  // Coherent state along +x: parity along x is +1, along z it is zero for N odd.
  const FactorizedParityEvaluator f(oneAxisTwisted(3, 0.0));
  CHECK(f.parityAlong(Vector3(1, 0, 0)) == doctest::Approx(1.0));
  CHECK(f.parityAlong(Vector3(0, 0, 1)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(f.parityAlong(Vector3(-1, 0, 0)) == doctest::Approx(-1.0));
  // Product state: the parity is the N-th power of the single-atom value.
  for (double th : {0.3, 1.0, 2.2}) {
    CHECK(std::abs(f.parityAlong(Vector3(std::sin(th), 0, std::cos(th))) - std::pow(std::sin(th), 3)) < 1e-12);
  }
}

TEST_CASE("correlator bounds and CHSH examples") {
  std::mt19937_64 rng(3);
  const ParityEvaluator ev(splitState(oneAxisTwisted(6, 0.8)));
  for (int k = 0; k < 20; ++k) {
    CHECK(std::abs(ev.correlator(randomDirection(rng), randomDirection(rng))) <= 1.0 + 1e-12);
    CHECK(std::abs(ev.chsh(randomChsh(rng))) <= 2 * std::numbers::sqrt2 + 1e-12);
  }

  // Identical settings: E + E + E - E = 2E.
  const Direction d = randomDirection(rng);
  const double same = ev.chsh({d, d, d, d});
  CHECK(std::abs(same - 2 * ev.correlator(d, d)) < 1e-12);
  CHECK(std::abs(same) <= 2.0 + 1e-12);

  SearchConfig c;
  c.restarts = 12;
  const ChshResult single = optimizeChsh(1, 0.4, c);
  CHECK(single.value <= 2 * std::numbers::sqrt2 + 1e-9);
  const ChshResult coherent = optimizeChsh(2, 0.0, c);
  CHECK(coherent.value <= 2.0 + 1e-9);
  const ChshResult ghz = optimizeChsh(2, kPi / 2, c);
  CHECK(ghz.value > 2.0);
  CHECK(ghz.value <= 2 * std::numbers::sqrt2 + 1e-12);
  CHECK(ghz.n_atoms == 2);
  CHECK(ghz.chi_t == kPi / 2);
  CHECK(std::abs(ghz.value - chshValue(splitState(oneAxisTwisted(2, kPi / 2)), ghz.settings)) < 1e-12);
}

TEST_CASE("settings angle round trip") {
  std::mt19937_64 rng(9);
  const ChshSettings s = randomChsh(rng);
  const auto x = s.angles();
  const ChshSettings r = ChshSettings::fromAngles(x);
  CHECK(r.a1.theta() == s.a1.theta());
  CHECK(r.b2.phi() == s.b2.phi());
  const std::array<double, 3> short_angles{0, 0, 0};
  CHECK_THROWS_AS(ChshSettings::fromAngles(short_angles), std::invalid_argument);
}

TEST_CASE("correlators are covariant under rotations about z") {
  std::mt19937_64 rng(12);
  for (int n : {1, 3, 6}) {
    const DickeState psi = oneAxisTwisted(n, 0.7);
    const double phi0 = 0.83;
    DickeState rotated = psi;
    for (int m = 0; m <= n; ++m) rotated.c[m] *= std::polar(1.0, -phi0 * (m - 0.5 * n));
    const ParityEvaluator a(splitState(psi)), b(splitState(rotated));
    for (int k = 0; k < 4; ++k) {
      const Direction x = randomDirection(rng), y = randomDirection(rng);
      const Direction xs(x.theta(), x.phi() + phi0), ys(y.theta(), y.phi() + phi0);
      CAPTURE(n);
      CHECK(std::abs(a.correlator(x, y) - b.correlator(xs, ys)) < 1e-11);
    }
  }
}

TEST_CASE("results do not depend on the thread count") {
  std::mt19937_64 rng(2);
  const ChshSettings s = randomChsh(rng);
  const SplitState st = splitState(oneAxisTwisted(20, 0.3));
  SearchConfig c;
  c.restarts = 4;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = ParityEvaluator(st).chsh(s);
  const ChshResult r1 = optimizeChsh(4, 0.5, c);
  omp_set_num_threads(3);
  const double three = ParityEvaluator(st).chsh(s);
  const ChshResult r3 = optimizeChsh(4, 0.5, c);
  omp_set_num_threads(saved);
  CHECK(one == three);
  CHECK(r1.value == r3.value);
  CHECK(r1.settings.angles() == r3.settings.angles());
}

TEST_CASE("sweep contracts") {
  SearchConfig c;
  c.restarts = 6;
  c.seed = 31;
  const std::vector<ChshResult> single = sweepChi(3, {0.9}, c);
  REQUIRE(single.size() == 1);
  SearchConfig first = c;
  first.seed = substreamSeed(c.seed, 0);
  CHECK(single[0].value == optimizeChsh(3, 0.9, first).value);

  const std::vector<double> grid{1.2, 0.3, 0.8};
  const auto rows = sweepChi(3, grid, c);
  REQUIRE(rows.size() == 3);
  for (size_t k = 0; k < 3; ++k) {
    CHECK(rows[k].chi_t == grid[k]);
    CHECK(rows[k].n_atoms == 3);
  }
  CHECK_THROWS_AS(sweepChi(3, {}, c), std::invalid_argument);
  CHECK_THROWS_AS(sweepN(1.0, {}, c), std::invalid_argument);

  const auto ns = sweepN(kPi / 2, {4, 2, 3}, c);
  REQUIRE(ns.size() == 3);
  CHECK(ns[0].n_atoms == 4);
  CHECK(ns[1].n_atoms == 2);
  CHECK(ns[2].n_atoms == 3);
  // Warm starts carry the previous optimum, so the N = 2 point sees the
  // N = 4 settings in addition to its own restarts.
  SearchConfig second = c;
  second.seed = substreamSeed(c.seed, 1);
  CHECK(ns[1].value >= optimizeChsh(2, kPi / 2, second).value - 1e-10);
}
