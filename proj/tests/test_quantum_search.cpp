#include <omp.h>

#include <cmath>
#include <numbers>

#include "bellspin/local_polytope.hpp"
#include "bellspin/nelder_mead.hpp"
#include "bellspin/quantum_search.hpp"
#include "doctest.h"

using namespace bellspin;

namespace {

constexpr double kTsirelson = std::numbers::sqrt2 / 2;

bool sameReport(const ScanReport& a, const ScanReport& b) {
  if (a.count != b.count || a.rows.size() != b.rows.size() || a.gap_deciles != b.gap_deciles) return false;
  for (size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].id != b.rows[i].id || a.rows[i].local != b.rows[i].local || a.rows[i].quantum != b.rows[i].quantum ||
        a.rows[i].gap != b.rows[i].gap) {
      return false;
    }
  }
  return a.best_gap == b.best_gap;
}

}  // namespace

TEST_CASE("Nelder-Mead minimizes smooth test functions") {
  const Objective quad = [](std::span<const double> x) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * (x[i] - 0.5 * i) * (x[i] - 0.5 * i);
    return s;
  };
  NelderMeadOptions opt;
  opt.ftol = 1e-14;
  const NelderMeadResult q = nelderMeadMinimize(quad, {3.0, -2.0, 1.0, 4.0}, opt);
  CHECK(q.value < 1e-10);
  for (size_t i = 0; i < 4; ++i) CHECK(std::abs(q.x[i] - 0.5 * i) < 1e-4);
  CHECK(q.evaluations <= opt.max_evaluations);

  const Objective rosen = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const NelderMeadResult r = nelderMeadMinimize(rosen, {-1.2, 1.0}, opt);
  CHECK(r.value < 1e-8);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-3);
}

TEST_CASE("Nelder-Mead respects the evaluation budget") {
  int calls = 0;
  const Objective f = [&](std::span<const double> x) {
    ++calls;
    return std::sin(10 * x[0]) + x[0] * x[0];
  };
  NelderMeadOptions opt;
  opt.max_evaluations = 50;
  const NelderMeadResult r = nelderMeadMinimize(f, {2.0}, opt);
  CHECK(calls <= 50);
  CHECK(r.evaluations == calls);
  CHECK_THROWS_AS(nelderMeadMinimize(f, {}, opt), std::invalid_argument);
}

TEST_CASE("search configuration validation") {
  SearchConfig c;
  CHECK_NOTHROW(c.validate());
  c.restarts = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.restarts = 1;
  c.tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("CHSH Tsirelson value at N = 1") {
  SearchConfig c;
  c.restarts = 20;
  const SettingsSearchResult r = optimizeSettings(BellInequality::chsh(), 1, c);
  CHECK(std::abs(r.value - kTsirelson) < 1e-5);
  CHECK(std::abs(r.value - quantumValue(BellInequality::chsh(), r.settings, 1)) < 1e-12);
}

TEST_CASE("most single restarts reach the Tsirelson value") {
  int hits = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    SearchConfig c;
    c.restarts = 1;
    c.seed = 1000 + s;
    hits += std::abs(optimizeSettings(BellInequality::chsh(), 1, c).value - kTsirelson) < 1e-4 ? 1 : 0;
  }
  CHECK(hits >= 48);
}

TEST_CASE("CHSH at N = 2 does not exceed the N = 1 value") {
  SearchConfig c;
  c.restarts = 10;
  const double v = optimizeSettings(BellInequality::chsh(), 2, c).value;
  CHECK(v <= kTsirelson + 1e-9);
  CHECK(v > 0.5 - 1e-6);
}

TEST_CASE("marginal-only expressions show no quantum advantage") {
  for (int n : {1, 2, 3}) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
    v(0) = 1.0;
    const BellInequality ineq(RealMatrix::Zero(3, 3), v, v);
    SearchConfig c;
    c.restarts = 4;
    const double q = optimizeSettings(ineq, n, c).value;
    CHECK(std::abs(q - localBound(ineq).value) < 1e-8);
    CHECK(std::abs(q - 1.0) < 1e-8);
  }
}

TEST_CASE("warm starts are honoured") {
  SearchConfig c;
  c.restarts = 1;
  c.max_iterations = 1;  // random restart cannot move
  const SettingsSearchResult r = optimizeSettings(BellInequality::chsh(), 1, c, {MeasurementSettings::chshOptimal()});
  CHECK(std::abs(r.value - kTsirelson) < 1e-12);
}

TEST_CASE("optimizer is deterministic for a seed") {
  SearchConfig c;
  c.restarts = 3;
  c.seed = 42;
  const BellInequality ineq = randomInequality(3, 5);
  const auto a = optimizeSettings(ineq, 2, c);
  const auto b = optimizeSettings(ineq, 2, c);
  CHECK(a.value == b.value);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.settings.alpha[i].theta() == b.settings.alpha[i].theta());
    CHECK(a.settings.beta[i].phi() == b.settings.beta[i].phi());
  }
}

TEST_CASE("random inequalities") {
  CHECK(randomInequality(4, 7) == randomInequality(4, 7));
  CHECK_FALSE(randomInequality(4, 7) == randomInequality(4, 8));

  const int samples = 10000;
  const int m = 2;
  RealMatrix wsum = RealMatrix::Zero(m, m);
  Eigen::VectorXd asum = Eigen::VectorXd::Zero(m), bsum = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < samples; ++k) {
    const BellInequality b = randomInequality(m, 100000 + k);
    CHECK(b.w().cwiseAbs().maxCoeff() <= 0.25);
    CHECK(b.va().cwiseAbs().maxCoeff() <= 0.5);
    CHECK(b.vb().cwiseAbs().maxCoeff() <= 0.5);
    wsum += b.w();
    asum += b.va();
    bsum += b.vb();
  }
  // sigma of the mean of U[-h, h] is h / sqrt(3 samples)
  const double sw = 0.25 / std::sqrt(3.0 * samples), sv = 0.5 / std::sqrt(3.0 * samples);
  CHECK((wsum / samples).cwiseAbs().maxCoeff() < 3 * sw);
  CHECK((asum / samples).cwiseAbs().maxCoeff() < 3 * sv);
  CHECK((bsum / samples).cwiseAbs().maxCoeff() < 3 * sv);
}

TEST_CASE("random scan report") {
  SearchConfig c;
  c.restarts = 2;
  const ScanReport empty = scanRandom(3, 0, 2, c);
  CHECK(empty.count == 0);
  CHECK_FALSE(empty.best_gap.has_value());
  CHECK(empty.rows.empty());

  const ScanReport r = scanRandom(3, 25, 2, c);
  CHECK(r.count == 25);
  REQUIRE(r.rows.size() == 25);
  REQUIRE(r.gap_deciles.size() == 11);
  double best = -1e300;
  for (const auto& row : r.rows) {
    best = std::max(best, row.gap);
    CHECK(std::abs(row.gap - (row.quantum - row.local)) < 1e-15);
  }
  CHECK(*r.best_gap == best);
  CHECK(r.gap_deciles.front() <= r.gap_deciles.back());
  CHECK(r.gap_deciles.back() == best);
  CHECK(best <= kViolationThreshold);
  REQUIRE(r.best_inequality.has_value());
  CHECK(std::abs(quantumValue(*r.best_inequality, *r.best_settings, 2) - localBound(*r.best_inequality).value - best) <
        1e-12);
}

TEST_CASE("scan reports do not depend on the thread count") {
  SearchConfig c;
  c.restarts = 2;
  c.seed = 9;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const ScanReport one = scanRandom(4, 12, 2, c);
  omp_set_num_threads(3);
  const ScanReport three = scanRandom(4, 12, 2, c);
  omp_set_num_threads(saved);
  CHECK(sameReport(one, three));
  CHECK(sameReport(one, scanRandom(4, 12, 2, c)));
}

TEST_CASE("monotonicity check") {
  SearchConfig c;
  c.restarts = 6;
  const MonotonicityReport chsh = monotonicityCheck(BellInequality::chsh(), {1, 2, 3}, c);
  REQUIRE(chsh.values.size() == 3);
  CHECK(std::abs(chsh.values[0] - kTsirelson) < 1e-5);
  CHECK(chsh.nonIncreasing());

  const MonotonicityReport zero = monotonicityCheck(BellInequality(3), {1, 2, 3}, c);
  for (double v : zero.values) CHECK(std::abs(v) < 1e-12);
  CHECK_THROWS_AS(monotonicityCheck(BellInequality(2), {3, 1}, c), std::invalid_argument);
}
