#include "bellspin/quantum_search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bellspin/local_polytope.hpp"
#include "bellspin/nelder_mead.hpp"
#include "bellspin/random.hpp"

namespace bellspin {

void SearchConfig::validate() const {
  if (restarts < 1) throw std::invalid_argument("SearchConfig: restarts must be at least 1");
  if (max_iterations < 1) throw std::invalid_argument("SearchConfig: max_iterations must be at least 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("SearchConfig: tolerance must be positive");
}

namespace {

MeasurementSettings settingsFromAngles(std::span<const double> x, int m) {
  MeasurementSettings s;
  s.alpha.reserve(m);
  s.beta.reserve(m);
  for (int i = 0; i < m; ++i) s.alpha.emplace_back(x[2 * i], x[2 * i + 1]);
  for (int i = 0; i < m; ++i) s.beta.emplace_back(x[2 * m + 2 * i], x[2 * m + 2 * i + 1]);
  return s;
}

std::vector<double> anglesFromSettings(const MeasurementSettings& s) {
  std::vector<double> x;
  for (const auto& d : s.alpha) x.insert(x.end(), {d.theta(), d.phi()});
  for (const auto& d : s.beta) x.insert(x.end(), {d.theta(), d.phi()});
  return x;
}

std::vector<double> randomAngles(int n_directions, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> x;
  for (int k = 0; k < n_directions; ++k) {
    x.push_back(rng.uniform(0.0, std::numbers::pi));
    x.push_back(rng.uniform(0.0, 2 * std::numbers::pi));
  }
  return x;
}

struct RunResult {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> x;
};

}  // namespace

SettingsSearchResult optimizeSettings(const BellInequality& ineq, int n_spins, const SearchConfig& cfg,
                                      const std::vector<MeasurementSettings>& warm_starts) {
  cfg.validate();
  const int m = ineq.m();
  for (const auto& w : warm_starts) {
    if (w.m() != m || static_cast<int>(w.beta.size()) != m) {
      throw std::invalid_argument("optimizeSettings: warm start has the wrong number of settings");
    }
  }
  const BellOperatorEvaluator evaluator(n_spins);
  const Objective objective = [&](std::span<const double> x) {
    return -evaluator.maxValue(assembleWV(ineq, settingsFromAngles(x, m)));
  };
  NelderMeadOptions opt;
  opt.max_evaluations = cfg.max_iterations;
  opt.ftol = cfg.tolerance;

  const int runs = cfg.restarts + static_cast<int>(warm_starts.size());
  std::vector<RunResult> results(static_cast<size_t>(runs));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < runs; ++r) {
    std::vector<double> x0 = r < cfg.restarts ? randomAngles(2 * m, substreamSeed(cfg.seed, static_cast<std::uint64_t>(r)))
                                              : anglesFromSettings(warm_starts[r - cfg.restarts]);
    NelderMeadResult nm = nelderMeadMinimize(objective, std::move(x0), opt);
    results[r] = {-nm.value, std::move(nm.x)};
  }

  size_t best = 0;
  for (size_t r = 1; r < results.size(); ++r) {
    if (results[r].value > results[best].value) best = r;
  }
  SettingsSearchResult out;
  out.settings = settingsFromAngles(results[best].x, m);
  out.value = evaluator.maxValue(assembleWV(ineq, out.settings));
  return out;
}

BellInequality randomInequality(int m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("randomInequality: m must be at least 1");
  SplitMix64 rng(seed);
  RealMatrix w(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) w(i, j) = rng.uniform(-0.25, 0.25);
  }
  Eigen::VectorXd va(m), vb(m);
  for (int i = 0; i < m; ++i) va(i) = rng.uniform(-0.5, 0.5);
  for (int i = 0; i < m; ++i) vb(i) = rng.uniform(-0.5, 0.5);
  return {w, va, vb};
}

ScanReport scanRandom(int m, std::uint64_t count, int n_spins, const SearchConfig& cfg) {
  cfg.validate();
  if (m < 1) throw std::invalid_argument("scanRandom: m must be at least 1");
  if (n_spins < 1) throw std::invalid_argument("scanRandom: N must be at least 1");
  ScanReport report;
  report.m = m;
  report.n_spins = n_spins;
  report.count = count;
  report.rows.resize(count);
  std::vector<MeasurementSettings> settings(count);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    const auto id = static_cast<std::uint64_t>(i);
    const BellInequality ineq = randomInequality(m, substreamSeed(cfg.seed, id, 0));
    SearchConfig item_cfg = cfg;
    item_cfg.seed = substreamSeed(cfg.seed, id, 1);
    const double local = localBound(ineq).value;
    SettingsSearchResult q = optimizeSettings(ineq, n_spins, item_cfg);
    report.rows[id] = {id, local, q.value, q.value - local};
    settings[id] = std::move(q.settings);
  }

  if (count == 0) return report;
  size_t best = 0;
  for (size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].gap > report.rows[best].gap) best = i;
  }
  report.best_gap = report.rows[best].gap;
  report.best_inequality = randomInequality(m, substreamSeed(cfg.seed, best, 0)).withLocalBound(report.rows[best].local);
  report.best_settings = settings[best];

  std::vector<double> gaps;
  gaps.reserve(count);
  for (const auto& r : report.rows) gaps.push_back(r.gap);
  std::sort(gaps.begin(), gaps.end());
  for (int q = 0; q <= 10; ++q) {
    const auto rank = static_cast<size_t>(std::ceil(q / 10.0 * static_cast<double>(gaps.size())));
    report.gap_deciles.push_back(gaps[rank == 0 ? 0 : rank - 1]);
  }
  return report;
}

MonotonicityReport monotonicityCheck(const BellInequality& ineq, const std::vector<int>& ns, const SearchConfig& cfg,
                                     double tolerance) {
  if (!std::is_sorted(ns.begin(), ns.end())) throw std::invalid_argument("monotonicityCheck: N list must be ascending");
  MonotonicityReport rep;
  rep.ns = ns;
  rep.tolerance = tolerance;
  for (size_t k = 0; k < ns.size(); ++k) {
    SearchConfig c = cfg;
    c.seed = substreamSeed(cfg.seed, k);
    std::vector<MeasurementSettings> warm;
    if (k > 0) warm.push_back(rep.settings.back());
    SettingsSearchResult r = optimizeSettings(ineq, ns[k], c, warm);
    rep.values.push_back(r.value);
    rep.settings.push_back(std::move(r.settings));
  }

  // Cross-seeding: an optimum for one N is a valid starting point for all.
  for (size_t k = 0; k < ns.size(); ++k) {
    const BellOperatorEvaluator ev(ns[k]);
    std::vector<MeasurementSettings> better;
    for (size_t o = 0; o < ns.size(); ++o) {
      if (o != k && ev.maxValue(assembleWV(ineq, rep.settings[o])) > rep.values[k] + cfg.tolerance) {
        better.push_back(rep.settings[o]);
      }
    }
    if (better.empty()) continue;
    SearchConfig c = cfg;
    c.restarts = 1;
    c.seed = substreamSeed(cfg.seed, k, 1);
    better.push_back(rep.settings[k]);
    SettingsSearchResult r = optimizeSettings(ineq, ns[k], c, better);
    if (r.value > rep.values[k]) {
      rep.values[k] = r.value;
      rep.settings[k] = std::move(r.settings);
    }
  }

  for (size_t k = 1; k < ns.size(); ++k) {
    if (rep.values[k] > rep.values[k - 1] + tolerance) rep.increases.push_back(static_cast<int>(k));
  }
  return rep;
}

}  // namespace bellspin
