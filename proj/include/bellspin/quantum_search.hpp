#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellspin/bell_core.hpp"

namespace bellspin {

struct SearchConfig {
  int restarts = 8;
  /// Objective evaluations allowed per restart.
  int max_iterations = 20000;
  /// Convergence tolerance on the objective value.
  double tolerance = 1e-10;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Gaps at or below this count as "no violation".
inline constexpr double kViolationThreshold = 1e-6;

struct SettingsSearchResult {
  double value = 0.0;
  MeasurementSettings settings;
};

/// Maximizes quantumValue over all 4m measurement angles with restarted
/// Nelder-Mead runs. Restart r starts from uniformly random angles drawn from
/// substream (seed, r); `warm_starts` are tried in addition. The returned
/// value is quantumValue re-evaluated at the returned settings.
SettingsSearchResult optimizeSettings(const BellInequality& ineq, int n_spins, const SearchConfig& cfg,
                                      const std::vector<MeasurementSettings>& warm_starts = {});

/// w' uniform in [-1/4, 1/4], v' uniform in [-1/2, 1/2] (w row-major, then
/// va, then vb, all from one SplitMix64 stream).
BellInequality randomInequality(int m, std::uint64_t seed);

struct ScanRow {
  std::uint64_t id = 0;
  double local = 0.0;
  double quantum = 0.0;
  double gap = 0.0;
};

struct ScanReport {
  int m = 0;
  int n_spins = 0;
  std::uint64_t count = 0;
  /// Unset when nothing was tested.
  std::optional<double> best_gap;
  std::optional<BellInequality> best_inequality;
  std::optional<MeasurementSettings> best_settings;
  /// Gap quantiles at 0, 10, ..., 100 percent (nearest rank).
  std::vector<double> gap_deciles;
  std::vector<ScanRow> rows;
};

/// Draws `count` random inequalities and compares each local bound with the
/// optimized quantum value at N spins. Item i uses the inequality seed
/// substream (cfg.seed, i, 0) and search seed substream (cfg.seed, i, 1), so
/// the report does not depend on the thread count.
ScanReport scanRandom(int m, std::uint64_t count, int n_spins, const SearchConfig& cfg);

struct MonotonicityReport {
  std::vector<int> ns;
  std::vector<double> values;
  std::vector<MeasurementSettings> settings;
  /// Positions k with values[k] > values[k-1] + tolerance.
  std::vector<int> increases;
  double tolerance = 1e-4;

  bool nonIncreasing() const { return increases.empty(); }
};

/// Optimized quantum value for each N (ascending). Each N is warm-started
/// from the previous N's optimum; afterwards every N also tries the optima
/// found for the other N values.
MonotonicityReport monotonicityCheck(const BellInequality& ineq, const std::vector<int>& ns, const SearchConfig& cfg,
                                     double tolerance = 1e-4);

}  // namespace bellspin
