#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bellspin/bell_core.hpp"
#include "bellspin/quantum_search.hpp"

namespace bellspin {

/// Bell inequality in the +-1 correlation picture, written as
///
///   delta + sum_i alpha_i <a_i> + sum_j beta_j <b_j> + sum_ij gamma_ij <a_i b_j>  >=  0
///
/// Catalog text lays each entry out as its table:
///
///   # <name> <m> [source...]
///   delta    beta_1   ... beta_m
///   alpha_1  gamma_11 ... gamma_1m
///   ...
///   alpha_m  gamma_m1 ... gamma_mm
///
/// A '#' line is a header when its second token is a positive integer and a
/// comment otherwise; '##' lines are always comments. Text after '#' on a
/// number row is ignored, as are blank lines.
struct CatalogEntry {
  std::string name;
  int m = 0;
  double delta = 0.0;
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  RealMatrix gamma;
  std::string source;

  bool operator==(const CatalogEntry&) const;
};

class CatalogParseError : public std::runtime_error {
 public:
  CatalogParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Throws CatalogParseError naming the offending line.
std::vector<CatalogEntry> parseCatalog(std::string_view text);

/// Inverse of parseCatalog; numbers use the shortest exact decimal form.
std::string serializeCatalog(const std::vector<CatalogEntry>& entries);

/// Catalog text holding CHSH alone.
std::string bundledChshCatalog();

struct EntryCheck {
  bool valid_nonnegative = false;
  bool tight = false;
  double min_value = 0.0;
};

inline constexpr int kMaxVerifySettings = 13;

/// Minimum of the table expression over all 2^(2m) deterministic +-1
/// strategies. Valid iff the minimum is >= -1e-12, tight iff <= 1e-12.
EntryCheck verifyEntry(const CatalogEntry& e);

/// The entry as a normalized inequality: w' = -gamma, v'_a = -alpha / 2,
/// v'_b = -beta / 2. This rescales the +-1 expression to +-1/2 outcomes, so a
/// tight entry gets local bound delta / 4, which is cached.
BellInequality toNormalized(const CatalogEntry& e);

/// Same inequality with zero coefficients for the extra settings.
CatalogEntry liftEntry(const CatalogEntry& e, int m);

struct CatalogSweepRow {
  std::string name;
  int m = 0;
  double local = 0.0;
  double quantum = 0.0;
  double gap = 0.0;
  MeasurementSettings settings;
};

/// Optimized quantum value at N spins for every entry, in input order. Entry
/// k searches with seed substream (cfg.seed, k).
std::vector<CatalogSweepRow> catalogSweep(const std::vector<CatalogEntry>& entries, int n_spins,
                                          const SearchConfig& cfg);

}  // namespace bellspin
