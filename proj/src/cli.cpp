#include "bellspin/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bellspin/catalog.hpp"
#include "bellspin/local_polytope.hpp"
#include "bellspin/parity_chsh.hpp"
#include "bellspin/quantum_search.hpp"
#include "bellspin/random.hpp"
#include "bellspin/squeezed_split.hpp"
#include "json.hpp"

namespace bellspin::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string exactString(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Rounded to the printed precision so JSON and CSV carry the same digits.
double r12(double x) { return std::strtod(formatNumber(x).c_str(), nullptr); }

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct Common {
  std::uint64_t seed = 1;
  int restarts = 0;
  double tol = 1e-10;
  int max_iter = 20000;
  std::string out;
  std::string format = "csv";
  int threads = 0;
  bool dry_run = false;
  std::string config;

  SearchConfig search() const {
    SearchConfig c;
    c.restarts = restarts;
    c.max_iterations = max_iter;
    c.tolerance = tol;
    c.seed = seed;
    return c;
  }
};

void addCommon(CLI::App* sub, Common& c, int default_restarts) {
  c.restarts = default_restarts;
  sub->add_option("--seed", c.seed, "Base random seed")->capture_default_str();
  sub->add_option("--restarts", c.restarts, "Random restarts per search")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--tol", c.tol, "Optimizer convergence tolerance")
      ->check(CLI::PositiveNumber)
      ->default_str(exactString(c.tol));
  sub->add_option("--max-iter", c.max_iter, "Objective evaluations per restart")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--out", c.out, "Data file; stdout when omitted");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_flag("--dry-run", c.dry_run, "Print the resolved configuration and exit");
  sub->add_option("--config", c.config, "key=value file; command-line flags win");
}

// Resolved option values of a subcommand in declaration order.
std::vector<std::pair<std::string, std::string>> resolvedOptions(const CLI::App& sub) {
  std::vector<std::pair<std::string, std::string>> kv;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config" || name == "dry-run") continue;
    std::string value;
    if (opt->count() > 0) {
      // Repeated options resolve to the last occurrence.
      const auto& res = opt->results();
      if (!res.empty()) value = res.back();
      if (opt->get_type_size() == 0 && value.empty()) value = "true";
    } else {
      value = opt->get_default_str();
      if (opt->get_type_size() == 0 && value.empty()) value = "false";
    }
    kv.emplace_back(name, value);
  }
  return kv;
}

struct Payload {
  std::string data;
  std::string summary;
  // Tables go to stdout when no --out is given; scalar results always print
  // their summary.
  bool tabular = true;
};

std::string isoTimestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path resolveOut(const std::string& out) {
  fs::path p(out);
  if (const char* dir = std::getenv("BELLSPIN_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
    p = fs::path(dir) / p.filename();
  }
  return p;
}

void writeFile(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw UsageError("cannot write " + p.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + p.string());
}

// ---- serialization helpers ----

json settingsJson(const MeasurementSettings& s) {
  auto dirs = [](const std::vector<Direction>& v) {
    json a = json::array();
    for (const auto& d : v) a.push_back({r12(d.theta()), r12(d.phi())});
    return a;
  };
  return {{"alice", dirs(s.alpha)}, {"bob", dirs(s.beta)}};
}

json inequalityJson(const BellInequality& b) {
  json w = json::array();
  for (int i = 0; i < b.m(); ++i) {
    json row = json::array();
    for (int j = 0; j < b.m(); ++j) row.push_back(r12(b.w()(i, j)));
    w.push_back(row);
  }
  json va = json::array(), vb = json::array();
  for (int i = 0; i < b.m(); ++i) {
    va.push_back(r12(b.va()(i)));
    vb.push_back(r12(b.vb()(i)));
  }
  json j = {{"m", b.m()}, {"w", w}, {"va", va}, {"vb", vb}};
  if (b.localBound()) j["local_bound"] = r12(*b.localBound());
  return j;
}

BellInequality inequalityFromJson(const std::string& text, const std::string& origin) {
  try {
    const json j = json::parse(text);
    const int m = j.at("m").get<int>();
    if (m < 1) throw UsageError(origin + ": m must be positive");
    RealMatrix w(m, m);
    Eigen::VectorXd va(m), vb(m);
    const auto& jw = j.at("w");
    if (jw.size() != static_cast<size_t>(m)) throw UsageError(origin + ": w must have m rows");
    for (int i = 0; i < m; ++i) {
      if (jw[i].size() != static_cast<size_t>(m)) throw UsageError(origin + ": w must have m columns");
      for (int k = 0; k < m; ++k) w(i, k) = jw[i][k].get<double>();
    }
    const auto& ja = j.at("va");
    const auto& jb = j.at("vb");
    if (ja.size() != static_cast<size_t>(m) || jb.size() != static_cast<size_t>(m)) {
      throw UsageError(origin + ": va and vb need m entries");
    }
    for (int i = 0; i < m; ++i) {
      va(i) = ja[i].get<double>();
      vb(i) = jb[i].get<double>();
    }
    std::optional<double> bound;
    if (j.contains("local_bound")) bound = j["local_bound"].get<double>();
    return BellInequality(w, va, vb, bound);
  } catch (const json::exception& e) {
    throw UsageError(origin + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(origin + ": " + e.what());
  }
}

std::vector<CatalogEntry> loadCatalog(const std::string& path) {
  try {
    return parseCatalog(readFile(path));
  } catch (const CatalogParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::string settingsHeader(const std::string& prefix, int m) {
  std::string h;
  for (const char* party : {"alice", "bob"}) {
    for (int i = 1; i <= m; ++i) {
      h += "," + prefix + party + "_theta_" + std::to_string(i) + "," + prefix + party + "_phi_" + std::to_string(i);
    }
  }
  return h;
}

std::string settingsCells(const MeasurementSettings& s) {
  std::string out;
  for (const auto* v : {&s.alpha, &s.beta}) {
    for (const auto& d : *v) out += "," + formatNumber(d.theta()) + "," + formatNumber(d.phi());
  }
  return out;
}

// ---- inequality source shared by local-bound / quantum-bound ----

struct IneqSource {
  bool chsh = false;
  std::string ineq_file;
  std::string catalog_file;
  std::string entry;

  void add(CLI::App* sub) {
    auto* c = sub->add_flag("--chsh", chsh, "Use CHSH");
    auto* i = sub->add_option("--ineq", ineq_file, "Inequality JSON file {m, w, va, vb[, local_bound]}");
    auto* f = sub->add_option("--catalog", catalog_file, "Catalog file");
    sub->add_option("--entry", entry, "Catalog entry name (default: first)");
    c->excludes(i)->excludes(f);
    i->excludes(f);
  }

  BellInequality load() const {
    if (chsh) return BellInequality::chsh();
    if (!ineq_file.empty()) return inequalityFromJson(readFile(ineq_file), ineq_file);
    if (!catalog_file.empty()) {
      const auto entries = loadCatalog(catalog_file);
      if (entries.empty()) throw UsageError(catalog_file + ": no entries");
      if (entry.empty()) return toNormalized(entries.front());
      for (const auto& e : entries) {
        if (e.name == entry) return toNormalized(e);
      }
      throw UsageError(catalog_file + ": no entry named " + entry);
    }
    throw UsageError("one of --chsh, --ineq or --catalog is required");
  }
};

// ---- sweep rows ----

std::string chshCsv(const std::vector<ChshResult>& rows, const std::vector<std::uint64_t>& seeds) {
  std::string s = "n_atoms,chi_t,chsh,a1_theta,a1_phi,a2_theta,a2_phi,b1_theta,b1_phi,b2_theta,b2_phi,seed\n";
  for (size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    s += std::to_string(r.n_atoms) + "," + formatNumber(r.chi_t) + "," + formatNumber(r.value);
    for (double a : r.settings.angles()) s += "," + formatNumber(a);
    s += "," + std::to_string(seeds[k]) + "\n";
  }
  return s;
}

std::string chshJson(const std::vector<ChshResult>& rows, const std::vector<std::uint64_t>& seeds) {
  json a = json::array();
  for (size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    json ang = json::array();
    for (double x : r.settings.angles()) ang.push_back(r12(x));
    a.push_back({{"n_atoms", r.n_atoms},
                 {"chi_t", r12(r.chi_t)},
                 {"chsh", r12(r.value)},
                 {"angles", ang},
                 {"seed", seeds[k]}});
  }
  return a.dump(2) + "\n";
}

Payload chshPayload(const Common& c, const std::vector<ChshResult>& rows, const std::vector<std::uint64_t>& seeds) {
  Payload p;
  p.data = c.format == "json" ? chshJson(rows, seeds) : chshCsv(rows, seeds);
  double best = rows.front().value;
  for (const auto& r : rows) best = std::max(best, r.value);
  p.summary = std::to_string(rows.size()) + " points, max chsh " + formatNumber(best) + "\n";
  return p;
}

std::vector<std::uint64_t> sweepSeeds(std::uint64_t seed, size_t n) {
  std::vector<std::uint64_t> s(n);
  for (size_t k = 0; k < n; ++k) s[k] = substreamSeed(seed, k);
  return s;
}

std::vector<std::string> injectConfig(const std::vector<std::string>& args) {
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;
  std::vector<std::string> tokens;
  std::istringstream in(readFile(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") throw UsageError(path + ":" + std::to_string(lineno) + ": bad key");
    tokens.push_back("--" + key + "=" + value);
  }
  // Config values go right after the subcommand path so later flags override them.
  size_t pos = 0;
  while (pos < args.size() && pos < 2 && !args[pos].empty() && args[pos][0] != '-') ++pos;
  std::vector<std::string> outv(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(pos));
  outv.insert(outv.end(), tokens.begin(), tokens.end());
  outv.insert(outv.end(), args.begin() + static_cast<std::ptrdiff_t>(pos), args.end());
  return outv;
}

}  // namespace

std::string formatNumber(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

std::vector<double> parseRange(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    tok = trim(tok);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0' || !std::isfinite(v)) throw UsageError("bad number '" + tok + "' in " + text);
    parts.push_back(v);
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw UsageError("range must be start:stop:step, got " + text);
  const double a = parts[0], b = parts[1], step = parts[2];
  if (!(step > 0.0) || b < a) throw UsageError("range needs step > 0 and stop >= start: " + text);
  const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
  if (count > 1000000) throw UsageError("range too long: " + text);
  std::vector<double> out;
  for (long k = 0; k < count; ++k) out.push_back(a + static_cast<double>(k) * step);
  return out;
}

std::vector<int> parseIntRange(const std::string& text) {
  std::vector<int> out;
  for (double v : parseRange(text)) {
    if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError("expected integers in " + text);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bell correlations of collective spin measurements", "bellspin"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  struct Handler {
    CLI::App* sub;
    Common* common;
    std::function<Payload(const Common&)> fn;
  };
  std::deque<Common> commons;
  std::vector<Handler> handlers;
  auto common_for = [&](CLI::App* sub, int default_restarts) {
    Common* c = &commons.emplace_back();
    addCommon(sub, *c, default_restarts);
    return c;
  };

  // local-bound
  IneqSource lb_src;
  auto* lb = app.add_subcommand("local-bound", "Exact local bound of a Bell expression");
  Common* lb_common = common_for(lb, 1);
  lb_src.add(lb);
  handlers.push_back({lb, lb_common, [&](const Common& common) {
    const BellInequality ineq = lb_src.load();
    const LocalBoundResult r = localBound(ineq);
    Payload p;
    p.tabular = false;
    p.summary = formatNumber(r.value) + "\n";
    if (common.format == "json") {
      json a = json::array(), b = json::array();
      for (double x : r.argmax.a) a.push_back(x);
      for (double x : r.argmax.b) b.push_back(x);
      p.data = json{{"local_bound", r12(r.value)}, {"a", a}, {"b", b}, {"inequality", inequalityJson(ineq)}}.dump(2) +
               "\n";
    } else {
      p.data = "local_bound\n" + formatNumber(r.value) + "\n";
    }
    return p;
  }});

  // quantum-bound
  IneqSource qb_src;
  int qb_n = 1;
  auto* qb = app.add_subcommand("quantum-bound", "Optimized quantum value for N + N spins");
  Common* qb_common = common_for(qb, 20);
  qb_src.add(qb);
  qb->add_option("--n", qb_n, "Spins per party")->check(CLI::PositiveNumber)->capture_default_str();
  handlers.push_back({qb, qb_common, [&](const Common& common) {
    const BellInequality ineq = qb_src.load();
    const double local = ineq.localBound() ? *ineq.localBound() : localBound(ineq).value;
    const SettingsSearchResult q = optimizeSettings(ineq, qb_n, common.search());
    Payload p;
    p.tabular = false;
    p.summary = formatNumber(q.value) + "\n";
    if (common.format == "json") {
      p.data = json{{"n_spins", qb_n},
                    {"local", r12(local)},
                    {"quantum", r12(q.value)},
                    {"gap", r12(q.value - local)},
                    {"settings", settingsJson(q.settings)}}
                   .dump(2) +
               "\n";
    } else {
      p.data = "n_spins,local,quantum,gap" + settingsHeader("", ineq.m()) + "\n" + std::to_string(qb_n) + "," +
               formatNumber(local) + "," + formatNumber(q.value) + "," + formatNumber(q.value - local) +
               settingsCells(q.settings) + "\n";
    }
    return p;
  }});

  // scan
  int scan_m = 5, scan_n = 2;
  std::uint64_t scan_count = 10000;
  auto* scan = app.add_subcommand("scan", "Random inequalities: local bound vs optimized quantum value");
  Common* scan_common = common_for(scan, 2);
  scan->add_option("--m", scan_m, "Settings per party")->check(CLI::Range(1, kMaxLocalBoundSettings))->capture_default_str();
  scan->add_option("--count", scan_count, "Number of inequalities")->capture_default_str();
  scan->add_option("--n", scan_n, "Spins per party")->check(CLI::PositiveNumber)->capture_default_str();
  handlers.push_back({scan, scan_common, [&](const Common& common) {
    const ScanReport rep = scanRandom(scan_m, scan_count, scan_n, common.search());
    Payload p;
    p.summary = std::to_string(rep.count) + " inequalities, best gap " +
                (rep.best_gap ? formatNumber(*rep.best_gap) : std::string("n/a")) + "\n";
    if (common.format == "json") {
      json rows = json::array();
      for (const auto& r : rep.rows) {
        rows.push_back({{"id", r.id}, {"local", r12(r.local)}, {"quantum", r12(r.quantum)}, {"gap", r12(r.gap)}});
      }
      json d = json::array();
      for (double x : rep.gap_deciles) d.push_back(r12(x));
      json j = {{"m", rep.m}, {"n_spins", rep.n_spins}, {"count", rep.count}, {"gap_deciles", d}, {"rows", rows}};
      j["best_gap"] = rep.best_gap ? json(r12(*rep.best_gap)) : json(nullptr);
      if (rep.best_inequality) j["best_inequality"] = inequalityJson(*rep.best_inequality);
      if (rep.best_settings) j["best_settings"] = settingsJson(*rep.best_settings);
      p.data = j.dump(2) + "\n";
    } else {
      p.data = "id,local,quantum,gap\n";
      for (const auto& r : rep.rows) {
        p.data += std::to_string(r.id) + "," + formatNumber(r.local) + "," + formatNumber(r.quantum) + "," +
                  formatNumber(r.gap) + "\n";
      }
    }
    return p;
  }});

  // monotonicity
  int mono_m = 3, mono_count = 20;
  std::string mono_ns = "1:3:1";
  double mono_tol = 1e-4;
  IneqSource mono_src;
  auto* mono = app.add_subcommand("monotonicity", "Optimized value versus N for random or given inequalities");
  Common* mono_common = common_for(mono, 8);
  mono_src.add(mono);
  mono->add_option("--m", mono_m, "Settings per party of random inequalities")
      ->check(CLI::Range(1, kMaxLocalBoundSettings))
      ->capture_default_str();
  mono->add_option("--count", mono_count, "Random inequalities")->check(CLI::PositiveNumber)->capture_default_str();
  mono->add_option("--ns", mono_ns, "Spin numbers, start:stop:step")->capture_default_str();
  mono->add_option("--increase-tol", mono_tol, "Allowed increase")->check(CLI::NonNegativeNumber)->default_str(exactString(mono_tol));
  handlers.push_back({mono, mono_common, [&](const Common& common) {
    const std::vector<int> ns = parseIntRange(mono_ns);
    for (int n : ns) {
      if (n < 1) throw UsageError("--ns entries must be positive");
    }
    std::vector<BellInequality> ineqs;
    std::vector<std::uint64_t> search_seeds;
    const bool given = mono_src.chsh || !mono_src.ineq_file.empty() || !mono_src.catalog_file.empty();
    if (given) {
      ineqs.push_back(mono_src.load());
      search_seeds.push_back(common.seed);
    } else {
      for (int i = 0; i < mono_count; ++i) {
        ineqs.push_back(randomInequality(mono_m, substreamSeed(common.seed, i, 0)));
        search_seeds.push_back(substreamSeed(common.seed, i, 1));
      }
    }
    std::vector<MonotonicityReport> reps(ineqs.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(ineqs.size()); ++i) {
      SearchConfig cfg = common.search();
      cfg.seed = search_seeds[i];
      reps[i] = monotonicityCheck(ineqs[i], ns, cfg, mono_tol);
    }
    Payload p;
    int bad = 0;
    for (const auto& r : reps) bad += r.nonIncreasing() ? 0 : 1;
    p.summary = std::to_string(reps.size()) + " inequalities, " + std::to_string(bad) + " with increases\n";
    if (common.format == "json") {
      json a = json::array();
      for (size_t i = 0; i < reps.size(); ++i) {
        json v = json::array();
        for (double x : reps[i].values) v.push_back(r12(x));
        a.push_back({{"id", i}, {"ns", reps[i].ns}, {"values", v}, {"non_increasing", reps[i].nonIncreasing()}});
      }
      p.data = a.dump(2) + "\n";
    } else {
      p.data = "id,n_spins,value,non_increasing\n";
      for (size_t i = 0; i < reps.size(); ++i) {
        for (size_t k = 0; k < ns.size(); ++k) {
          p.data += std::to_string(i) + "," + std::to_string(ns[k]) + "," + formatNumber(reps[i].values[k]) + "," +
                    (reps[i].nonIncreasing() ? "1" : "0") + "\n";
        }
      }
    }
    return p;
  }});

  // catalog
  auto* cat = app.add_subcommand("catalog", "Bell inequality catalogs");
  cat->require_subcommand(1);
  std::string cat_file;
  auto addFile = [&](CLI::App* sub) {
    sub->add_option("--file", cat_file, "Catalog file (default: bundled CHSH)");
  };
  auto catalogEntries = [&] { return cat_file.empty() ? parseCatalog(bundledChshCatalog()) : loadCatalog(cat_file); };

  auto* cat_parse = cat->add_subcommand("parse", "Parse and re-emit a catalog");
  Common* cat_parse_common = common_for(cat_parse, 1);
  addFile(cat_parse);
  handlers.push_back({cat_parse, cat_parse_common, [&](const Common& common) {
    const auto entries = catalogEntries();
    Payload p;
    p.summary = std::to_string(entries.size()) + " entries\n";
    if (common.format == "json") {
      json a = json::array();
      for (const auto& e : entries) {
        json g = json::array();
        for (int i = 0; i < e.m; ++i) {
          json row = json::array();
          for (int j = 0; j < e.m; ++j) row.push_back(e.gamma(i, j));
          g.push_back(row);
        }
        a.push_back({{"name", e.name},
                     {"m", e.m},
                     {"delta", e.delta},
                     {"alpha", std::vector<double>(e.alpha.begin(), e.alpha.end())},
                     {"beta", std::vector<double>(e.beta.begin(), e.beta.end())},
                     {"gamma", g},
                     {"source", e.source}});
      }
      p.data = a.dump(2) + "\n";
    } else {
      p.data = serializeCatalog(entries);
    }
    return p;
  }});

  auto* cat_verify = cat->add_subcommand("verify", "Check every entry against all deterministic strategies");
  Common* cat_verify_common = common_for(cat_verify, 1);
  addFile(cat_verify);
  handlers.push_back({cat_verify, cat_verify_common, [&](const Common& common) {
    const auto entries = catalogEntries();
    std::vector<EntryCheck> checks;
    int tight = 0, invalid = 0;
    for (const auto& e : entries) {
      checks.push_back(verifyEntry(e));
      tight += checks.back().valid_nonnegative && checks.back().tight ? 1 : 0;
      invalid += checks.back().valid_nonnegative ? 0 : 1;
    }
    Payload p;
    p.tabular = false;
    p.summary = std::to_string(entries.size()) + " entries, " + std::to_string(tight) + " tight";
    if (invalid > 0) p.summary += ", " + std::to_string(invalid) + " invalid";
    p.summary += "\n";
    if (common.format == "json") {
      json a = json::array();
      for (size_t k = 0; k < entries.size(); ++k) {
        a.push_back({{"name", entries[k].name},
                     {"m", entries[k].m},
                     {"valid", checks[k].valid_nonnegative},
                     {"tight", checks[k].tight},
                     {"min_value", r12(checks[k].min_value)}});
      }
      p.data = a.dump(2) + "\n";
    } else {
      p.data = "name,m,valid,tight,min_value\n";
      for (size_t k = 0; k < entries.size(); ++k) {
        p.data += entries[k].name + "," + std::to_string(entries[k].m) + "," +
                  (checks[k].valid_nonnegative ? "1" : "0") + "," + (checks[k].tight ? "1" : "0") + "," +
                  formatNumber(checks[k].min_value) + "\n";
      }
    }
    return p;
  }});

  int sweep_n = 2, sweep_lift = 0;
  auto* cat_sweep = cat->add_subcommand("sweep", "Optimized quantum value of every valid, tight entry");
  Common* cat_sweep_common = common_for(cat_sweep, 20);
  addFile(cat_sweep);
  cat_sweep->add_option("--n", sweep_n, "Spins per party")->check(CLI::PositiveNumber)->capture_default_str();
  cat_sweep->add_option("--lift", sweep_lift, "Pad entries with zero settings up to this m")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  handlers.push_back({cat_sweep, cat_sweep_common, [&](const Common& common) {
    std::vector<CatalogEntry> usable;
    size_t skipped = 0;
    for (const auto& e : catalogEntries()) {
      const EntryCheck chk = verifyEntry(e);
      if (!chk.valid_nonnegative || !chk.tight) {
        ++skipped;
        continue;
      }
      usable.push_back(sweep_lift > e.m ? liftEntry(e, sweep_lift) : e);
    }
    const auto rows = catalogSweep(usable, sweep_n, common.search());
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) worst = std::max(worst, r.gap);
    Payload p;
    p.summary = std::to_string(rows.size()) + " entries swept, " + std::to_string(skipped) + " skipped";
    if (!rows.empty()) p.summary += ", max gap " + formatNumber(worst);
    p.summary += "\n";
    if (common.format == "json") {
      json a = json::array();
      for (const auto& r : rows) {
        a.push_back({{"name", r.name},
                     {"m", r.m},
                     {"local", r12(r.local)},
                     {"quantum", r12(r.quantum)},
                     {"gap", r12(r.gap)},
                     {"settings", settingsJson(r.settings)}});
      }
      p.data = a.dump(2) + "\n";
    } else {
      p.data = "name,m,local,quantum,gap\n";
      for (const auto& r : rows) {
        p.data += r.name + "," + std::to_string(r.m) + "," + formatNumber(r.local) + "," + formatNumber(r.quantum) +
                  "," + formatNumber(r.gap) + "\n";
      }
    }
    return p;
  }});

  // squeeze
  auto* sq = app.add_subcommand("squeeze", "Twisted, split atomic states");
  sq->require_subcommand(1);

  int st_n = 4;
  double st_chi = 0.0, st_t = 0.5;
  auto* sq_state = sq->add_subcommand("state", "Amplitudes of the split twisted state");
  Common* sq_state_common = common_for(sq_state, 1);
  sq_state->add_option("--n", st_n, "Atoms")->check(CLI::PositiveNumber)->capture_default_str();
  sq_state->add_option("--chi", st_chi, "Twisting strength chi t")->default_str(exactString(st_chi));
  sq_state->add_option("--t", st_t, "Beam-splitter transmission")->default_str(exactString(st_t));
  handlers.push_back({sq_state, sq_state_common, [&](const Common& common) {
    const SplitState s = splitState(oneAxisTwisted(st_n, st_chi), st_t);
    Payload p;
    p.summary = std::to_string(s.amplitudes().size()) + " amplitudes, norm " + formatNumber(s.norm()) + "\n";
    if (common.format == "json") {
      p.data = splitStateToJson(s) + "\n";
    } else {
      p.data = "m,k,l,re,im\n";
      for (int m = 0; m <= st_n; ++m) {
        for (int k = 0; k <= m; ++k) {
          for (int l = 0; l <= st_n - m; ++l) {
            const Complex z = s(m, k, l);
            p.data += std::to_string(m) + "," + std::to_string(k) + "," + std::to_string(l) + "," +
                      formatNumber(z.real()) + "," + formatNumber(z.imag()) + "\n";
          }
        }
      }
    }
    return p;
  }});

  int xi_n = 500;
  double xi_chi = 0.006;
  auto* sq_xi = sq->add_subcommand("xi2", "Wineland squeezing parameter of the unsplit state");
  Common* sq_xi_common = common_for(sq_xi, 1);
  sq_xi->add_option("--n", xi_n, "Atoms")->check(CLI::PositiveNumber)->capture_default_str();
  sq_xi->add_option("--chi", xi_chi, "Twisting strength chi t")->default_str(exactString(xi_chi));
  handlers.push_back({sq_xi, sq_xi_common, [&](const Common& common) {
    const DickeState psi = oneAxisTwisted(xi_n, xi_chi);
    const auto xi2 = winelandXi2(psi);
    const double ghz = ghzOverlap(psi);
    Payload p;
    p.tabular = false;
    if (xi2) {
      p.summary = "xi2 " + formatNumber(*xi2) + " (" + formatNumber(squeezingDecibels(*xi2)) + " dB)\n";
    } else {
      p.summary = "xi2 undefined (<Jx> = 0)\n";
    }
    if (common.format == "json") {
      json j = {{"n_atoms", xi_n}, {"chi_t", r12(xi_chi)}, {"ghz_overlap", r12(ghz)}};
      j["xi2"] = xi2 ? json(r12(*xi2)) : json(nullptr);
      j["squeezing_db"] = xi2 ? json(r12(squeezingDecibels(*xi2))) : json(nullptr);
      p.data = j.dump(2) + "\n";
    } else {
      p.data = "n_atoms,chi_t,xi2,squeezing_db,ghz_overlap\n" + std::to_string(xi_n) + "," + formatNumber(xi_chi) +
               "," + (xi2 ? formatNumber(*xi2) : "nan") + "," + (xi2 ? formatNumber(squeezingDecibels(*xi2)) : "nan") +
               "," + formatNumber(ghz) + "\n";
    }
    return p;
  }});

  int sc_n = 10;
  std::string sc_chi = "0.0392699081699:1.5707963267949:0.0392699081699";
  auto* sq_chi = sq->add_subcommand("sweep-chi", "Optimized parity CHSH over a chi t grid");
  Common* sq_chi_common = common_for(sq_chi, 64);
  sq_chi->add_option("--n", sc_n, "Atoms")->check(CLI::PositiveNumber)->capture_default_str();
  sq_chi->add_option("--chi", sc_chi, "chi t grid, start:stop:step")->capture_default_str();
  handlers.push_back({sq_chi, sq_chi_common, [&](const Common& common) {
    const auto grid = parseRange(sc_chi);
    const auto rows = sweepChi(sc_n, grid, common.search());
    return chshPayload(common, rows, sweepSeeds(common.seed, rows.size()));
  }});

  double sn_chi = std::acos(-1.0) / 2;
  std::string sn_n = "4:20:2";
  auto* sq_n = sq->add_subcommand("sweep-n", "Optimized parity CHSH over atom numbers");
  Common* sq_n_common = common_for(sq_n, 64);
  sq_n->add_option("--chi", sn_chi, "Twisting strength chi t")->default_str(exactString(sn_chi));
  sq_n->add_option("--n", sn_n, "Atom numbers, start:stop:step")->capture_default_str();
  handlers.push_back({sq_n, sq_n_common, [&](const Common& common) {
    const auto ns = parseIntRange(sn_n);
    for (int n : ns) {
      if (n < 1) throw UsageError("--n entries must be positive");
    }
    const auto rows = sweepN(sn_chi, ns, common.search());
    return chshPayload(common, rows, sweepSeeds(common.seed, rows.size()));
  }});

  // chsh
  int ch_n = 2;
  double ch_chi = std::acos(-1.0) / 2;
  std::vector<double> ch_angles;
  auto* ch = app.add_subcommand("chsh", "Parity CHSH value of the split twisted state");
  Common* ch_common = common_for(ch, 64);
  ch->add_option("--n", ch_n, "Atoms")->check(CLI::PositiveNumber)->capture_default_str();
  ch->add_option("--chi", ch_chi, "Twisting strength chi t")->default_str(exactString(ch_chi));
  ch->add_option("--angles", ch_angles, "Fixed a1 a2 b1 b2 (theta, phi pairs); optimized when omitted")
      ->delimiter(',')
      ->expected(8);
  handlers.push_back({ch, ch_common, [&](const Common& common) {
    ChshResult r;
    if (!ch_angles.empty()) {
      if (ch_angles.size() != 8) throw UsageError("--angles needs 8 values");
      r.n_atoms = ch_n;
      r.chi_t = ch_chi;
      r.settings = ChshSettings::fromAngles(ch_angles);
      r.value = chshValue(splitState(oneAxisTwisted(ch_n, ch_chi)), r.settings);
    } else {
      r = optimizeChsh(ch_n, ch_chi, common.search());
    }
    Payload p = chshPayload(common, {r}, {common.seed});
    p.summary = formatNumber(r.value) + "\n";
    return p;
  }});

  std::vector<std::string> args;
  try {
    args = injectConfig(raw_args);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  for (const Handler& h : handlers) {
    CLI::App* sub = h.sub;
    const Common& common = *h.common;
    if (!sub->parsed()) continue;
    std::string path_name = sub->get_name();
    if (sub->get_parent() != &app) path_name = sub->get_parent()->get_name() + " " + path_name;
    const auto resolved = resolvedOptions(*sub);

    if (common.dry_run) {
      out << "subcommand = " << path_name << "\n";
      for (const auto& [k, v] : resolved) out << k << " = " << v << "\n";
      return 0;
    }
    if (common.threads > 0) omp_set_num_threads(common.threads);

    const auto wall_start = std::chrono::system_clock::now();
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Payload p = h.fn(common);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (common.out.empty()) {
        out << (p.tabular ? p.data : p.summary);
        return 0;
      }
      const fs::path data_path = resolveOut(common.out);
      writeFile(data_path, p.data);
      json params = json::object();
      for (const auto& [k, v] : resolved) params[k] = v;
      json manifest = {{"subcommand", path_name},
                       {"parameters", params},
                       {"seed", common.seed},
                       {"tool_version", kToolVersion},
                       {"outputs", {data_path.string()}},
                       {"run", {{"started_utc", isoTimestamp(wall_start)}, {"duration_seconds", seconds}}}};
      writeFile(fs::path(data_path.string() + ".manifest.json"), manifest.dump(2) + "\n");
      out << p.summary;
      return 0;
    } catch (const UsageError& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitFailure;
    }
  }
  err << "error: no subcommand ran\n";
  return kExitUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace bellspin::cli
