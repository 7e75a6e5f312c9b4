#include "bellspin/catalog.hpp"

#include <charconv>
#include <cstdint>
#include <sstream>

#include "bellspin/local_polytope.hpp"
#include "bellspin/random.hpp"

namespace bellspin {

bool CatalogEntry::operator==(const CatalogEntry& o) const {
  return name == o.name && m == o.m && delta == o.delta && alpha == o.alpha && beta == o.beta && gamma == o.gamma &&
         source == o.source;
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parseInt(std::string_view tok, int& out) {
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && p == tok.data() + tok.size();
}

double parseNumber(std::string_view tok, int line) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v)) {
    throw CatalogParseError(line, "not a number: '" + std::string(tok) + "'");
  }
  return v;
}

std::string formatNumber(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

struct Pending {
  CatalogEntry entry;
  int header_line = 0;
  int rows = 0;
};

}  // namespace

std::vector<CatalogEntry> parseCatalog(std::string_view text) {
  std::vector<CatalogEntry> out;
  std::optional<Pending> cur;
  int line_no = 0;

  auto close = [&](int line) {
    if (!cur) return;
    if (cur->rows != cur->entry.m + 1) {
      throw CatalogParseError(line, "entry '" + cur->entry.name + "' (line " + std::to_string(cur->header_line) +
                                        ") has " + std::to_string(cur->rows) + " of " +
                                        std::to_string(cur->entry.m + 1) + " rows");
    }
    out.push_back(std::move(cur->entry));
    cur.reset();
  };

  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const std::string_view body = trim(line);
    if (body.empty() || body.starts_with("##")) continue;
    if (body.front() == '#') {
      const std::string_view rest = body.substr(1);
      const auto toks = tokenize(rest);
      int m = 0;
      if (toks.size() < 2 || !parseInt(toks[1], m) || m < 1) continue;  // comment
      close(line_no);
      Pending p;
      p.entry.name = std::string(toks[0]);
      p.entry.m = m;
      p.entry.alpha = Eigen::VectorXd::Zero(m);
      p.entry.beta = Eigen::VectorXd::Zero(m);
      p.entry.gamma = RealMatrix::Zero(m, m);
      const size_t src = static_cast<size_t>(toks[1].data() + toks[1].size() - rest.data());
      p.entry.source = std::string(trim(rest.substr(src)));
      p.header_line = line_no;
      cur = std::move(p);
      continue;
    }

    std::string_view data = body;
    if (const size_t hash = data.find('#'); hash != std::string_view::npos) data = data.substr(0, hash);
    const auto toks = tokenize(data);
    if (!cur) throw CatalogParseError(line_no, "number row outside of an entry (missing '# name m' header)");
    const int m = cur->entry.m;
    if (cur->rows > m) {
      throw CatalogParseError(line_no, "entry '" + cur->entry.name + "' already has its " + std::to_string(m + 1) +
                                           " rows");
    }
    if (static_cast<int>(toks.size()) != m + 1) {
      throw CatalogParseError(line_no, "expected " + std::to_string(m + 1) + " values, found " +
                                           std::to_string(toks.size()));
    }
    CatalogEntry& e = cur->entry;
    const int r = cur->rows;
    if (r == 0) {
      e.delta = parseNumber(toks[0], line_no);
      for (int j = 0; j < m; ++j) e.beta(j) = parseNumber(toks[j + 1], line_no);
    } else {
      e.alpha(r - 1) = parseNumber(toks[0], line_no);
      for (int j = 0; j < m; ++j) e.gamma(r - 1, j) = parseNumber(toks[j + 1], line_no);
    }
    ++cur->rows;
  }
  close(line_no);
  return out;
}

std::string serializeCatalog(const std::vector<CatalogEntry>& entries) {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << "# " << e.name << ' ' << e.m;
    if (!e.source.empty()) os << ' ' << e.source;
    os << '\n' << formatNumber(e.delta);
    for (int j = 0; j < e.m; ++j) os << ' ' << formatNumber(e.beta(j));
    os << '\n';
    for (int i = 0; i < e.m; ++i) {
      os << formatNumber(e.alpha(i));
      for (int j = 0; j < e.m; ++j) os << ' ' << formatNumber(e.gamma(i, j));
      os << '\n';
    }
  }
  return os.str();
}

std::string bundledChshCatalog() {
  return "## CHSH: 2 - <a1 b1> - <a1 b2> - <a2 b1> + <a2 b2> >= 0\n"
         "# CHSH 2 Clauser-Horne-Shimony-Holt\n"
         "2  0  0\n"
         "0 -1 -1\n"
         "0 -1  1\n";
}

EntryCheck verifyEntry(const CatalogEntry& e) {
  const int m = e.m;
  if (m < 1 || m > kMaxVerifySettings) {
    throw std::invalid_argument("verifyEntry: m must be in [1, " + std::to_string(kMaxVerifySettings) + "], got " +
                                std::to_string(m));
  }
  const std::int64_t strategies = std::int64_t{1} << m;
  double global_min = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : global_min) schedule(static)
  for (std::int64_t bob = 0; bob < strategies; ++bob) {
    Eigen::VectorXd b(m);
    for (int j = 0; j < m; ++j) b(j) = ((bob >> j) & 1) ? -1.0 : 1.0;
    const Eigen::VectorXd c = e.alpha + e.gamma * b;
    const double base = e.delta + e.beta.dot(b);
    double local_min = std::numeric_limits<double>::infinity();
    for (std::int64_t alice = 0; alice < strategies; ++alice) {
      double v = base;
      for (int i = 0; i < m; ++i) v += ((alice >> i) & 1) ? -c(i) : c(i);
      local_min = std::min(local_min, v);
    }
    global_min = std::min(global_min, local_min);
  }
  return {global_min >= -1e-12, global_min <= 1e-12, global_min};
}

BellInequality toNormalized(const CatalogEntry& e) {
  BellInequality ineq(-e.gamma, -0.5 * e.alpha, -0.5 * e.beta);
  return ineq.withLocalBound(localBound(ineq).value);
}

CatalogEntry liftEntry(const CatalogEntry& e, int m) {
  if (m < e.m) throw std::invalid_argument("liftEntry: cannot lift to fewer settings");
  CatalogEntry out = e;
  out.m = m;
  out.alpha = Eigen::VectorXd::Zero(m);
  out.beta = Eigen::VectorXd::Zero(m);
  out.gamma = RealMatrix::Zero(m, m);
  out.alpha.head(e.m) = e.alpha;
  out.beta.head(e.m) = e.beta;
  out.gamma.topLeftCorner(e.m, e.m) = e.gamma;
  return out;
}

std::vector<CatalogSweepRow> catalogSweep(const std::vector<CatalogEntry>& entries, int n_spins,
                                          const SearchConfig& cfg) {
  cfg.validate();
  std::vector<CatalogSweepRow> rows(entries.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(entries.size()); ++k) {
    const CatalogEntry& e = entries[k];
    const BellInequality ineq = toNormalized(e);
    SearchConfig c = cfg;
    c.seed = substreamSeed(cfg.seed, static_cast<std::uint64_t>(k));
    SettingsSearchResult q = optimizeSettings(ineq, n_spins, c);
    const double local = *ineq.localBound();
    rows[k] = {e.name, e.m, local, q.value, q.value - local, std::move(q.settings)};
  }
  return rows;
}

}  // namespace bellspin
