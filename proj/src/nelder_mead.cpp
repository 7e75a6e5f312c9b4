#include "bellspin/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bellspin {

namespace {

struct BudgetExhausted {};

struct Simplex {
  std::vector<std::vector<double>> pts;
  std::vector<double> vals;
};

// One simplex descent from `start`; returns the best vertex.
NelderMeadResult descend(const Objective& f, const std::vector<double>& start, double start_value, double step,
                         int budget, double ftol) {
  const size_t n = start.size();
  const double dn = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / dn;
  const double contract = 0.75 - 1.0 / (2.0 * dn);
  const double shrink = 1.0 - 1.0 / dn;

  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    if (evals >= budget) throw BudgetExhausted{};
    ++evals;
    return f(x);
  };

  Simplex s;
  s.pts.push_back(start);
  s.vals.push_back(start_value);
  std::vector<size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  try {
    for (size_t i = 0; i < n; ++i) {
      std::vector<double> p = start;
      p[i] += step;
      const double v = eval(p);
      s.vals.push_back(v);
      s.pts.push_back(std::move(p));
    }

    while (evals < budget) {
      std::iota(order.begin(), order.end(), size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return s.vals[a] < s.vals[b]; });
      const size_t best = order.front();
      const size_t worst = order.back();
      const size_t second = order[n - 1];
      if (s.vals[worst] - s.vals[best] <= ftol) break;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (size_t k = 0; k < n; ++k) {
        const auto& p = s.pts[order[k]];
        for (size_t i = 0; i < n; ++i) centroid[i] += p[i];
      }
      for (double& c : centroid) c /= dn;

      const auto& pw = s.pts[worst];
      for (size_t i = 0; i < n; ++i) xr[i] = centroid[i] + reflect * (centroid[i] - pw[i]);
      const double fr = eval(xr);

      if (fr < s.vals[best]) {
        for (size_t i = 0; i < n; ++i) xe[i] = centroid[i] + expand * (xr[i] - centroid[i]);
        const double fe = eval(xe);
        if (fe < fr) {
          s.pts[worst] = xe;
          s.vals[worst] = fe;
        } else {
          s.pts[worst] = xr;
          s.vals[worst] = fr;
        }
        continue;
      }
      if (fr < s.vals[second]) {
        s.pts[worst] = xr;
        s.vals[worst] = fr;
        continue;
      }
      const bool outside = fr < s.vals[worst];
      for (size_t i = 0; i < n; ++i) {
        xc[i] = outside ? centroid[i] + contract * (xr[i] - centroid[i])
                        : centroid[i] - contract * (centroid[i] - pw[i]);
      }
      const double fc = eval(xc);
      if (fc < (outside ? fr : s.vals[worst])) {
        s.pts[worst] = xc;
        s.vals[worst] = fc;
        continue;
      }
      const auto pb = s.pts[best];
      for (size_t k = 0; k <= n; ++k) {
        if (k == best) continue;
        std::vector<double> p(n);
        for (size_t i = 0; i < n; ++i) p[i] = pb[i] + shrink * (s.pts[k][i] - pb[i]);
        s.vals[k] = eval(p);
        s.pts[k] = std::move(p);
      }
    }
  } catch (const BudgetExhausted&) {
  }
  const size_t best = static_cast<size_t>(std::min_element(s.vals.begin(), s.vals.end()) - s.vals.begin());
  return {s.pts[best], s.vals[best], evals};
}

}  // namespace

NelderMeadResult nelderMeadMinimize(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt) {
  if (x0.empty()) throw std::invalid_argument("nelderMeadMinimize: empty starting point");
  NelderMeadResult res{x0, f(x0), 1};
  double step = opt.initial_step;
  for (int round = 0; round <= opt.max_rebuilds && res.evaluations < opt.max_evaluations; ++round) {
    NelderMeadResult r = descend(f, res.x, res.value, step, opt.max_evaluations - res.evaluations, opt.ftol);
    res.evaluations += r.evaluations;
    const double gain = res.value - r.value;
    if (r.value < res.value) {
      res.x = std::move(r.x);
      res.value = r.value;
    }
    if (round > 0 && gain < opt.ftol) break;
    step *= 0.5;
  }
  return res;
}

}  // namespace bellspin
