#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bellspin {

struct NelderMeadOptions {
  int max_evaluations = 20000;
  /// Converged once the spread of simplex values drops below this.
  double ftol = 1e-10;
  double initial_step = 0.5;
  /// Fresh simplices built around the incumbent after convergence; stops
  /// early once a rebuild gains less than ftol.
  int max_rebuilds = 4;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Minimizes f from x0 with the dimension-adaptive Nelder-Mead simplex
/// (Gao & Han coefficients).
NelderMeadResult nelderMeadMinimize(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt);

}  // namespace bellspin
