#pragma once

#include <functional>
#include <vector>

namespace sidm {

struct NelderMeadResult {
  std::vector<double> x;
  double fx;
  int iterations;
  bool converged;
};

struct NelderMeadOptions {
  int max_iterations = 4000;
  double f_tolerance = 1e-14;   // spread of simplex values
  double x_tolerance = 1e-12;   // spread of simplex vertices
  double initial_step = 0.1;    // relative (or absolute when x0[i] == 0)
  int restarts = 1;             // re-seed a fresh simplex at the optimum
};

/// Downhill simplex minimization. Never returns a point worse than x0.
NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace sidm
