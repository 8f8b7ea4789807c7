#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sidm/equilibrium.hpp"
#include "sidm/model.hpp"
#include "sidm/parallel.hpp"

namespace sidm {

/// Analytic partial derivatives of the selected branch at (s_i, v_i,
/// dv = 0). dv is oriented leader - follower here, so that rational
/// following behavior gives f_s > 0, f_v < 0, f_dv > 0 (f_dv vanishes at
/// v_i = 0 on both branches since dv enters only through v·dv).
/// A point exactly on the branch boundary (s_i = S*) is evaluated on the
/// sigmoid side with `on_boundary` set.
struct Partials {
  double f_s;   // 1/s^2
  double f_v;   // 1/s
  double f_dv;  // 1/s
  bool sigmoid_branch;
  bool on_boundary;
};

Partials partial_derivatives(const ModelParams& p, Model m, double v_i,
                             double s_i);

/// Roots of gamma^2 - (f_v - f_dv) gamma + f_s = 0; locally stable iff
/// both real parts are negative.
struct LocalStability {
  std::complex<double> gamma_plus;
  std::complex<double> gamma_minus;
  bool locally_stable;
};
LocalStability local_stability(double f_s, double f_v, double f_dv);

/// Long-wave string-stability margin 1/2 - f_dv/f_v - f_s/f_v^2.
/// Throws std::domain_error when f_v == 0 (degenerate equilibrium).
struct StringCriterion {
  double value;
  bool string_stable;
};
StringCriterion string_criterion(double f_s, double f_v, double f_dv);

/// |G(i w)| of the gap-perturbation transfer function.
double transfer_magnitude(double f_s, double f_v, double f_dv, double omega);

/// Log-spaced omega sweep (defaults 200 points in [1e-3, 10] rad/s)
/// returning the largest |G(i w)|.
double max_transfer_magnitude(double f_s, double f_v, double f_dv,
                              double omega_lo = 1e-3, double omega_hi = 10.0,
                              int n = 200);

struct StabilityReport {
  Partials partials;
  LocalStability local;
  StringCriterion string;
};

/// Derivatives and both classifications at an explicit operating point.
StabilityReport analyze_point(const ModelParams& p, Model m, double v_i,
                              double s_i);

enum class CellClass { stable, string_unstable, locally_unstable };
const char* cell_class_name(CellClass c);

/// Classification map over a (lambda, d_c) grid at a fixed equilibrium
/// speed: per cell the equilibrium spacing is solved first, then the
/// derivatives and classifications. Quasi-equilibrium cells are flagged,
/// not silently classified.
struct StabilityMap {
  std::vector<double> lambda_grid;
  std::vector<double> dc_grid;
  double v_e;
  ModelParams base;

  struct Cell {
    double lambda;
    double d_c;
    double s_e;
    EqBranch branch;
    Partials partials;
    double criterion;
    bool locally_stable;
    bool string_stable;
    CellClass cls;
    bool quasi;
  };
  std::vector<Cell> cells;  // row-major: [i_lambda * dc_grid.size() + i_dc]

  const Cell& at(std::size_t i_lambda, std::size_t i_dc) const {
    return cells[i_lambda * dc_grid.size() + i_dc];
  }
};

StabilityMap stability_map(const ModelParams& base, Model m, double v_e,
                           std::span<const double> lambda_grid,
                           std::span<const double> dc_grid,
                           Exec exec = Exec::parallel);

}  // namespace sidm
