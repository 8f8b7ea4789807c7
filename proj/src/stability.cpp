#include "sidm/stability.hpp"

#include <cmath>
#include <stdexcept>

namespace sidm {

namespace {

// E/(1+E)^2 with E = exp(x), computed as 1/(2 cosh(x/2))^2 so large |x|
// underflows to 0 instead of overflowing.
double logistic_slope(double x) {
  const double c = 2.0 * std::cosh(0.5 * x);
  if (!std::isfinite(c)) return 0.0;
  return 1.0 / (c * c);
}

}  // namespace

Partials partial_derivatives(const ModelParams& p, Model m, double v_i,
                             double s_i) {
  if (!(s_i > 0.0)) throw std::domain_error("s_i must be > 0");
  if (!(v_i >= 0.0) || v_i >= p.v0) {
    throw std::domain_error("v_i must lie in [0, v0)");
  }
  const double s_star = p.s0 + v_i * p.T;  // dv = 0
  const double free_dv =
      p.a * p.delta * std::pow(v_i / p.v0, p.delta - 1.0) / p.v0;
  const double sqrt_ab = std::sqrt(p.a / p.b);

  const bool boundary = s_i == s_star;
  const bool idm_side =
      m == Model::idm || (on_idm_branch(s_i, s_star, p) && !boundary);

  Partials out{};
  out.on_boundary = m == Model::sigmoid_idm && boundary;
  if (idm_side) {
    out.sigmoid_branch = false;
    const double s2 = s_i * s_i;
    out.f_s = 2.0 * p.a * s_star * s_star / (s2 * s_i);
    out.f_v = -free_dv - 2.0 * p.a * p.T * s_star / s2;
    out.f_dv = v_i * s_star * sqrt_ab / s2;
  } else {
    out.sigmoid_branch = true;
    const double slope = logistic_slope(p.lambda * (s_i - s_star - p.d_c));
    out.f_s = p.a * p.lambda * slope;
    out.f_v = -free_dv - p.a * p.lambda * p.T * slope;
    out.f_dv = 0.5 * p.lambda * v_i * sqrt_ab * slope;
  }
  return out;
}

LocalStability local_stability(double f_s, double f_v, double f_dv) {
  const double trace = f_v - f_dv;
  const std::complex<double> disc =
      std::sqrt(std::complex<double>(trace * trace - 4.0 * f_s, 0.0));
  LocalStability out;
  out.gamma_plus = 0.5 * (std::complex<double>(trace, 0.0) + disc);
  out.gamma_minus = 0.5 * (std::complex<double>(trace, 0.0) - disc);
  out.locally_stable =
      out.gamma_plus.real() < 0.0 && out.gamma_minus.real() < 0.0;
  return out;
}

StringCriterion string_criterion(double f_s, double f_v, double f_dv) {
  if (f_v == 0.0) {
    throw std::domain_error("string_criterion: degenerate equilibrium f_v=0");
  }
  const double value = 0.5 - f_dv / f_v - f_s / (f_v * f_v);
  return {value, value > 0.0};
}

double transfer_magnitude(double f_s, double f_v, double f_dv, double omega) {
  const double w2 = omega * omega;
  const double num = f_s * f_s + w2 * f_dv * f_dv;
  const double d1 = f_s - w2;
  const double d2 = f_v - f_dv;
  const double den = d1 * d1 + w2 * d2 * d2;
  return std::sqrt(num / den);
}

double max_transfer_magnitude(double f_s, double f_v, double f_dv,
                              double omega_lo, double omega_hi, int n) {
  double best = 0.0;
  const double ratio = std::log(omega_hi / omega_lo);
  for (int k = 0; k < n; ++k) {
    const double w =
        omega_lo * std::exp(ratio * static_cast<double>(k) / (n - 1));
    best = std::max(best, transfer_magnitude(f_s, f_v, f_dv, w));
  }
  return best;
}

StabilityReport analyze_point(const ModelParams& p, Model m, double v_i,
                              double s_i) {
  StabilityReport r;
  r.partials = partial_derivatives(p, m, v_i, s_i);
  r.local = local_stability(r.partials.f_s, r.partials.f_v, r.partials.f_dv);
  r.string =
      string_criterion(r.partials.f_s, r.partials.f_v, r.partials.f_dv);
  return r;
}

const char* cell_class_name(CellClass c) {
  switch (c) {
    case CellClass::stable: return "stable";
    case CellClass::string_unstable: return "string_unstable";
    case CellClass::locally_unstable: return "locally_unstable";
  }
  return "?";
}

StabilityMap stability_map(const ModelParams& base, Model m, double v_e,
                           std::span<const double> lambda_grid,
                           std::span<const double> dc_grid, Exec exec) {
  if (lambda_grid.empty() || dc_grid.empty()) {
    throw std::invalid_argument("stability_map: grids must be non-empty");
  }
  StabilityMap map;
  map.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  map.dc_grid.assign(dc_grid.begin(), dc_grid.end());
  map.v_e = v_e;
  map.base = base;
  map.cells.resize(lambda_grid.size() * dc_grid.size());

  parallel_for(map.cells.size(), exec, [&](std::size_t k) {
    const std::size_t i = k / dc_grid.size();
    const std::size_t j = k % dc_grid.size();
    ModelParams p = base;
    p.lambda = lambda_grid[i];
    p.d_c = dc_grid[j];

    StabilityMap::Cell cell{};
    cell.lambda = p.lambda;
    cell.d_c = p.d_c;
    const EquilibriumPoint eq =
        m == Model::idm
            ? EquilibriumPoint{v_e, idm_equilibrium_spacing(v_e, p),
                               EqBranch::idm_branch, 0.0}
            : sigmoid_idm_equilibrium(v_e, p);
    cell.s_e = eq.s_e;
    cell.branch = eq.branch;
    cell.quasi = eq.branch == EqBranch::quasi;
    cell.partials = partial_derivatives(p, m, v_e, eq.s_e);
    const LocalStability loc =
        local_stability(cell.partials.f_s, cell.partials.f_v,
                        cell.partials.f_dv);
    const StringCriterion sc = string_criterion(
        cell.partials.f_s, cell.partials.f_v, cell.partials.f_dv);
    cell.criterion = sc.value;
    cell.locally_stable = loc.locally_stable;
    cell.string_stable = sc.string_stable;
    cell.cls = !loc.locally_stable ? CellClass::locally_unstable
               : (!sc.string_stable ? CellClass::string_unstable
                                    : CellClass::stable);
    map.cells[k] = cell;
  });
  return map;
}

}  // namespace sidm
