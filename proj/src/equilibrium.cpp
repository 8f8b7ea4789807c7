#include "sidm/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sidm/nelder_mead.hpp"
#include "sidm/rng.hpp"

namespace sidm {

const char* branch_name(EqBranch b) {
  switch (b) {
    case EqBranch::idm_branch: return "idm";
    case EqBranch::sigmoid_branch: return "sigmoid";
    case EqBranch::quasi: return "quasi";
  }
  return "?";
}

static void require_speed_below_v0(double v_e, const ModelParams& p) {
  if (!(v_e >= 0.0) || !std::isfinite(v_e)) {
    throw std::domain_error("equilibrium speed must be >= 0");
  }
  if (v_e >= p.v0) {
    throw std::domain_error("equilibrium speed must be below v0");
  }
}

double idm_equilibrium_spacing(double v_e, const ModelParams& p) {
  require_speed_below_v0(v_e, p);
  const double denom = 1.0 - std::pow(v_e / p.v0, p.delta);
  return (p.s0 + v_e * p.T) / std::sqrt(denom);
}

// Acceleration of the full Sigmoid-IDM piecewise law at (S, v_e, dv = 0).
static double steady_accel(double gap, double v_e, const ModelParams& p) {
  return sigmoid_idm_acceleration(
      KinematicContext::of(gap, v_e, v_e, p), p);
}

EquilibriumPoint sigmoid_idm_equilibrium(double v_e, const ModelParams& p,
                                         double accel_tol) {
  require_speed_below_v0(v_e, p);
  const double ratio = std::pow(v_e / p.v0, p.delta);
  const double s_star = p.s0 + v_e * p.T;  // dv = 0
  const double s_max = 10.0 * (p.s0 + p.v0 * p.T + p.d_c);

  // Sigmoid-side value as S -> S*+; the sign decides root existence: the
  // sigmoid branch is strictly increasing in S up to a(1 - ratio) > 0.
  const double at_boundary_sig =
      p.a * (1.0 - ratio - sigmoid_gap_term(s_star, s_star, p));

  if (v_e == 0.0) {
    // The quadratic branch is empty (S* = s0); the infimum of |a_n| over
    // (s0, s_max] is attained in the limit S -> s0, evaluated exactly.
    const double residual = std::fabs(steady_accel(p.s0, 0.0, p));
    return {0.0, p.s0, EqBranch::quasi, residual};
  }

  if (at_boundary_sig < -accel_tol) {
    double lo = s_star;
    double hi = s_max;
    if (steady_accel(hi, v_e, p) < 0.0) {
      // root beyond the default cap (v_e extremely close to v0)
      hi = s_star + p.d_c +
           std::log(1.0 / (1.0 - ratio)) / std::max(p.lambda, 1e-12) + 10.0;
    }
    // bisection on the sigmoid expression; lo carries the boundary limit
    double flo = at_boundary_sig;
    while (hi - lo > 1e-9) {
      const double mid = 0.5 * (lo + hi);
      const double fm = sigmoid_branch_acceleration(
          KinematicContext::of(mid, v_e, v_e, p), p);
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    const double s_e = 0.5 * (lo + hi);
    return {v_e, s_e, EqBranch::sigmoid_branch,
            std::fabs(steady_accel(s_e, v_e, p))};
  }

  // No exact root in (s0, s_max]: |a_n| is minimized at the branch
  // boundary, approached from the quadratic side (value -a*ratio) and the
  // sigmoid side (value at_boundary_sig >= 0).
  const double residual = std::min(p.a * ratio, std::fabs(at_boundary_sig));
  return {v_e, s_star, EqBranch::quasi, residual};
}

double equilibrium_spacing(Model m, double v_e, const ModelParams& p) {
  if (m == Model::idm) return idm_equilibrium_spacing(v_e, p);
  return sigmoid_idm_equilibrium(v_e, p).s_e;
}

EquilibriumSpeed equilibrium_speed_for_spacing(Model m, double gap,
                                               const ModelParams& p) {
  if (!(gap > 0.0)) throw std::domain_error("gap must be > 0");
  auto accel_at = [&](double v) {
    return acceleration(m, KinematicContext::of(gap, v, v, p), p);
  };
  // Both laws are strictly decreasing in v at fixed gap and dv = 0, with
  // a jump (Sigmoid-IDM) at the branch boundary v_b = (gap - s0)/T.
  const double v_hi = p.v0 * (1.0 - 1e-12);
  if (accel_at(0.0) <= 0.0) {
    return {0.0, std::fabs(accel_at(0.0)) <= 1e-12, std::fabs(accel_at(0.0))};
  }
  if (m == Model::sigmoid_idm) {
    const double v_b = (gap - p.s0) / p.T;
    if (v_b > 0.0 && v_b < v_hi) {
      const double below = sigmoid_branch_acceleration(
          KinematicContext::of(gap, v_b, v_b, p), p);
      if (below > 0.0) {
        // Sign changes only across the branch jump: quasi point at v_b.
        const double above = idm_branch_acceleration(
            KinematicContext::of(gap, v_b, v_b, p), p);
        return {v_b, false, std::min(below, std::fabs(above))};
      }
    }
  }
  double lo = 0.0, hi = v_hi;
  while (hi - lo > 1e-12 * p.v0) {
    const double mid = 0.5 * (lo + hi);
    (accel_at(mid) > 0.0 ? lo : hi) = mid;
  }
  const double v = 0.5 * (lo + hi);
  return {v, true, std::fabs(accel_at(v))};
}

FundamentalDiagram fundamental_diagram(const ModelParams& p, Model m,
                                       double vehicle_length,
                                       std::span<const double> v_grid,
                                       Exec exec) {
  p.validate(m);
  for (double v : v_grid) {
    if (!(v >= 0.0) || v >= p.v0) {
      throw std::domain_error("v_grid must lie in [0, v0)");
    }
  }
  std::vector<double> spacing(v_grid.size());
  parallel_for(v_grid.size(), exec, [&](std::size_t i) {
    spacing[i] = equilibrium_spacing(m, v_grid[i], p);
  });

  // Equilibrium branch sorted by increasing density (decreasing speed).
  std::vector<std::size_t> idx(v_grid.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return spacing[a] > spacing[b];
  });

  FundamentalDiagram fd;
  fd.vehicle_length = vehicle_length;
  const double rho_branch_min =
      1.0 / (spacing[idx.front()] + vehicle_length);

  // Free-flow ray Q = v0 rho below the branch's low-density end.
  const int n_ray = 24;
  for (int k = 1; k < n_ray; ++k) {
    const double rho = rho_branch_min * static_cast<double>(k) / n_ray;
    fd.points.push_back({rho, p.v0 * rho, p.v0});
  }
  double last_rho = fd.points.empty() ? 0.0 : fd.points.back().rho;
  for (std::size_t i : idx) {
    const double rho = 1.0 / (spacing[i] + vehicle_length);
    if (rho <= last_rho) continue;  // keep rho strictly increasing
    fd.points.push_back({rho, rho * v_grid[i], v_grid[i]});
    last_rho = rho;
  }
  return fd;
}

double max_flow(const FundamentalDiagram& fd) {
  double q = 0.0;
  for (const auto& pt : fd.points) q = std::max(q, pt.q);
  return q;
}

double density_at_max_flow(const FundamentalDiagram& fd) {
  double q = -1.0, rho = 0.0;
  for (const auto& pt : fd.points) {
    if (pt.q > q) {
      q = pt.q;
      rho = pt.rho;
    }
  }
  return rho;
}

double get_param(const ModelParams& p, const std::string& name) {
  if (name == "a") return p.a;
  if (name == "b") return p.b;
  if (name == "v0") return p.v0;
  if (name == "T") return p.T;
  if (name == "s0") return p.s0;
  if (name == "delta") return p.delta;
  if (name == "lambda") return p.lambda;
  if (name == "d_c") return p.d_c;
  throw std::invalid_argument("unknown parameter '" + name + "'");
}

void set_param(ModelParams& p, const std::string& name, double value) {
  if (name == "a") p.a = value;
  else if (name == "b") p.b = value;
  else if (name == "v0") p.v0 = value;
  else if (name == "T") p.T = value;
  else if (name == "s0") p.s0 = value;
  else if (name == "delta") p.delta = value;
  else if (name == "lambda") p.lambda = value;
  else if (name == "d_c") p.d_c = value;
  else throw std::invalid_argument("unknown parameter '" + name + "'");
}

ParamBox default_bounds(Model m) {
  ParamBox box = {
      {"a", 0.1, 6.0},  {"b", 0.1, 6.0},  {"v0", 10.0, 40.0},
      {"T", 0.1, 4.0},  {"s0", 0.1, 6.0},
  };
  if (m == Model::sigmoid_idm) {
    box.push_back({"lambda", 0.0, 2.0});
    box.push_back({"d_c", 0.1, 20.0});
  }
  return box;
}

SteadyStateFit fit_steady_state(std::span<const SteadyStatePoint> points,
                                Model m, const ParamBox& bounds,
                                const ModelParams& base, std::uint64_t seed) {
  if (points.size() < bounds.size()) {
    throw std::invalid_argument(
        "fit_steady_state: need at least as many points as free parameters");
  }
  auto objective = [&](const std::vector<double>& theta) {
    ModelParams p = base;
    double penalty = 0.0;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      double x = theta[i];
      if (x < bounds[i].lo) {
        penalty += 1e3 * (bounds[i].lo - x) * (bounds[i].lo - x);
        x = bounds[i].lo;
      } else if (x > bounds[i].hi) {
        penalty += 1e3 * (x - bounds[i].hi) * (x - bounds[i].hi);
        x = bounds[i].hi;
      }
      set_param(p, bounds[i].name, x);
    }
    double sse = penalty;
    for (const auto& pt : points) {
      if (pt.v >= p.v0) {
        sse += 1e6 * (1.0 + pt.v - p.v0) * (1.0 + pt.v - p.v0);
        continue;
      }
      const double s = equilibrium_spacing(m, pt.v, p);
      sse += (s - pt.s) * (s - pt.s);
    }
    return sse;
  };

  // Multi-start: box center, a data-informed guess, and seeded samples.
  std::vector<std::vector<double>> starts;
  std::vector<double> center;
  for (const auto& bp : bounds) center.push_back(0.5 * (bp.lo + bp.hi));
  starts.push_back(center);

  double v_max = 0.0, s_min = 1e300;
  for (const auto& pt : points) {
    v_max = std::max(v_max, pt.v);
    s_min = std::min(s_min, pt.s);
  }
  std::vector<double> guess;
  for (const auto& bp : bounds) {
    double g = get_param(base, bp.name);
    if (bp.name == "v0") g = 1.1 * v_max;
    if (bp.name == "s0") g = s_min;
    guess.push_back(std::clamp(g, bp.lo, bp.hi));
  }
  starts.push_back(guess);

  std::mt19937_64 rng(mix_seed(seed, 0x5f17));
  for (int k = 0; k < 10; ++k) {
    std::vector<double> x;
    for (const auto& bp : bounds) x.push_back(uniform(rng, bp.lo, bp.hi));
    starts.push_back(x);
  }

  NelderMeadOptions opts;
  opts.max_iterations = 6000;
  opts.restarts = 2;
  NelderMeadResult best;
  best.fx = 1e300;
  bool conv = false;
  for (auto& x0 : starts) {
    NelderMeadResult r = nelder_mead(objective, x0, opts);
    if (r.fx < best.fx) {
      best = r;
      conv = r.converged;
    }
  }

  SteadyStateFit fit;
  fit.params = base;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    set_param(fit.params, bounds[i].name,
              std::clamp(best.x[i], bounds[i].lo, bounds[i].hi));
  }
  fit.sse = best.fx;
  fit.converged = conv;
  return fit;
}

}  // namespace sidm
