#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sidm/model.hpp"
#include "sidm/parallel.hpp"

namespace sidm {

enum class EqBranch { idm_branch, sigmoid_branch, quasi };

const char* branch_name(EqBranch b);

/// (v_e, s_e) pair with branch/quality flags. `residual` is |a_n| at the
/// returned point; it is 0 up to the bisection tolerance for exact roots
/// and bounded by a/(1+exp(lambda*d_c)) for quasi points.
struct EquilibriumPoint {
  double v_e;
  double s_e;
  EqBranch branch;
  double residual;
};

/// Eq.-style closed form (s0 + v_e T)/sqrt(1 - (v_e/v0)^delta).
/// Throws std::domain_error for v_e >= v0 (denominator <= 0) or v_e < 0.
double idm_equilibrium_spacing(double v_e, const ModelParams& p);

/// Root-finds S with a_n(S, v_e, dv=0) = 0 over the full piecewise law,
/// bisecting on S in (s0, s_max], s_max = 10 (s0 + v0 T + d_c), to 1e-9 m.
/// The quadratic branch carries no root for v_e > 0 (its closed form
/// violates its own validity window), so an exact root, when it exists,
/// lies on the sigmoid side and matches the logarithmic closed form.
/// When no root exists the spacing minimizing |a_n| is returned with
/// branch = quasi and the achieved residual. `accel_tol` only pads the
/// root-existence sign test.
EquilibriumPoint sigmoid_idm_equilibrium(double v_e, const ModelParams& p,
                                         double accel_tol = 1e-12);

/// Dispatch: spacing at which acceleration vanishes for the given steady
/// speed (exact for IDM, EquilibriumPoint::s_e for Sigmoid-IDM).
double equilibrium_spacing(Model m, double v_e, const ModelParams& p);

/// Inverse problem used for ring initialization: the steady speed for a
/// given gap. `exact` is false when the acceleration only changes sign
/// across the branch boundary (the piecewise law has no root in v); the
/// boundary speed (gap - s0)/T is returned in that case.
struct EquilibriumSpeed {
  double v;
  bool exact;
  double residual;
};
EquilibriumSpeed equilibrium_speed_for_spacing(Model m, double gap,
                                               const ModelParams& p);

struct FdPoint {
  double rho;  // veh/m
  double q;    // veh/s
  double v;    // m/s
};

/// Flow-density-speed triplets with rho strictly increasing. The first
/// points are the free-flow ray Q = v0 rho, appended for densities below
/// the low-density end of the equilibrium branch.
struct FundamentalDiagram {
  std::vector<FdPoint> points;
  double vehicle_length;
  std::optional<std::pair<double, double>> critical_densities;
};

FundamentalDiagram fundamental_diagram(const ModelParams& p, Model m,
                                       double vehicle_length,
                                       std::span<const double> v_grid,
                                       Exec exec = Exec::parallel);

double max_flow(const FundamentalDiagram& fd);
double density_at_max_flow(const FundamentalDiagram& fd);

/// Least-squares fit of the steady-state spacing relation to observed
/// (v_mean, s_mean) points; free parameters and their boxes come from
/// `bounds`, everything else is taken from `base`. Multi-start
/// Nelder-Mead; deterministic given `seed`.
struct SteadyStatePoint {
  double v;
  double s;
};
struct BoundedParam {
  // Field of ModelParams addressed by name: a b v0 T s0 delta lambda d_c.
  std::string name;
  double lo;
  double hi;
};
using ParamBox = std::vector<BoundedParam>;

double get_param(const ModelParams& p, const std::string& name);
void set_param(ModelParams& p, const std::string& name, double value);

/// Table-style default calibration boxes.
ParamBox default_bounds(Model m);

struct SteadyStateFit {
  ModelParams params;
  double sse;
  bool converged;
};

SteadyStateFit fit_steady_state(std::span<const SteadyStatePoint> points,
                                Model m, const ParamBox& bounds,
                                const ModelParams& base,
                                std::uint64_t seed = 1);

}  // namespace sidm
