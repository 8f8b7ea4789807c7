#include "sidm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sidm/rng.hpp"

namespace sidm {

const char* model_name(Model m) {
  return m == Model::idm ? "idm" : "sigmoid_idm";
}

Model model_from_name(const std::string& name) {
  if (name == "idm") return Model::idm;
  if (name == "sigmoid_idm") return Model::sigmoid_idm;
  throw std::invalid_argument("unknown model '" + name +
                              "' (expected idm or sigmoid_idm)");
}

void ModelParams::validate(Model m) const {
  auto positive = [](double x, const char* field) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument(std::string("ModelParams: ") + field +
                                  " must be > 0");
    }
  };
  positive(a, "a");
  positive(b, "b");
  positive(v0, "v0");
  positive(T, "T");
  positive(s0, "s0");
  if (!(delta >= 1.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("ModelParams: delta must be >= 1");
  }
  if (m == Model::sigmoid_idm) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw std::invalid_argument("ModelParams: lambda must be >= 0");
    }
    if (!(d_c >= 0.0) || !std::isfinite(d_c)) {
      throw std::invalid_argument("ModelParams: d_c must be >= 0");
    }
  }
}

double desired_spacing(double v, double v_lead, const ModelParams& p) {
  const double dv = v - v_lead;
  return p.s0 + v * p.T + v * dv / (2.0 * std::sqrt(p.a * p.b));
}

KinematicContext KinematicContext::of(double gap, double v, double v_lead,
                                      const ModelParams& p) {
  return KinematicContext{gap, v, v_lead, v - v_lead,
                          desired_spacing(v, v_lead, p)};
}

double free_acceleration(double v, const ModelParams& p) {
  return p.a * (1.0 - std::pow(v / p.v0, p.delta));
}

static void require_open_gap(double gap) {
  if (!(gap > 0.0)) {
    throw std::domain_error("nonpositive gap (collision state)");
  }
}

double idm_branch_acceleration(const KinematicContext& ctx,
                               const ModelParams& p) {
  const double r = ctx.s_star / ctx.gap;
  return p.a * (1.0 - std::pow(ctx.v / p.v0, p.delta) - r * r);
}

double sigmoid_gap_term(double gap, double s_star, const ModelParams& p) {
  // 1/(1+exp(x)) computed as exp(-x)/(1+exp(-x)) for x > 0 to avoid
  // overflow at large gaps.
  const double x = p.lambda * (gap - s_star - p.d_c);
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double sigmoid_branch_acceleration(const KinematicContext& ctx,
                                   const ModelParams& p) {
  return p.a * (1.0 - std::pow(ctx.v / p.v0, p.delta) -
                sigmoid_gap_term(ctx.gap, ctx.s_star, p));
}

bool on_idm_branch(double gap, double s_star, const ModelParams& p) {
  return gap > p.s0 && gap <= s_star;
}

double idm_acceleration(const KinematicContext& ctx, const ModelParams& p) {
  require_open_gap(ctx.gap);
  return idm_branch_acceleration(ctx, p);
}

double sigmoid_idm_acceleration(const KinematicContext& ctx,
                                const ModelParams& p) {
  require_open_gap(ctx.gap);
  if (on_idm_branch(ctx.gap, ctx.s_star, p)) {
    return idm_branch_acceleration(ctx, p);
  }
  return sigmoid_branch_acceleration(ctx, p);
}

double acceleration(Model m, const KinematicContext& ctx,
                    const ModelParams& p) {
  return m == Model::idm ? idm_acceleration(ctx, p)
                         : sigmoid_idm_acceleration(ctx, p);
}

AccelEval acceleration_with_branch(Model m, const KinematicContext& ctx,
                                   const ModelParams& p) {
  require_open_gap(ctx.gap);
  if (m == Model::idm || on_idm_branch(ctx.gap, ctx.s_star, p)) {
    return {idm_branch_acceleration(ctx, p), false};
  }
  return {sigmoid_branch_acceleration(ctx, p), true};
}

void RandomGapPolicy::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("RandomGapPolicy: p must be in [0,1]");
  }
  if (!(d >= 0.0)) {
    throw std::invalid_argument("RandomGapPolicy: d must be >= 0");
  }
}

double update_cautious_distance(double d_c, const RandomGapPolicy& policy,
                                std::mt19937_64& rng) {
  if (uniform01(rng) >= policy.p) return d_c;
  double r = 0.0;
  switch (policy.r_mode) {
    case RMode::negative:
      r = -uniform01(rng);
      break;
    case RMode::zero:
      r = 0.0;
      break;
    case RMode::positive:
      r = uniform01(rng);
      break;
    case RMode::symmetric:
      r = 2.0 * uniform01(rng) - 1.0;
      break;
  }
  return std::max(d_c + r * policy.d, policy.floor);
}

}  // namespace sidm
