#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace sidm {

enum class Model { idm, sigmoid_idm };

const char* model_name(Model m);
Model model_from_name(const std::string& name);

/// Full parameter vector shared by both acceleration laws. `lambda` and
/// `d_c` are only read by the Sigmoid-IDM.
struct ModelParams {
  double a = 1.5;      // maximum acceleration, m/s^2
  double b = 2.0;      // desired deceleration, m/s^2
  double v0 = 30.0;    // desired velocity, m/s
  double T = 1.5;      // safe time headway, s
  double s0 = 2.0;     // jam distance, m
  double delta = 4.0;  // acceleration exponent
  double lambda = 1.0; // cautious driving factor, 1/m
  double d_c = 10.0;   // cautious following distance, m

  // Throws std::invalid_argument naming the offending field.
  void validate(Model m) const;
};

/// One vehicle's instantaneous stimulus. `dv` is the approach rate
/// v - v_lead (positive when closing in); `s_star` is the desired spacing
/// for the params it was built with. No clamping anywhere: s_star may be
/// below s0 or negative when the gap is opening fast.
struct KinematicContext {
  double gap;
  double v;
  double v_lead;
  double dv;
  double s_star;

  static KinematicContext of(double gap, double v, double v_lead,
                             const ModelParams& p);
};

double desired_spacing(double v, double v_lead, const ModelParams& p);
double free_acceleration(double v, const ModelParams& p);

// Throws std::domain_error on ctx.gap <= 0 (collision state; the caller
// decides policy).
double idm_acceleration(const KinematicContext& ctx, const ModelParams& p);
double sigmoid_idm_acceleration(const KinematicContext& ctx,
                                const ModelParams& p);
double acceleration(Model m, const KinematicContext& ctx,
                    const ModelParams& p);

/// True when the Sigmoid-IDM selects its quadratic spacing branch,
/// i.e. s0 < S <= S*. Everything else (including S <= s0) falls to the
/// sigmoid branch; at v = 0 the quadratic branch is empty since S* = s0.
bool on_idm_branch(double gap, double s_star, const ModelParams& p);

/// The sigmoid spacing term [1 + exp(lambda (S - S* - d_c))]^{-1},
/// evaluated overflow-safe.
double sigmoid_gap_term(double gap, double s_star, const ModelParams& p);

/// Branch expressions evaluated unconditionally (used by the stability
/// and equilibrium modules and by the branch-boundary jump tests).
double idm_branch_acceleration(const KinematicContext& ctx,
                               const ModelParams& p);
double sigmoid_branch_acceleration(const KinematicContext& ctx,
                                   const ModelParams& p);

struct AccelEval {
  double accel;
  bool sigmoid_branch;  // false for Model::idm
};
AccelEval acceleration_with_branch(Model m, const KinematicContext& ctx,
                                   const ModelParams& p);

enum class RMode { negative, zero, positive, symmetric };

/// Per-step random variation of the cautious following distance.
struct RandomGapPolicy {
  double p = 0.25;              // change probability per step
  double d = 5.0;               // variation range, m
  RMode r_mode = RMode::symmetric;
  double floor = 0.0;           // minimum d_c, m

  void validate() const;
};

/// With probability policy.p returns max(d_c + r*d, floor) where r is
/// drawn per r_mode; otherwise d_c unchanged. Deterministic given the
/// generator state.
double update_cautious_distance(double d_c, const RandomGapPolicy& policy,
                                std::mt19937_64& rng);

}  // namespace sidm
