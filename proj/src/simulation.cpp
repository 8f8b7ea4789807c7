#include "sidm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sidm/equilibrium.hpp"
#include "sidm/rng.hpp"

namespace sidm {

double leader_speed(const LeaderProfile& profile, double t) {
  return std::visit(
      [t](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ConstantSpeed>) {
          return p.v;
        } else if constexpr (std::is_same_v<P, Stationary>) {
          return 0.0;
        } else if constexpr (std::is_same_v<P, PiecewiseSpeed>) {
          double v = p.knots.empty() ? 0.0 : p.knots.front().second;
          for (const auto& [from, speed] : p.knots) {
            if (t >= from) v = speed;
          }
          return v;
        } else if constexpr (std::is_same_v<P, SinusoidSpeed>) {
          return p.mean +
                 p.amplitude * std::sin(6.283185307179586 * t / p.period);
        } else {
          if (p.t.empty()) return 0.0;
          if (t <= p.t.front()) return p.v.front();
          if (t >= p.t.back()) return p.v.back();
          const auto it = std::upper_bound(p.t.begin(), p.t.end(), t);
          const std::size_t hi = static_cast<std::size_t>(it - p.t.begin());
          const std::size_t lo = hi - 1;
          const double w = (t - p.t[lo]) / (p.t[hi] - p.t[lo]);
          return p.v[lo] + w * (p.v[hi] - p.v[lo]);
        }
      },
      profile);
}

void validate_profile(const LeaderProfile& profile) {
  std::visit(
      [](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ConstantSpeed>) {
          if (p.v < 0.0) throw std::invalid_argument("leader speed < 0");
        } else if constexpr (std::is_same_v<P, PiecewiseSpeed>) {
          for (const auto& [from, speed] : p.knots) {
            (void)from;
            if (speed < 0.0) throw std::invalid_argument("leader speed < 0");
          }
        } else if constexpr (std::is_same_v<P, SinusoidSpeed>) {
          if (p.mean - p.amplitude < 0.0) {
            throw std::invalid_argument("sinusoid dips below 0");
          }
          if (!(p.period > 0.0)) {
            throw std::invalid_argument("sinusoid period must be > 0");
          }
        } else if constexpr (std::is_same_v<P, RecordedSpeed>) {
          if (p.t.size() != p.v.size() || p.t.empty()) {
            throw std::invalid_argument("recorded profile: bad series");
          }
          for (double v : p.v) {
            if (v < 0.0) throw std::invalid_argument("leader speed < 0");
          }
        }
      },
      profile);
}

void PlatoonConfig::validate() const {
  if (followers.empty()) {
    throw std::invalid_argument("PlatoonConfig: no followers");
  }
  if (initial_gaps.size() != followers.size() ||
      initial_velocities.size() != followers.size()) {
    throw std::invalid_argument(
        "PlatoonConfig: initial_gaps/initial_velocities must match follower "
        "count");
  }
  for (double g : initial_gaps) {
    if (!(g > 0.0)) {
      throw std::invalid_argument("PlatoonConfig: initial gaps must be > 0");
    }
  }
  if (!(dt > 0.0)) throw std::invalid_argument("PlatoonConfig: dt must be > 0");
  if (!(duration > 0.0)) {
    throw std::invalid_argument("PlatoonConfig: duration must be > 0");
  }
  for (const auto& f : followers) f.params.validate(f.model);
  validate_profile(leader);
  if (gap_policy) gap_policy->validate();
}

void RingConfig::validate() const {
  if (n_vehicles < 2) {
    throw std::invalid_argument("RingConfig: need at least 2 vehicles");
  }
  if (!(n_vehicles * vehicle_length < circumference)) {
    throw std::invalid_argument(
        "RingConfig: vehicles do not fit on the ring (n*length >= L)");
  }
  if (vehicles.size() != 1 &&
      vehicles.size() != static_cast<std::size_t>(n_vehicles)) {
    throw std::invalid_argument(
        "RingConfig: vehicles must have size 1 or n_vehicles");
  }
  if (!(dt > 0.0) || !(duration > 0.0)) {
    throw std::invalid_argument("RingConfig: dt and duration must be > 0");
  }
  for (const auto& v : vehicles) v.params.validate(v.model);
  if (gap_policy) gap_policy->validate();
}

namespace {

struct Integrated {
  double x;
  double v;
  bool clamped;
};

Integrated advance(double x, double v, double a, double dt, bool clamp,
                   Integrator integrator) {
  if (integrator == Integrator::euler) {
    double v1 = v + a * dt;
    if (clamp && v1 < 0.0) return {x + v * dt, 0.0, true};
    return {x + v * dt, v1, false};
  }
  const double v1 = v + a * dt;
  if (clamp && v1 < 0.0) {
    // truncated motion: decelerate to standstill inside the step
    const double t_stop = a < 0.0 ? -v / a : 0.0;
    return {x + v * t_stop + 0.5 * a * t_stop * t_stop, 0.0, true};
  }
  return {x + v * dt + 0.5 * a * dt * dt, v1, false};
}

struct Engine {
  // per-vehicle working state; index 0..n-1
  std::vector<double> x, v, dc;
  std::vector<int> branch;  // -1 unknown, 0 idm side, 1 sigmoid side
  Trajectory traj;
  std::mt19937_64 rng;

  void init(std::size_t n, double dt, bool with_dc) {
    x.assign(n, 0.0);
    v.assign(n, 0.0);
    branch.assign(n, -1);
    traj.dt = dt;
    traj.states.resize(n);
    traj.gaps.resize(n);
    if (with_dc) {
      dc.assign(n, 0.0);
      traj.d_c_log.emplace(n);
    }
  }

  void record(std::size_t i, double a, double gap) {
    traj.states[i].push_back({x[i], v[i], a});
    traj.gaps[i].push_back(gap);
    if (traj.d_c_log) (*traj.d_c_log)[i].push_back(dc[i]);
  }
};

}  // namespace

Trajectory simulate_platoon(const PlatoonConfig& config) {
  config.validate();
  const std::size_t n_follow = config.followers.size();
  const std::size_t n = n_follow + 1;  // + leader
  const int n_steps =
      static_cast<int>(std::llround(config.duration / config.dt)) + 1;

  Engine e;
  e.init(n, config.dt, config.gap_policy.has_value());
  e.rng.seed(mix_seed(config.seed, 0));

  e.v[0] = leader_speed(config.leader, 0.0);
  e.x[0] = 0.0;
  for (std::size_t i = 0; i < n_follow; ++i) {
    e.x[i + 1] =
        e.x[i] - config.vehicle_length - config.initial_gaps[i];
    e.v[i + 1] = config.initial_velocities[i];
    if (config.gap_policy) e.dc[i + 1] = config.followers[i].params.d_c;
  }
  if (config.gap_policy) e.dc[0] = 0.0;

  std::vector<double> accel(n, 0.0);
  for (int k = 0; k < n_steps; ++k) {
    const double t = k * config.dt;

    // leader acceleration realizes the profile between sample times
    const double v_next = leader_speed(config.leader, t + config.dt);
    accel[0] = (v_next - e.v[0]) / config.dt;

    bool collided = false;
    for (std::size_t i = 0; i < n_follow; ++i) {
      const std::size_t self = i + 1;
      const double gap = e.x[self - 1] - config.vehicle_length - e.x[self];
      if (!(gap > 0.0)) {
        e.traj.events.push_back(
            {Event::Type::collision, k, static_cast<int>(self)});
        if (config.halt_on_collision) {
          collided = true;
          break;
        }
        // continue mode: hard braking while overlapped
        accel[self] = e.v[self] > 0.0
                          ? -2.0 * config.followers[i].params.b
                          : 0.0;
        continue;
      }
      ModelParams p = config.followers[i].params;
      if (config.gap_policy) p.d_c = e.dc[self];
      const KinematicContext ctx =
          KinematicContext::of(gap, e.v[self], e.v[self - 1], p);
      const AccelEval ev =
          acceleration_with_branch(config.followers[i].model, ctx, p);
      accel[self] = ev.accel;
      const int br = ev.sigmoid_branch ? 1 : 0;
      if (config.log_branch_switches && e.branch[self] >= 0 &&
          e.branch[self] != br) {
        e.traj.events.push_back(
            {Event::Type::branch_switch, k, static_cast<int>(self)});
      }
      e.branch[self] = br;
    }
    if (collided) {
      e.traj.halted = true;
      break;
    }

    // record state + applied acceleration, then integrate everyone
    for (std::size_t i = 0; i < n; ++i) {
      const double gap =
          i == 0 ? std::nan("")
                 : e.x[i - 1] - config.vehicle_length - e.x[i];
      e.record(i, accel[i], gap);
    }
    if (k == n_steps - 1) break;

    for (std::size_t i = 0; i < n; ++i) {
      const bool clamp = i == 0 ? true : config.velocity_clamp;
      if (i > 0 && !config.velocity_clamp &&
          e.v[i] + accel[i] * config.dt < 0.0 && e.v[i] >= 0.0) {
        e.traj.events.push_back(
            {Event::Type::negative_velocity, k, static_cast<int>(i)});
      }
      const Integrated out = advance(e.x[i], e.v[i], accel[i], config.dt,
                                     clamp, config.integrator);
      e.x[i] = out.x;
      e.v[i] = out.v;
    }
    // leader velocity follows the profile exactly at sample times
    e.v[0] = std::max(0.0, v_next);

    if (config.gap_policy) {
      for (std::size_t i = 1; i < n; ++i) {
        e.dc[i] = update_cautious_distance(e.dc[i], *config.gap_policy, e.rng);
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(e.x[i]) || !std::isfinite(e.v[i])) {
        throw std::runtime_error("simulate_platoon: non-finite state at step " +
                                 std::to_string(k));
      }
    }
  }
  return e.traj;
}

Trajectory simulate_ring(const RingConfig& config) {
  config.validate();
  const std::size_t n = static_cast<std::size_t>(config.n_vehicles);
  const int n_steps =
      static_cast<int>(std::llround(config.duration / config.dt)) + 1;
  auto spec = [&](std::size_t i) -> const VehicleSpec& {
    return config.vehicles.size() == 1 ? config.vehicles.front()
                                       : config.vehicles[i];
  };

  Engine e;
  e.init(n, config.dt, config.gap_policy.has_value());
  e.rng.seed(mix_seed(config.seed, 0));

  if (config.init == RingConfig::Init::homogeneous) {
    const double gap = config.circumference / n - config.vehicle_length;
    for (std::size_t i = 0; i < n; ++i) {
      e.x[i] = (config.circumference / n) * static_cast<double>(i);
      e.v[i] = config.init_velocity
                   ? *config.init_velocity
                   : equilibrium_speed_for_spacing(spec(i).model, gap,
                                                   spec(i).params)
                         .v;
    }
  } else {
    // standing queue starting at position 0; the lead vehicle of the
    // queue gets the remaining road as its gap
    const double gap = config.jam_gap < 0.0 ? spec(0).params.s0
                                            : config.jam_gap;
    for (std::size_t i = 0; i < n; ++i) {
      e.x[i] = static_cast<double>(i) * (config.vehicle_length + gap);
      e.v[i] = 0.0;
    }
    if (e.x[n - 1] + config.vehicle_length >= config.circumference) {
      throw std::invalid_argument("RingConfig: jam does not fit on the ring");
    }
  }
  if (config.gap_policy) {
    for (std::size_t i = 0; i < n; ++i) e.dc[i] = spec(i).params.d_c;
  }

  std::vector<double> accel(n, 0.0);
  std::vector<double> gaps(n, 0.0);
  for (int k = 0; k < n_steps; ++k) {
    bool collided = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lead = (i + 1) % n;
      const double lead_x =
          i == n - 1 ? e.x[lead] + config.circumference : e.x[lead];
      const double gap = lead_x - config.vehicle_length - e.x[i];
      gaps[i] = gap;
      if (!(gap > 0.0)) {
        e.traj.events.push_back(
            {Event::Type::collision, k, static_cast<int>(i)});
        if (config.halt_on_collision) {
          collided = true;
          break;
        }
        accel[i] = e.v[i] > 0.0 ? -2.0 * spec(i).params.b : 0.0;
        continue;
      }
      ModelParams p = spec(i).params;
      if (config.gap_policy) p.d_c = e.dc[i];
      const KinematicContext ctx =
          KinematicContext::of(gap, e.v[i], e.v[lead], p);
      const AccelEval ev = acceleration_with_branch(spec(i).model, ctx, p);
      accel[i] = ev.accel;
      const int br = ev.sigmoid_branch ? 1 : 0;
      if (config.log_branch_switches && e.branch[i] >= 0 &&
          e.branch[i] != br) {
        e.traj.events.push_back(
            {Event::Type::branch_switch, k, static_cast<int>(i)});
      }
      e.branch[i] = br;
    }
    if (collided) {
      e.traj.halted = true;
      break;
    }

    for (std::size_t i = 0; i < n; ++i) e.record(i, accel[i], gaps[i]);
    if (k == n_steps - 1) break;

    for (std::size_t i = 0; i < n; ++i) {
      if (!config.velocity_clamp && e.v[i] + accel[i] * config.dt < 0.0 &&
          e.v[i] >= 0.0) {
        e.traj.events.push_back(
            {Event::Type::negative_velocity, k, static_cast<int>(i)});
      }
      const Integrated out = advance(e.x[i], e.v[i], accel[i], config.dt,
                                     config.velocity_clamp,
                                     config.integrator);
      e.x[i] = out.x;
      e.v[i] = out.v;
      if (!std::isfinite(e.x[i]) || !std::isfinite(e.v[i])) {
        throw std::runtime_error("simulate_ring: non-finite state at step " +
                                 std::to_string(k));
      }
    }
    if (config.gap_policy) {
      for (std::size_t i = 0; i < n; ++i) {
        e.dc[i] = update_cautious_distance(e.dc[i], *config.gap_policy, e.rng);
      }
    }
  }
  return e.traj;
}

FlowMeasurement measure_flow_density(const Trajectory& traj,
                                     const RingConfig& ring, double window) {
  const std::size_t steps = traj.n_steps();
  if (steps == 0) throw std::invalid_argument("empty trajectory");
  const std::size_t w =
      std::min<std::size_t>(steps,
                            static_cast<std::size_t>(window / traj.dt) + 1);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& series : traj.states) {
    for (std::size_t k = steps - w; k < steps; ++k) {
      sum += series[k].velocity;
      ++count;
    }
  }
  const double v_mean = sum / static_cast<double>(count);
  const double rho = static_cast<double>(ring.n_vehicles) / ring.circumference;
  return {rho, rho * v_mean, v_mean};
}

SpacingVelocityLoop spacing_velocity_loop(const Trajectory& traj, int vehicle,
                                          double accel_threshold,
                                          double min_duration) {
  const auto& series = traj.states.at(static_cast<std::size_t>(vehicle));
  const auto& gaps = traj.gaps.at(static_cast<std::size_t>(vehicle));
  const std::size_t steps = series.size();

  std::vector<DrivePhase> phase(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double a = series[k].acceleration;
    phase[k] = std::fabs(a) <= accel_threshold
                   ? DrivePhase::coasting
                   : (a > 0.0 ? DrivePhase::accelerating
                              : DrivePhase::decelerating);
  }
  // absorb coasting runs shorter than min_duration into the preceding phase
  const std::size_t min_run =
      static_cast<std::size_t>(std::ceil(min_duration / traj.dt));
  std::size_t k = 0;
  while (k < steps) {
    if (phase[k] != DrivePhase::coasting) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end < steps && phase[end] == DrivePhase::coasting) ++end;
    if (end - k < min_run && k > 0) {
      for (std::size_t j = k; j < end; ++j) phase[j] = phase[k - 1];
    }
    k = end;
  }

  SpacingVelocityLoop loop;
  loop.points.reserve(steps);
  std::size_t coasting = 0;
  for (std::size_t j = 0; j < steps; ++j) {
    loop.points.push_back({gaps[j], series[j].velocity, phase[j]});
    if (phase[j] == DrivePhase::coasting) ++coasting;
  }
  loop.coasting_fraction =
      steps == 0 ? 0.0 : static_cast<double>(coasting) / steps;
  return loop;
}

}  // namespace sidm
