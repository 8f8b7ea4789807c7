#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sidm/model.hpp"

namespace sidm {

struct VehicleState {
  double position;      // front bumper, m (arc position on a ring)
  double velocity;      // m/s
  double acceleration;  // model output applied over the step, m/s^2
};

struct Event {
  enum class Type { collision, negative_velocity, branch_switch };
  Type type;
  int step;
  int vehicle;
};

/// Uniformly sampled per-vehicle time series. `states[i][k]` is vehicle i
/// at time k*dt; `gaps[i][k]` the net gap to its leader (NaN for an open
/// road leader). In unclamped ballistic mode the logged series satisfy
/// v[k+1] = v[k] + a[k] dt and the matching position update exactly.
struct Trajectory {
  double dt = 0.1;
  std::vector<std::vector<VehicleState>> states;
  std::vector<std::vector<double>> gaps;
  std::optional<std::vector<std::vector<double>>> d_c_log;
  std::vector<Event> events;
  bool halted = false;  // collision in halt mode truncated the run

  std::size_t n_vehicles() const { return states.size(); }
  std::size_t n_steps() const {
    return states.empty() ? 0 : states.front().size();
  }
};

struct ConstantSpeed {
  double v;
};
struct Stationary {};
struct PiecewiseSpeed {
  // (from_time, speed) knots; speed holds until the next knot.
  std::vector<std::pair<double, double>> knots;
};
struct SinusoidSpeed {
  double mean;
  double amplitude;
  double period;
};
struct RecordedSpeed {
  std::vector<double> t;
  std::vector<double> v;  // linearly interpolated, clamped at the ends
};

using LeaderProfile = std::variant<ConstantSpeed, Stationary, PiecewiseSpeed,
                                   SinusoidSpeed, RecordedSpeed>;

double leader_speed(const LeaderProfile& profile, double t);
void validate_profile(const LeaderProfile& profile);

enum class Integrator { ballistic, euler };

struct VehicleSpec {
  Model model = Model::sigmoid_idm;
  ModelParams params;
};

struct PlatoonConfig {
  std::vector<VehicleSpec> followers;     // front to back
  double vehicle_length = 5.0;
  std::vector<double> initial_gaps;       // follower i behind its leader
  std::vector<double> initial_velocities; // one per follower
  LeaderProfile leader = Stationary{};
  double dt = 0.1;
  double duration = 60.0;
  bool velocity_clamp = true;
  bool halt_on_collision = true;
  Integrator integrator = Integrator::ballistic;
  bool log_branch_switches = false;
  std::optional<RandomGapPolicy> gap_policy;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Leader (index 0) plus followers; deterministic given the seed.
Trajectory simulate_platoon(const PlatoonConfig& config);

struct RingConfig {
  double circumference = 600.0;
  int n_vehicles = 30;
  double vehicle_length = 5.0;
  enum class Init { homogeneous, jam } init = Init::homogeneous;
  std::vector<VehicleSpec> vehicles;      // size 1 (shared) or n_vehicles
  double dt = 0.1;
  double duration = 600.0;
  bool velocity_clamp = true;
  bool halt_on_collision = true;
  Integrator integrator = Integrator::ballistic;
  bool log_branch_switches = false;
  std::optional<RandomGapPolicy> gap_policy;
  std::uint64_t seed = 0;
  std::optional<double> init_velocity;    // homogeneous: defaults to the
                                          // steady speed for the spacing
  double jam_gap = -1.0;                  // jam init gap; < 0 means s0

  void validate() const;
};

/// Periodic topology: every vehicle follows the next one (modular).
/// Positions are logged unwrapped; wrap with circumference for plotting.
Trajectory simulate_ring(const RingConfig& config);

/// Ring estimator over the trailing `window` seconds: rho = n/L exactly,
/// v_bar the space-mean velocity, Q = rho * v_bar.
struct FlowMeasurement {
  double rho;
  double q;
  double v_mean;
};
FlowMeasurement measure_flow_density(const Trajectory& traj,
                                     const RingConfig& ring, double window);

enum class DrivePhase { accelerating, decelerating, coasting };

/// Phase-tagged (gap, v) loop for hysteresis inspection. Coasting is
/// |a| <= accel_threshold sustained for at least min_duration seconds;
/// shorter quiet runs are absorbed into the preceding episode.
struct SpacingVelocityLoop {
  struct Point {
    double gap;
    double v;
    DrivePhase phase;
  };
  std::vector<Point> points;
  double coasting_fraction;
};
SpacingVelocityLoop spacing_velocity_loop(const Trajectory& traj, int vehicle,
                                          double accel_threshold = 0.05,
                                          double min_duration = 1.0);

}  // namespace sidm
