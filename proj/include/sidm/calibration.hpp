#pragma once

#include <cstdint>
#include <vector>

#include "sidm/equilibrium.hpp"
#include "sidm/model.hpp"
#include "sidm/parallel.hpp"
#include "sidm/simulation.hpp"

namespace sidm {

struct GaSettings {
  int population = 100;
  int generations = 500;
  double crossover_rate = 0.9;
  double blend_alpha = 0.5;        // BLX-alpha crossover
  double mutation_rate = 0.1;      // per gene
  double mutation_sigma = 0.05;    // fraction of the parameter range
  int elitism = 2;
  int tournament = 3;
  double target_fitness = -1.0;    // stop early when best <= target (>= 0)
};

/// Leader/follower observations on a uniform grid plus everything the GA
/// needs. The spacing series is the sole calibration objective.
struct CalibrationProblem {
  std::vector<double> t;          // shared uniform time grid
  std::vector<double> leader_x;
  std::vector<double> leader_v;
  std::vector<double> follower_x;
  std::vector<double> follower_v;
  double vehicle_length = 5.0;
  Model model = Model::sigmoid_idm;
  ParamBox bounds;                 // free parameters (genome order)
  ModelParams fixed;               // values for everything not in bounds
  GaSettings ga;
  std::uint64_t seed = 1;
  double dt = 0.1;

  void validate() const;
  std::vector<double> observed_gaps() const;
};

/// Follower re-simulated behind the recorded leader from the observed
/// initial gap and velocity; vehicle 1 of the returned trajectory.
Trajectory simulate_follower(const CalibrationProblem& problem,
                             const ModelParams& params);

/// Theil's U of the spacing series; collisions are penalized (value > 1)
/// rather than thrown.
double calibration_fitness(const CalibrationProblem& problem,
                           const ModelParams& params);

struct CalibrationResult {
  ModelParams best;
  double best_u;
  std::vector<double> history;  // best fitness per generation
  int generations_run;
};

/// Real-coded GA: tournament selection, BLX-alpha crossover, per-gene
/// Gaussian mutation, elitism. Evolution draws from a single serial
/// stream; fitness evaluations are pure and run under `exec`, so results
/// are identical for any thread count.
CalibrationResult calibrate_ga(const CalibrationProblem& problem,
                               Exec exec = Exec::parallel);

/// Synthetic stop-and-go leader fixture on a dt grid (smoothed piecewise
/// speed schedule integrated to positions).
struct LeaderSeries {
  std::vector<double> t, x, v;
};
LeaderSeries synthetic_stop_and_go_leader(double duration, double dt,
                                          double v_high = 10.0,
                                          double v_low = 1.0);

}  // namespace sidm
