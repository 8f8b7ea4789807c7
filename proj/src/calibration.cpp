#include "sidm/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sidm/metrics.hpp"
#include "sidm/rng.hpp"

namespace sidm {

void CalibrationProblem::validate() const {
  const std::size_t n = t.size();
  if (n < 2 || leader_x.size() != n || leader_v.size() != n ||
      follower_x.size() != n || follower_v.size() != n) {
    throw std::invalid_argument("CalibrationProblem: inconsistent series");
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (std::fabs((t[k] - t[k - 1]) - dt) > 1e-9) {
      throw std::invalid_argument(
          "CalibrationProblem: leader series must be uniform in dt");
    }
  }
  if (bounds.empty()) {
    throw std::invalid_argument("CalibrationProblem: empty parameter box");
  }
  for (const auto& bp : bounds) {
    if (!(bp.lo < bp.hi) && bp.lo != bp.hi) {
      throw std::invalid_argument("CalibrationProblem: bad bound for " +
                                  bp.name);
    }
  }
  if ((t.back() - t.front()) < 10.0) {
    throw std::invalid_argument(
        "CalibrationProblem: need at least 10 s of data");
  }
}

std::vector<double> CalibrationProblem::observed_gaps() const {
  std::vector<double> gaps(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    gaps[k] = leader_x[k] - vehicle_length - follower_x[k];
  }
  return gaps;
}

Trajectory simulate_follower(const CalibrationProblem& problem,
                             const ModelParams& params) {
  PlatoonConfig cfg;
  cfg.followers = {{problem.model, params}};
  cfg.vehicle_length = problem.vehicle_length;
  const double gap0 =
      problem.leader_x.front() - problem.vehicle_length -
      problem.follower_x.front();
  cfg.initial_gaps = {gap0};
  cfg.initial_velocities = {problem.follower_v.front()};
  std::vector<double> rel_t(problem.t.size());
  for (std::size_t k = 0; k < problem.t.size(); ++k) {
    rel_t[k] = problem.t[k] - problem.t.front();
  }
  cfg.leader = RecordedSpeed{std::move(rel_t), problem.leader_v};
  cfg.dt = problem.dt;
  cfg.duration = problem.t.back() - problem.t.front();
  cfg.velocity_clamp = true;
  cfg.halt_on_collision = true;
  return simulate_platoon(cfg);
}

double calibration_fitness(const CalibrationProblem& problem,
                           const ModelParams& params) {
  Trajectory traj;
  try {
    traj = simulate_follower(problem, params);
  } catch (const std::exception&) {
    return 4.0;  // non-finite blowup: worse than any collision
  }
  const std::vector<double> obs = problem.observed_gaps();
  if (traj.halted || traj.n_steps() < obs.size()) {
    // collision part-way: dominate every collision-free candidate
    const double done = static_cast<double>(traj.n_steps()) /
                        static_cast<double>(obs.size());
    return 2.0 + (1.0 - done);
  }
  return theils_u(obs, traj.gaps[1]);
}

namespace {

struct Individual {
  std::vector<double> genes;
  double fitness;
};

}  // namespace

CalibrationResult calibrate_ga(const CalibrationProblem& problem, Exec exec) {
  problem.validate();
  const auto& box = problem.bounds;
  const std::size_t n_genes = box.size();
  const GaSettings& ga = problem.ga;

  std::mt19937_64 rng(mix_seed(problem.seed, 0xCA11));

  auto decode = [&](const std::vector<double>& genes) {
    ModelParams p = problem.fixed;
    for (std::size_t g = 0; g < n_genes; ++g) {
      set_param(p, box[g].name, genes[g]);
    }
    return p;
  };

  std::vector<Individual> pop(static_cast<std::size_t>(ga.population));
  for (auto& ind : pop) {
    ind.genes.resize(n_genes);
    for (std::size_t g = 0; g < n_genes; ++g) {
      ind.genes[g] = uniform(rng, box[g].lo, box[g].hi);
    }
  }

  auto evaluate = [&](std::vector<Individual>& v) {
    parallel_for(v.size(), exec, [&](std::size_t i) {
      v[i].fitness = calibration_fitness(problem, decode(v[i].genes));
    });
  };
  evaluate(pop);
  auto by_fitness = [](const Individual& a, const Individual& b) {
    return a.fitness < b.fitness;
  };
  std::sort(pop.begin(), pop.end(), by_fitness);
  if (pop.front().fitness >= 4.0) {
    throw std::runtime_error("calibrate_ga: all-infeasible population");
  }

  CalibrationResult out;
  out.history.push_back(pop.front().fitness);

  auto tournament_pick = [&]() -> const Individual& {
    std::size_t best = static_cast<std::size_t>(
        uniform01(rng) * static_cast<double>(pop.size()));
    best = std::min(best, pop.size() - 1);
    for (int k = 1; k < ga.tournament; ++k) {
      std::size_t c = static_cast<std::size_t>(
          uniform01(rng) * static_cast<double>(pop.size()));
      c = std::min(c, pop.size() - 1);
      if (pop[c].fitness < pop[best].fitness) best = c;
    }
    return pop[best];
  };

  int gen = 0;
  for (; gen < ga.generations; ++gen) {
    if (ga.target_fitness >= 0.0 && pop.front().fitness <= ga.target_fitness) {
      break;
    }
    std::vector<Individual> next;
    next.reserve(pop.size());
    for (int e = 0; e < ga.elitism && e < static_cast<int>(pop.size()); ++e) {
      next.push_back(pop[static_cast<std::size_t>(e)]);
    }
    while (next.size() < pop.size()) {
      const Individual& p1 = tournament_pick();
      const Individual& p2 = tournament_pick();
      Individual child;
      child.genes.resize(n_genes);
      for (std::size_t g = 0; g < n_genes; ++g) {
        double v;
        if (uniform01(rng) < ga.crossover_rate) {
          // BLX-alpha blend
          const double lo = std::min(p1.genes[g], p2.genes[g]);
          const double hi = std::max(p1.genes[g], p2.genes[g]);
          const double spread = (hi - lo) * ga.blend_alpha;
          v = uniform(rng, lo - spread, hi + spread);
        } else {
          v = uniform01(rng) < 0.5 ? p1.genes[g] : p2.genes[g];
        }
        if (uniform01(rng) < ga.mutation_rate) {
          v += normal01(rng) * ga.mutation_sigma * (box[g].hi - box[g].lo);
        }
        child.genes[g] = std::clamp(v, box[g].lo, box[g].hi);
      }
      next.push_back(std::move(child));
    }
    // elites keep their fitness; only offspring are re-evaluated
    std::vector<Individual*> fresh;
    for (std::size_t i = static_cast<std::size_t>(ga.elitism); i < next.size();
         ++i) {
      fresh.push_back(&next[i]);
    }
    parallel_for(fresh.size(), exec, [&](std::size_t i) {
      fresh[i]->fitness =
          calibration_fitness(problem, decode(fresh[i]->genes));
    });
    pop = std::move(next);
    std::sort(pop.begin(), pop.end(), by_fitness);
    out.history.push_back(pop.front().fitness);
  }

  out.best = decode(pop.front().genes);
  out.best_u = pop.front().fitness;
  out.generations_run = gen;
  return out;
}

LeaderSeries synthetic_stop_and_go_leader(double duration, double dt,
                                          double v_high, double v_low) {
  // Three slow-down cycles with smoothed ramps.
  const std::vector<std::pair<double, double>> knots = {
      {0.00, v_high}, {0.18, v_low},  {0.30, v_high}, {0.48, v_low},
      {0.60, v_high}, {0.78, v_low},  {0.90, v_high}, {1.00, v_high}};
  LeaderSeries s;
  const int n = static_cast<int>(std::llround(duration / dt)) + 1;
  s.t.resize(n);
  s.v.resize(n);
  for (int k = 0; k < n; ++k) {
    const double t = k * dt;
    const double u = t / duration;
    double v = knots.back().second;
    for (std::size_t i = 1; i < knots.size(); ++i) {
      if (u <= knots[i].first) {
        const double w =
            (u - knots[i - 1].first) / (knots[i].first - knots[i - 1].first);
        const double smooth = 0.5 - 0.5 * std::cos(3.141592653589793 * w);
        v = knots[i - 1].second +
            smooth * (knots[i].second - knots[i - 1].second);
        break;
      }
    }
    s.t[k] = t;
    s.v[k] = v;
  }
  s.x.resize(n);
  s.x[0] = 0.0;
  for (int k = 1; k < n; ++k) {
    s.x[k] = s.x[k - 1] + 0.5 * (s.v[k - 1] + s.v[k]) * dt;
  }
  return s;
}

}  // namespace sidm
