#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sidm/simulation.hpp"

namespace sidm {

/// Theil's inequality coefficient RMSE/(RMS(obs)+RMS(sim)), in [0,1].
/// Throws std::domain_error when both series are identically zero.
double theils_u(std::span<const double> observed,
                std::span<const double> simulated);

/// Root mean squared difference; series must have equal nonzero length.
double rmse(std::span<const double> observed,
            std::span<const double> simulated);

/// Product-moment correlation; throws on zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Central-difference jerk of the logged acceleration (one-sided at the
/// ends), m/s^3.
std::vector<double> jerk_series(const Trajectory& traj, int vehicle);

/// 4x4 regression coefficients of the exponential-of-polynomial fuel
/// model; `k_neg` (used for a < 0) is optional.
struct FuelCoefficients {
  std::array<std::array<double, 4>, 4> k_pos{};
  std::optional<std::array<std::array<double, 4>, 4>> k_neg;
};

FuelCoefficients load_fuel_coefficients(const std::string& path);

/// Per-step MOE = exp(sum k_ij v^i a^j) and the dt-weighted total.
struct FuelResult {
  std::vector<double> moe;
  double total;
};
FuelResult vt_micro_fuel(const Trajectory& traj, int vehicle,
                         const FuelCoefficients& coeffs);

/// Velocity from positions by differencing followed by a moving-average
/// smoother of the given window (seconds).
std::vector<double> velocity_from_positions(std::span<const double> t,
                                            std::span<const double> x,
                                            double window = 0.5);

}  // namespace sidm
