#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sidm/simulation.hpp"

namespace sidm {

/// Writes `time,vehicle_id,position,velocity,acceleration,gap[,d_c]`;
/// the d_c column is present when the run used a gap policy. Header
/// comment lines ("# key=value") carry run metadata such as the seed.
/// All writes are atomic (temp file + rename).
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::string>& header_comments = {});

/// One vehicle's series as read back from a trajectory CSV.
struct VehicleSeries {
  int id;
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> v;  // derived by smoothed differencing when absent
};

/// Accepts the exported schema or the minimal calibration input
/// `time,vehicle_id,position[,velocity]`; extra columns are ignored and
/// `#` lines skipped. Vehicles come back sorted by id.
std::vector<VehicleSeries> read_trajectory_csv(const std::string& path);

void write_text_atomic(const std::string& path, const std::string& content);

/// Fixed shortest-roundtrip formatting so identical runs produce
/// identical bytes.
std::string format_double(double v);

}  // namespace sidm
