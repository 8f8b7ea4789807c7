#include "sidm/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sidm/metrics.hpp"

namespace sidm {

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  // %.17g round-trips; trim to the shortest representation that does
  for (int prec = 9; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::string>& header_comments) {
  std::ostringstream out;
  for (const auto& c : header_comments) out << "# " << c << "\n";
  const bool with_dc = traj.d_c_log.has_value();
  out << "time,vehicle_id,position,velocity,acceleration,gap";
  if (with_dc) out << ",d_c";
  out << "\n";
  const std::size_t steps = traj.n_steps();
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * traj.dt;
    for (std::size_t i = 0; i < traj.n_vehicles(); ++i) {
      const VehicleState& s = traj.states[i][k];
      out << format_double(t) << ',' << i << ',' << format_double(s.position)
          << ',' << format_double(s.velocity) << ','
          << format_double(s.acceleration) << ','
          << format_double(traj.gaps[i][k]);
      if (with_dc) out << ',' << format_double((*traj.d_c_log)[i][k]);
      out << "\n";
    }
  }
  write_text_atomic(path, out.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<VehicleSeries> read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw std::runtime_error("empty CSV: " + path);

  int c_time = -1, c_id = -1, c_x = -1, c_v = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "time") c_time = static_cast<int>(c);
    if (header[c] == "vehicle_id") c_id = static_cast<int>(c);
    if (header[c] == "position") c_x = static_cast<int>(c);
    if (header[c] == "velocity") c_v = static_cast<int>(c);
  }
  if (c_time < 0 || c_id < 0 || c_x < 0) {
    throw std::runtime_error(
        path + ": need at least time,vehicle_id,position columns");
  }

  std::map<int, VehicleSeries> by_id;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < header.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": short row");
    }
    try {
      const int id = std::stoi(cells[static_cast<std::size_t>(c_id)]);
      VehicleSeries& s = by_id[id];
      s.id = id;
      s.t.push_back(std::stod(cells[static_cast<std::size_t>(c_time)]));
      s.x.push_back(std::stod(cells[static_cast<std::size_t>(c_x)]));
      if (c_v >= 0 && !cells[static_cast<std::size_t>(c_v)].empty()) {
        s.v.push_back(std::stod(cells[static_cast<std::size_t>(c_v)]));
      }
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": unparsable number");
    }
  }

  std::vector<VehicleSeries> out;
  for (auto& [id, s] : by_id) {
    if (!s.v.empty() && s.v.size() != s.t.size()) {
      throw std::runtime_error(path + ": partial velocity column for vehicle " +
                               std::to_string(id));
    }
    if (s.v.empty() && s.t.size() >= 2) {
      s.v = velocity_from_positions(s.t, s.x);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace sidm
