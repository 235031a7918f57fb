#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "csdnls/app/config.hpp"

namespace csdnls::app {

// Plain-text trajectory table:
//   # csdnls-trajectory 1
//   # method <name>
//   # config <resolved config as one-line JSON>
//   # columns t n re im
//   <t> <n> <re> <im>
// Numbers use the shortest representation that parses back to the same double.

struct TrajectoryFile {
    Json config;
    std::string method;
    std::vector<double> times;
    std::vector<HardyStated> states;
};

std::string format_double(double x);
double parse_double(const std::string& token);

void write_trajectory(std::ostream& os, const TrajectoryRecord<double>& traj, const Json& config);
void write_trajectory(const std::filesystem::path& path, const TrajectoryRecord<double>& traj, const Json& config);

TrajectoryFile read_trajectory(std::istream& is);
TrajectoryFile read_trajectory(const std::filesystem::path& path);

}  // namespace csdnls::app
