#pragma once

#include "monoride/constraints.hpp"
#include "monoride/simulate.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace monoride {

/// Formats with 17 significant digits (round-trips a double exactly).
[[nodiscard]] std::string format_double(double v);

/// Trajectory CSV: header `t,x1..xn,u1..um`, one row per grid point, LF endings.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv_file(const std::string& path, const Trajectory& traj);

/// Parses the format written by write_trajectory_csv. The header decides n and m.
[[nodiscard]] Trajectory read_trajectory_csv(std::istream& in);
[[nodiscard]] Trajectory read_trajectory_csv_file(const std::string& path);

/// Engaged-constraint profile: `t,engaged,phase` with names joined by ';'.
void write_engaged_csv(std::ostream& out, const Trajectory& traj, const ConstraintSet& set,
                       const std::vector<std::vector<std::size_t>>& profile);

/// Column-oriented numeric table, as read from any headered CSV.
struct Table {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    [[nodiscard]] std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
    [[nodiscard]] const std::vector<double>* column(const std::string& name) const;
};

[[nodiscard]] Table read_table_csv(std::istream& in);

}  // namespace monoride
