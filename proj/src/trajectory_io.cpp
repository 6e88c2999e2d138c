#include "monoride/trajectory_io.hpp"

#include "monoride/bangride.hpp"
#include "monoride/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace monoride {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    traj.validate();
    out << 't';
    for (std::size_t i = 0; i < traj.n_states(); ++i) out << ",x" << (i + 1);
    for (std::size_t i = 0; i < traj.n_inputs(); ++i) out << ",u" << (i + 1);
    out << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << format_double(traj.times[k]);
        for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) out << ',' << format_double(traj.states[k](i));
        for (Eigen::Index i = 0; i < traj.inputs[k].size(); ++i) out << ',' << format_double(traj.inputs[k](i));
        out << '\n';
    }
}

void write_trajectory_csv_file(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + path + "'");
    write_trajectory_csv(out, traj);
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_cell(const std::string& cell, std::size_t line) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw FormatError("line " + std::to_string(line) + ": cannot parse number '" + cell + "'");
    }
    return v;
}

}  // namespace

Table read_table_csv(std::istream& in) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line);
        if (t.names.empty()) {
            t.names = std::move(cells);
            t.columns.resize(t.names.size());
            continue;
        }
        if (cells.size() != t.names.size()) {
            throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(t.names.size()) +
                              " columns, found " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) t.columns[c].push_back(parse_cell(cells[c], line_no));
    }
    if (t.names.empty()) throw FormatError("CSV has no header");
    return t;
}

const std::vector<double>* Table::column(const std::string& name) const {
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c] == name) return &columns[c];
    }
    return nullptr;
}

Trajectory read_trajectory_csv(std::istream& in) {
    const Table table = read_table_csv(in);
    if (table.names.empty() || table.names.front() != "t") throw FormatError("trajectory CSV must start with column 't'");
    std::size_t n = 0, m = 0;
    for (std::size_t c = 1; c < table.names.size(); ++c) {
        const auto& name = table.names[c];
        if (m == 0 && name == "x" + std::to_string(n + 1)) {
            ++n;
        } else if (name == "u" + std::to_string(m + 1)) {
            ++m;
        } else {
            throw FormatError("unexpected trajectory column '" + name + "'");
        }
    }
    if (n == 0 || m == 0) throw FormatError("trajectory CSV needs at least one state and one input column");
    if (table.rows() == 0) throw FormatError("trajectory CSV has no rows");
    Trajectory traj;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        traj.times.push_back(table.columns[0][r]);
        Vector x(static_cast<Eigen::Index>(n)), u(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) = table.columns[1 + i][r];
        for (std::size_t i = 0; i < m; ++i) u(static_cast<Eigen::Index>(i)) = table.columns[1 + n + i][r];
        traj.states.push_back(std::move(x));
        traj.inputs.push_back(std::move(u));
    }
    traj.validate();
    return traj;
}

Trajectory read_trajectory_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    return read_trajectory_csv(in);
}

void write_engaged_csv(std::ostream& out, const Trajectory& traj, const ConstraintSet& set,
                       const std::vector<std::vector<std::size_t>>& profile) {
    if (profile.size() != traj.size()) throw DimensionError("engaged profile does not match the trajectory");
    out << "t,engaged,phase\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << format_double(traj.times[k]) << ',';
        for (std::size_t i = 0; i < profile[k].size(); ++i) {
            if (i > 0) out << ';';
            out << set[profile[k][i]].name;
        }
        out << ',' << phase_name(set, profile[k]) << '\n';
    }
}

}  // namespace monoride
