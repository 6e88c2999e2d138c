#pragma once

#include "monoride/trajectory_io.hpp"

#include <string>
#include <vector>

namespace monoride {

/// One line-chart panel plotting `column` against the table's time column.
struct Panel {
    std::string column;
    std::string title;
    std::string y_label;
};

struct ChartOptions {
    int width = 1000;
    int panel_height = 340;
    int columns = 2;
    std::string x_column = "t";
    std::string x_label = "Time [s]";
};

/// Self-contained SVG; byte-identical output for identical input.
[[nodiscard]] std::string render_chart_svg(const Table& table, const std::vector<Panel>& panels,
                                           const ChartOptions& options = {});

/// Reads a trajectory CSV (or any headered numeric CSV) and writes the chart.
void emit_chart(const std::string& csv_path, const std::vector<Panel>& panels, const std::string& out_path,
                const ChartOptions& options = {});

/// Charging current, state-of-charge, terminal voltage (column `v`) and first RC-pair voltage.
[[nodiscard]] std::vector<Panel> battery_panels(bool with_voltage);

/// Tick positions covering [lo, hi] at a 1-2-5 step.
[[nodiscard]] std::vector<double> nice_ticks(double lo, double hi, int target = 5);

}  // namespace monoride
