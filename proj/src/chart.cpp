#include "monoride/chart.hpp"

#include "monoride/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace monoride {

namespace {

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string tick_label(double v) {
    if (std::abs(v) < 1e-12) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c; break;
        }
    }
    return out;
}

struct Range {
    double lo;
    double hi;
};

Range data_range(const std::vector<double>& v) {
    auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    Range r{*mn, *mx};
    if (!(r.hi > r.lo)) {
        const double pad = std::max(0.5, 0.5 * std::abs(r.lo));
        r.lo -= pad;
        r.hi += pad;
    }
    return r;
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
    if (!(hi > lo) || target < 1) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    const auto first = static_cast<long long>(std::ceil(lo / step - 1e-9));
    const auto last = static_cast<long long>(std::floor(hi / step + 1e-9));
    for (long long i = first; i <= last; ++i) ticks.push_back(static_cast<double>(i) * step);
    return ticks;
}

std::string render_chart_svg(const Table& table, const std::vector<Panel>& panels, const ChartOptions& options) {
    if (panels.empty()) throw ParameterError("panels", "chart needs at least one panel");
    if (table.rows() == 0) throw FormatError("cannot chart an empty trajectory");
    const auto* xs = table.column(options.x_column);
    if (xs == nullptr) throw FormatError("CSV has no '" + options.x_column + "' column");
    for (const auto& p : panels) {
        if (table.column(p.column) == nullptr) throw FormatError("CSV has no '" + p.column + "' column");
    }

    const int cols = std::max(1, std::min<int>(options.columns, static_cast<int>(panels.size())));
    const int rows = static_cast<int>((panels.size() + static_cast<std::size_t>(cols) - 1) / static_cast<std::size_t>(cols));
    const double cell_w = static_cast<double>(options.width) / cols;
    const double cell_h = options.panel_height;
    const double ml = 72, mr = 18, mt = 34, mb = 46;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << static_cast<int>(rows * cell_h) << "\" viewBox=\"0 0 " << options.width << ' '
        << static_cast<int>(rows * cell_h) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const Range xr = data_range(*xs);
    const char tag = 'a';
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& panel = panels[p];
        const auto& ys = *table.column(panel.column);
        const Range yr = data_range(ys);
        const double ox = static_cast<double>(p % static_cast<std::size_t>(cols)) * cell_w;
        const double oy = static_cast<double>(p / static_cast<std::size_t>(cols)) * cell_h;
        const double x0 = ox + ml, x1 = ox + cell_w - mr;
        const double y0 = oy + mt, y1 = oy + cell_h - mb;
        auto map_x = [&](double v) { return x0 + (v - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
        auto map_y = [&](double v) { return y1 - (v - yr.lo) / (yr.hi - yr.lo) * (y1 - y0); };

        svg << "  <g id=\"panel-" << panel.column << "\">\n";
        svg << "    <text x=\"" << px((x0 + x1) / 2) << "\" y=\"" << px(oy + 20)
            << "\" text-anchor=\"middle\" font-size=\"13\">(" << static_cast<char>(tag + static_cast<char>(p)) << ") "
            << xml_escape(panel.title) << "</text>\n";

        svg << "    <g stroke=\"#dddddd\" stroke-width=\"1\">\n";
        const auto xt = nice_ticks(xr.lo, xr.hi);
        const auto yt = nice_ticks(yr.lo, yr.hi);
        for (double t : xt) {
            svg << "      <line x1=\"" << px(map_x(t)) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(map_x(t))
                << "\" y2=\"" << px(y1) << "\"/>\n";
        }
        for (double t : yt) {
            svg << "      <line x1=\"" << px(x0) << "\" y1=\"" << px(map_y(t)) << "\" x2=\"" << px(x1) << "\" y2=\""
                << px(map_y(t)) << "\"/>\n";
        }
        svg << "    </g>\n";
        svg << "    <rect x=\"" << px(x0) << "\" y=\"" << px(y0) << "\" width=\"" << px(x1 - x0) << "\" height=\""
            << px(y1 - y0) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (double t : xt) {
            svg << "    <text x=\"" << px(map_x(t)) << "\" y=\"" << px(y1 + 15) << "\" text-anchor=\"middle\">"
                << tick_label(t) << "</text>\n";
        }
        for (double t : yt) {
            svg << "    <text x=\"" << px(x0 - 5) << "\" y=\"" << px(map_y(t) + 4) << "\" text-anchor=\"end\">"
                << tick_label(t) << "</text>\n";
        }
        svg << "    <text x=\"" << px((x0 + x1) / 2) << "\" y=\"" << px(y1 + 34) << "\" text-anchor=\"middle\">"
            << xml_escape(options.x_label) << "</text>\n";
        svg << "    <text transform=\"translate(" << px(ox + 16) << ',' << px((y0 + y1) / 2)
            << ") rotate(-90)\" text-anchor=\"middle\">" << xml_escape(panel.y_label) << "</text>\n";

        svg << "    <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < ys.size(); ++k) {
            if (k > 0) svg << ' ';
            svg << px(map_x((*xs)[k])) << ',' << px(map_y(ys[k]));
        }
        svg << "\"/>\n";
        svg << "  </g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_chart(const std::string& csv_path, const std::vector<Panel>& panels, const std::string& out_path,
                const ChartOptions& options) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + csv_path + "'");
    const auto svg = render_chart_svg(read_table_csv(in), panels, options);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + out_path + "'");
    out << svg;
}

std::vector<Panel> battery_panels(bool with_voltage) {
    std::vector<Panel> p{{"u1", "Charging current", "Current [A]"}, {"x1", "State-of-charge", "SOC [-]"}};
    if (with_voltage) p.push_back({"v", "Voltage", "Voltage [V]"});
    p.push_back({"x2", "RC pair voltage", "Voltage [V]"});
    return p;
}

}  // namespace monoride
