#include "monoride/cli.hpp"

#include "monoride/bangride.hpp"
#include "monoride/chart.hpp"
#include "monoride/errors.hpp"
#include "monoride/optimality.hpp"
#include "monoride/ordering.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace monoride::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string vec(const Vector& v) {
    std::string s = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i));
    return s + "]";
}

void configure_logging(std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto logger = std::make_shared<spdlog::logger>("monoride", sink);
    logger->set_pattern("[%l] %v");
    auto level = spdlog::level::warn;
    bool unknown = false;
    if (const char* env = std::getenv("MONORIDE_LOG")) {
        const std::string s = env;
        if (s == "error") level = spdlog::level::err;
        else if (s == "warn") level = spdlog::level::warn;
        else if (s == "info") level = spdlog::level::info;
        else if (s == "debug") level = spdlog::level::debug;
        else unknown = !s.empty();
    }
    logger->set_level(level);
    spdlog::set_default_logger(logger);
    if (unknown) spdlog::warn("ignoring MONORIDE_LOG='{}' (expected error, warn, info or debug)", std::getenv("MONORIDE_LOG"));
}

std::vector<Panel> available_panels(const Table& table) {
    std::vector<Panel> out;
    for (auto& p : battery_panels(true)) {
        if (table.column(p.column) != nullptr) out.push_back(std::move(p));
    }
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    out << text;
}

void write_chart(const fs::path& path, const Table& table) {
    write_text(path, render_chart_svg(table, available_panels(table)));
}

void report_violation(std::ostream& out, const Trajectory& traj, const ConstraintSet& set) {
    const auto v = max_violation(traj, set);
    out << "max violation: " << num(v.worst) << " (" << set[v.index].name << " at t = " << num(v.time) << ")\n";
}

void report_phases(std::ostream& out, const Trajectory& traj, const ConstraintSet& set,
                   const std::vector<std::vector<std::size_t>>& profile) {
    out << "phases:\n";
    for (const auto& span : phase_spans(set, profile)) {
        out << "  " << span.phase << ": t = " << num(traj.times[span.first]) << " .. " << num(traj.times[span.last])
            << '\n';
    }
}

Box check_box(const ExperimentConfig& cfg, std::optional<double> u_lo, std::optional<double> u_hi) {
    Box box;
    for (std::size_t i = 0; i < cfg.check.state_lo.size(); ++i) {
        box.states.push_back({cfg.check.state_lo[i], cfg.check.state_hi[i]});
    }
    const double lo = u_lo.value_or(*cfg.check.u_lo);
    const double hi = u_hi.value_or(*cfg.check.u_hi);
    if (lo > hi) throw ConfigError("--u-lo exceeds --u-hi");
    box.inputs.push_back({lo, hi});
    return box;
}

void print_witnesses(std::ostream& out, const MonotonicityReport& r, const std::vector<std::string>& labels,
                     bool scalar, std::size_t limit) {
    for (std::size_t i = 0; i < std::min(limit, r.witnesses.size()); ++i) {
        const auto& w = r.witnesses[i];
        const std::string of = scalar ? "L" : "f[" + labels[w.row] + "]";
        const std::string wrt = w.wrt_input ? "u" + std::to_string(w.col + 1) : labels[w.col];
        out << "    witness: d" << of << "/d" << wrt << " = " << num(w.estimate) << " at x = " << vec(w.x)
            << ", u = " << vec(w.u) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::optional<double> current,
                 std::ostream& out) {
    const auto cfg = load_config(config_path);
    const auto ex = build_experiment(cfg);
    PiecewiseConstant control = PiecewiseConstant::constant(ex.policy.u_max);
    if (current) {
        control = PiecewiseConstant::constant(*current);
    } else if (cfg.input) {
        std::vector<Vector> values;
        for (double v : cfg.input->values) values.push_back(Vector::Constant(1, v));
        control = PiecewiseConstant(cfg.input->starts, std::move(values));
    }
    spdlog::info("integrating {} over [0, {}] with dt = {}", to_string(cfg.model.type), ex.t_f, ex.dt);
    const auto traj = integrate(ex.system, ex.x0, control, ex.t_f, ex.dt);

    fs::create_directories(out_dir);
    write_trajectory_csv_file((fs::path(out_dir) / "trajectory.csv").string(), traj);
    write_chart(fs::path(out_dir) / "chart.svg", trajectory_table(traj, ex.ecm));

    out << "J = " << num(cost(traj, ex.cost)) << '\n';
    out << "final state: " << vec(traj.states.back()) << '\n';
    report_violation(out, traj, ex.constraints);
    return 0;
}

int cmd_bangride(const std::string& config_path, const std::string& out_dir, std::ostream& out) {
    const auto cfg = load_config(config_path);
    const auto ex = build_experiment(cfg);
    spdlog::info("bang-and-ride on {} with u_max = {}", to_string(cfg.model.type), ex.policy.u_max);
    const auto traj = simulate_bang_ride(ex.system, ex.x0, ex.policy, ex.t_f, ex.dt);
    const auto profile = engaged_profile(traj, ex.constraints, cfg.tol_active);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_trajectory_csv_file((dir / "trajectory.csv").string(), traj);
    {
        std::ofstream eng(dir / "engaged.csv", std::ios::binary);
        if (!eng) throw FormatError("cannot write engaged.csv");
        write_engaged_csv(eng, traj, ex.constraints, profile);
    }
    write_chart(dir / "chart.svg", trajectory_table(traj, ex.ecm));
    save_config(cfg, (dir / "config.resolved.json").string());

    out << "J = " << num(cost(traj, ex.cost)) << '\n';
    out << "final state: " << vec(traj.states.back()) << '\n';
    report_violation(out, traj, ex.constraints);
    report_phases(out, traj, ex.constraints, profile);
    out << "wrote " << (dir / "trajectory.csv").string() << ", engaged.csv, chart.svg, config.resolved.json\n";
    return 0;
}

int cmd_check_monotone(const std::string& config_path, std::optional<double> u_lo, std::optional<double> u_hi,
                       std::optional<std::size_t> samples, std::ostream& out) {
    const auto cfg = load_config(config_path);
    const auto ex = build_experiment(cfg);
    const Box box = check_box(cfg, u_lo, u_hi);
    KamkeMullerOptions opts;
    opts.n_samples = samples.value_or(cfg.check.n_samples);
    opts.seed = cfg.seed;

    out << "model: " << to_string(cfg.model.type) << ", input box [" << num(box.inputs[0].lo) << ", "
        << num(box.inputs[0].hi) << "]\n";

    const auto h1 = check_kamke_muller(ex.system, box, opts);
    out << "H1 system monotone: " << to_string(h1.verdict) << " (" << h1.method << ", " << h1.samples_used
        << " samples)\n";
    print_witnesses(out, h1, ex.system.labels(), false, 3);

    const auto h2 = check_cost_monotone(ex.cost, box, opts);
    out << "H2 cost monotone (" << ex.cost.name << "): " << to_string(h2.verdict) << '\n';
    print_witnesses(out, h2, ex.system.labels(), true, 3);

    const auto exc = check_excitability(ex.system, box, opts);
    out << "H3 cost class: " << to_string(ex.cost.monotonicity_class) << "; excitable: "
        << (exc.excitable ? "yes" : "no") << " (" << exc.method << ")\n";
    for (const auto& [input, state] : exc.unreachable) {
        out << "    u" << input + 1 << " does not reach " << ex.system.labels()[state] << '\n';
    }

    SamplingOptions sopts;
    sopts.n_samples = opts.n_samples;
    sopts.seed = cfg.seed;
    const auto h4 = verify_nonincreasing_in_u(ex.constraints, box, sopts);
    const bool h4_ok = std::all_of(h4.begin(), h4.end(), [](const auto& c) { return c.passed; });
    out << "H4 constraints non-increasing in u: " << (h4_ok ? "yes" : "no") << '\n';
    for (const auto& c : h4) {
        out << "    " << c.name << ": " << (c.passed ? "ok" : "violated") << " (max dh/du " << num(c.max_estimate)
            << ")\n";
    }
    return 0;
}

int cmd_necessity(const std::string& config_path, const std::string& traj_path, std::optional<double> tol_engaged,
                  std::ostream& out) {
    const auto cfg = load_config(config_path);
    const auto ex = build_experiment(cfg);
    const auto traj = read_trajectory_csv_file(traj_path);
    if (traj.n_states() != ex.system.n_states() || traj.n_inputs() != ex.system.n_inputs()) {
        throw FormatError("trajectory dimensions do not match the configured model");
    }
    NecessityOptions opts;
    opts.tol_engaged = tol_engaged.value_or(cfg.tol_engaged);
    const auto verdict = necessity_check(ex.system, traj, ex.constraints, ex.cost, opts);
    out << "status: " << to_string(verdict.status) << '\n';
    if (verdict.interior_tail) {
        out << "interior tail from t0 = " << num(verdict.interior_tail->t0) << " (min residual "
            << num(verdict.interior_tail->min_residual) << ")\n";
    }
    if (verdict.improvement) {
        const auto& im = *verdict.improvement;
        out << "improving bump: +" << num(im.height) << " on [" << num(im.t_start) << ", " << num(im.t_end) << ")\n";
        out << "J = " << num(im.base_cost) << " -> " << num(im.perturbed_cost) << ", delta_J = "
            << format_double(im.delta_j) << '\n';
    }
    return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& out_dir, std::ostream& out) {
    const auto cfg = load_config(config_path);
    if (!cfg.oracle) throw ConfigError("config field 'oracle': required by the oracle subcommand");
    const auto ex = build_experiment(cfg);
    OracleOptions opts;
    opts.dt = ex.dt;
    opts.tol = cfg.oracle->tol;
    opts.threads = cfg.oracle->threads;
    opts.record_all = true;
    spdlog::info("enumerating {}^{} sequences", cfg.oracle->levels.size(), cfg.oracle->n_steps);
    const auto gap = oracle_gap(ex.system, ex.x0, ex.constraints, ex.cost, ex.t_f, cfg.oracle->n_steps,
                                cfg.oracle->levels, ex.policy, opts);

    fs::create_directories(out_dir);
    {
        std::ofstream csv(fs::path(out_dir) / "oracle.csv", std::ios::binary);
        if (!csv) throw FormatError("cannot write oracle.csv");
        write_oracle_csv(csv, gap.oracle, cfg.oracle->levels);
    }
    out << "J_bangride = " << format_double(gap.j_bangride) << '\n';
    out << "J_oracle = " << format_double(gap.j_oracle) << '\n';
    out << "gap = " << format_double(gap.gap) << " (max level spacing " << num(gap.max_level_spacing) << ")\n";
    out << "projected bang-ride: J = " << format_double(gap.projected_cost)
        << (gap.projected_admissible ? " (admissible)" : " (inadmissible)") << '\n';
    out << "evaluated " << gap.oracle.n_evaluated << " sequences, " << gap.oracle.n_admissible << " admissible\n";
    out << "best sequence:";
    for (double u : gap.oracle.best_sequence) out << ' ' << num(u);
    out << '\n';
    out << "H2 cost monotone (" << ex.cost.name << "): " << to_string(gap.cost_report.verdict) << '\n';
    if (gap.cost_report.verdict == Verdict::kNonMonotone) {
        out << "    warning: the cost is not monotone, so the gap is not bounded by the level spacing\n";
    }
    return 0;
}

int cmd_plot(const std::string& traj_path, const std::string& out_path, const std::string& config_path,
             std::ostream& out) {
    std::optional<EcmParams> ecm;
    if (!config_path.empty()) ecm = build_experiment(load_config(config_path)).ecm;
    Table table;
    if (ecm) {
        table = trajectory_table(read_trajectory_csv_file(traj_path), ecm);
    } else {
        std::ifstream in(traj_path, std::ios::binary);
        if (!in) throw FormatError("cannot open '" + traj_path + "'");
        table = read_table_csv(in);
    }
    write_chart(out_path, table);
    out << "wrote " << out_path << '\n';
    return 0;
}

}  // namespace

Table trajectory_table(const Trajectory& traj, const std::optional<EcmParams>& ecm) {
    Table t;
    t.names.push_back("t");
    t.columns.push_back(traj.times);
    for (std::size_t i = 0; i < traj.n_states(); ++i) {
        t.names.push_back("x" + std::to_string(i + 1));
        std::vector<double> c;
        for (const auto& x : traj.states) c.push_back(x(static_cast<Eigen::Index>(i)));
        t.columns.push_back(std::move(c));
    }
    for (std::size_t j = 0; j < traj.n_inputs(); ++j) {
        t.names.push_back("u" + std::to_string(j + 1));
        std::vector<double> c;
        for (const auto& u : traj.inputs) c.push_back(u(static_cast<Eigen::Index>(j)));
        t.columns.push_back(std::move(c));
    }
    if (ecm && traj.n_states() >= ecm->n_states() && traj.n_inputs() == 1) {
        const auto n = static_cast<Eigen::Index>(ecm->n_states());
        std::vector<double> v;
        for (std::size_t k = 0; k < traj.size(); ++k) {
            v.push_back(ecm_voltage(*ecm, traj.states[k].head(n), traj.inputs[k](0)));
        }
        t.names.push_back("v");
        t.columns.push_back(std::move(v));
    }
    return t;
}

std::vector<PhaseSpan> phase_spans(const ConstraintSet& set, const std::vector<std::vector<std::size_t>>& profile) {
    std::vector<PhaseSpan> spans;
    for (std::size_t k = 0; k < profile.size(); ++k) {
        auto name = phase_name(set, profile[k]);
        if (!spans.empty() && spans.back().phase == name) {
            spans.back().last = k;
        } else {
            spans.push_back({std::move(name), k, k});
        }
    }
    return spans;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    configure_logging(err);
    // The logger refers to `err`; detach it before the caller's stream can go away.
    struct DetachLogger {
        ~DetachLogger() { spdlog::set_default_logger(std::make_shared<spdlog::logger>("monoride")); }
    } detach;

    CLI::App app{"Monotone charging control: simulation, bang-and-ride synthesis and optimality checks", "monoride"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string traj_path;
    std::string out_path = "chart.svg";
    std::optional<double> current;
    std::optional<double> u_lo;
    std::optional<double> u_hi;
    std::optional<std::size_t> samples;
    std::optional<double> tol_engaged;

    auto* sim = app.add_subcommand("simulate", "Open-loop simulation with the configured input profile");
    sim->add_option("config", config_path, "Experiment config (JSON)")->required();
    sim->add_option("-o,--out", out_dir, "Output directory");
    sim->add_option("--current", current, "Constant input overriding the config profile");

    auto* ride = app.add_subcommand("bangride", "Closed-loop bang-and-ride charge");
    ride->add_option("config", config_path, "Experiment config (JSON)")->required();
    ride->add_option("-o,--out", out_dir, "Output directory");

    auto* mono = app.add_subcommand("check-monotone", "Report monotonicity, excitability and constraint hypotheses");
    mono->add_option("config", config_path, "Experiment config (JSON)")->required();
    mono->add_option("--u-lo", u_lo, "Lower input bound of the sampling box");
    mono->add_option("--u-hi", u_hi, "Upper input bound of the sampling box");
    mono->add_option("--samples", samples, "Number of sample points");

    auto* nec = app.add_subcommand("necessity", "Necessity-condition verdict on a trajectory CSV");
    nec->add_option("config", config_path, "Experiment config (JSON)")->required();
    nec->add_option("trajectory", traj_path, "Trajectory CSV")->required();
    nec->add_option("--tol-engaged", tol_engaged, "Engagement margin");

    auto* orc = app.add_subcommand("oracle", "Exhaustive small-instance search and bang-and-ride gap");
    orc->add_option("config", config_path, "Experiment config (JSON)")->required();
    orc->add_option("-o,--out", out_dir, "Output directory");

    auto* plot = app.add_subcommand("plot", "Render a trajectory CSV to an SVG chart");
    plot->add_option("trajectory", traj_path, "Trajectory CSV")->required();
    plot->add_option("-o,--out", out_path, "Output SVG path");
    plot->add_option("--config", config_path, "Config used to add the terminal-voltage panel");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, current, out);
        if (ride->parsed()) return cmd_bangride(config_path, out_dir, out);
        if (mono->parsed()) return cmd_check_monotone(config_path, u_lo, u_hi, samples, out);
        if (nec->parsed()) return cmd_necessity(config_path, traj_path, tol_engaged, out);
        if (orc->parsed()) return cmd_oracle(config_path, out_dir, out);
        if (plot->parsed()) return cmd_plot(traj_path, out_path, config_path, out);
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return static_cast<int>(ExitCode::kGeneric);
    }
    return static_cast<int>(ExitCode::kGeneric);
}

}  // namespace monoride::cli
