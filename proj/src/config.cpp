#include "monoride/config.hpp"

#include "monoride/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace monoride {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config field '" + path + "': " + what);
}

/// Typed access to one JSON object, remembering its path for error messages and
/// rejecting keys nobody asked about.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
    }

    [[nodiscard]] std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    [[nodiscard]] bool has(const std::string& key) const {
        seen_.insert(key);
        return j_.contains(key);
    }
    [[nodiscard]] const json& raw(const std::string& key) const {
        seen_.insert(key);
        if (!j_.contains(key)) fail(at(key), "required");
        return j_.at(key);
    }
    [[nodiscard]] Node child(const std::string& key) const { return Node(raw(key), at(key)); }

    [[nodiscard]] double number(const std::string& key) const { return as_number(raw(key), at(key)); }
    [[nodiscard]] double number(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }
    [[nodiscard]] std::optional<double> maybe_number(const std::string& key) const {
        if (!has(key) || raw(key).is_null()) return std::nullopt;
        return number(key);
    }
    [[nodiscard]] std::uint64_t count(const std::string& key) const {
        const auto& v = raw(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            fail(at(key), "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }
    [[nodiscard]] std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? count(key) : fallback;
    }
    [[nodiscard]] int integer(const std::string& key) const {
        const auto& v = raw(key);
        if (!v.is_number_integer()) fail(at(key), "expected an integer");
        return v.get<int>();
    }
    [[nodiscard]] std::string text(const std::string& key) const {
        const auto& v = raw(key);
        if (!v.is_string()) fail(at(key), "expected a string");
        return v.get<std::string>();
    }
    [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }
    [[nodiscard]] std::vector<double> numbers(const std::string& key) const {
        const auto& v = raw(key);
        if (!v.is_array()) fail(at(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], at(key) + "[" + std::to_string(i) + "]"));
        return out;
    }

    /// Call once every expected key has been read.
    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.contains(item.key())) fail(at(item.key()), "unknown key");
        }
    }

private:
    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) fail(path, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(path, "must be finite");
        return d;
    }

    const json& j_;
    std::string path_;
    mutable std::set<std::string> seen_;
};

template <class Enum, std::size_t N>
Enum parse_enum(const std::string& value, const std::array<std::pair<const char*, Enum>, N>& names,
                const std::string& path) {
    for (const auto& [name, e] : names) {
        if (value == name) return e;
    }
    std::string allowed;
    for (const auto& [name, e] : names) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    fail(path, "unknown value '" + value + "' (expected one of " + allowed + ")");
}

template <class Enum, std::size_t N>
const char* enum_name(Enum e, const std::array<std::pair<const char*, Enum>, N>& names) {
    for (const auto& [name, v] : names) {
        if (v == e) return name;
    }
    return "?";
}

constexpr std::array<std::pair<const char*, ModelType>, 4> kModelNames{{
    {"ecm", ModelType::kEcm},
    {"pade_spm", ModelType::kPadeSpm},
    {"fd_spm", ModelType::kFdSpm},
    {"thermal_ecm", ModelType::kThermalEcm},
}};
constexpr std::array<std::pair<const char*, ConstraintType>, 5> kConstraintNames{{
    {"state_upper", ConstraintType::kStateUpper},
    {"input_upper", ConstraintType::kInputUpper},
    {"voltage", ConstraintType::kVoltage},
    {"temperature", ConstraintType::kTemperature},
    {"plating", ConstraintType::kPlating},
}};
constexpr std::array<std::pair<const char*, CostType>, 4> kCostNames{{
    {"soc_rate", CostType::kSocRate},
    {"soc_integral", CostType::kSocIntegral},
    {"state_component", CostType::kStateComponent},
    {"temperature_penalized", CostType::kTemperaturePenalized},
}};
constexpr std::array<std::pair<const char*, CurrentUnits>, 2> kUnitNames{{
    {"amps", CurrentUnits::kAmps},
    {"c_rate", CurrentUnits::kCRate},
}};

bool ecm_family(ModelType t) { return t == ModelType::kEcm || t == ModelType::kThermalEcm; }
bool spm_family(ModelType t) { return t == ModelType::kPadeSpm || t == ModelType::kFdSpm; }

std::size_t model_states(const ModelConfig& m) {
    switch (m.type) {
        case ModelType::kEcm: return m.ecm.n_states();
        case ModelType::kThermalEcm: return m.ecm.n_states() + 1;
        case ModelType::kPadeSpm: return 3;
        case ModelType::kFdSpm: return m.fd.n_interior;
    }
    return 0;
}

EcmParams default_ecm() {
    EcmParams p;
    p.capacity = 3300.0;
    p.series_resistance = 0.05;
    p.rc_pairs = {{0.02, 1000.0}};
    return p;
}

ThermalParams default_thermal() { return {0.07, 1000.0, 1.0}; }

// ---------------------------------------------------------------------------
// Parsing

EcmParams parse_ecm(const Node& n) {
    EcmParams p = default_ecm();
    p.capacity = n.number("capacity", p.capacity);
    p.series_resistance = n.number("series_resistance", p.series_resistance);
    if (n.has("rc_pairs")) {
        const auto& arr = n.raw("rc_pairs");
        if (!arr.is_array()) fail(n.at("rc_pairs"), "expected an array");
        p.rc_pairs.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Node rc(arr[i], n.at("rc_pairs") + "[" + std::to_string(i) + "]");
            p.rc_pairs.push_back({rc.number("resistance"), rc.number("capacitance")});
            rc.finish();
        }
    }
    if (n.has("ocv")) {
        Node o = n.child("ocv");
        if (o.has("soc") || o.has("volts")) {
            auto soc = o.numbers("soc");
            auto volts = o.numbers("volts");
            try {
                p.ocv = OpenCircuitVoltage::table(std::move(soc), std::move(volts));
            } catch (const Error& e) {
                fail(n.at("ocv"), e.what());
            }
        } else {
            p.ocv = OpenCircuitVoltage::affine(o.number("offset", 3.0), o.number("slope", 1.2));
        }
        o.finish();
    }
    n.finish();
    return p;
}

ThermalParams parse_thermal(const Node& n) {
    ThermalParams p = default_thermal();
    p.mass = n.number("mass", p.mass);
    p.heat_capacity = n.number("heat_capacity", p.heat_capacity);
    p.thermal_resistance = n.number("thermal_resistance", p.thermal_resistance);
    n.finish();
    return p;
}

PadeSpmParams parse_pade(const Node& n) {
    PadeSpmParams p;
    p.a1 = n.number("a1");
    p.a2 = n.number("a2");
    p.b1 = n.number("b1");
    p.b2 = n.number("b2");
    p.b3 = n.number("b3");
    p.c1 = n.number("c1");
    p.c2 = n.number("c2");
    p.c3 = n.number("c3");
    n.finish();
    return p;
}

FdSpmParams parse_fd(const Node& n) {
    FdSpmParams p;
    p.diffusivity = n.number("diffusivity");
    p.particle_radius = n.number("particle_radius");
    p.n_interior = n.count("n_interior");
    p.faraday = n.number("faraday", p.faraday);
    p.surface_area = n.number("surface_area");
    p.collector_area = n.number("collector_area");
    p.thickness = n.number("thickness");
    p.electrode_sign = n.integer("electrode_sign");
    n.finish();
    return p;
}

ModelConfig parse_model(const Node& n) {
    ModelConfig m;
    m.type = parse_enum(n.text("type"), kModelNames, n.at("type"));
    m.ecm = default_ecm();
    m.thermal = default_thermal();
    auto validate = [&](const std::string& block, auto&& fn) {
        try {
            fn();
        } catch (const ParameterError& e) {
            fail(n.at(block) + "." + e.field(), e.what());
        }
    };
    switch (m.type) {
        case ModelType::kEcm:
            if (n.has("ecm")) m.ecm = parse_ecm(n.child("ecm"));
            validate("ecm", [&] { m.ecm.validate(); });
            break;
        case ModelType::kThermalEcm:
            if (n.has("ecm")) m.ecm = parse_ecm(n.child("ecm"));
            if (n.has("thermal")) m.thermal = parse_thermal(n.child("thermal"));
            validate("ecm", [&] { m.ecm.validate(); });
            validate("thermal", [&] { m.thermal.validate(); });
            break;
        case ModelType::kPadeSpm:
            m.pade = parse_pade(n.child("pade"));
            validate("pade", [&] { m.pade.validate(); });
            break;
        case ModelType::kFdSpm:
            m.fd = parse_fd(n.child("fd"));
            validate("fd", [&] { m.fd.validate(); });
            break;
    }
    n.finish();
    return m;
}

std::string default_constraint_name(const ConstraintConfig& c) {
    switch (c.type) {
        case ConstraintType::kStateUpper: return "x" + std::to_string(c.state) + "_upper";
        case ConstraintType::kInputUpper: return "input_bound";
        case ConstraintType::kVoltage: return "voltage";
        case ConstraintType::kTemperature: return "temperature";
        case ConstraintType::kPlating: return "plating";
    }
    return "constraint";
}

ConstraintConfig parse_constraint(const Node& n, const ModelConfig& model, const std::string& base_dir) {
    ConstraintConfig c;
    c.type = parse_enum(n.text("type"), kConstraintNames, n.at("type"));
    const std::size_t n_states = model_states(model);
    switch (c.type) {
        case ConstraintType::kStateUpper: {
            const auto s = n.count("state");
            if (s < 1 || s > n_states) {
                fail(n.at("state"), "state index " + std::to_string(s) + " outside 1.." + std::to_string(n_states));
            }
            c.state = static_cast<std::size_t>(s);
            c.bound = n.number("bound");
            break;
        }
        case ConstraintType::kInputUpper:
            c.bound = n.number("bound");
            c.units = parse_enum(n.text("units", "amps"), kUnitNames, n.at("units"));
            if (c.units == CurrentUnits::kCRate && !ecm_family(model.type)) {
                fail(n.at("units"), "c_rate needs an ECM-family model for the capacity");
            }
            break;
        case ConstraintType::kVoltage:
            if (!ecm_family(model.type)) fail(n.at("type"), "voltage constraint needs model ecm or thermal_ecm");
            c.bound = n.number("bound");
            break;
        case ConstraintType::kTemperature:
            if (model.type != ModelType::kThermalEcm) fail(n.at("type"), "temperature constraint needs model thermal_ecm");
            c.bound = n.number("bound");
            break;
        case ConstraintType::kPlating:
            if (!spm_family(model.type)) fail(n.at("type"), "plating constraint needs model pade_spm or fd_spm");
            if (n.has("table")) {
                std::filesystem::path p(n.text("table"));
                if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
                c.table = p.lexically_normal().string();
                try {
                    const auto t = PlatingTable::from_csv_file(c.table);
                    c.concentration = t.concentration();
                    c.max_current = t.max_current();
                } catch (const Error& e) {
                    fail(n.at("table"), e.what());
                }
            } else {
                c.concentration = n.numbers("concentration");
                c.max_current = n.numbers("max_current");
                try {
                    (void)PlatingTable(c.concentration, c.max_current);
                } catch (const Error& e) {
                    fail(n.at("concentration"), e.what());
                }
            }
            break;
    }
    c.name = n.text("name", default_constraint_name(c));
    if (c.name.empty()) fail(n.at("name"), "must not be empty");
    c.tol_active = n.maybe_number("tol_active");
    c.tol_engaged = n.maybe_number("tol_engaged");
    if (c.tol_active && !(*c.tol_active > 0.0)) fail(n.at("tol_active"), "must be > 0");
    if (c.tol_engaged && !(*c.tol_engaged > 0.0)) fail(n.at("tol_engaged"), "must be > 0");
    n.finish();
    return c;
}

CostConfig parse_cost(const Node& n, const ModelConfig& model) {
    CostConfig c;
    c.type = parse_enum(n.text("type"), kCostNames, n.at("type"));
    if (c.type == CostType::kSocRate && !ecm_family(model.type)) {
        fail(n.at("type"), "soc_rate needs an ECM-family model for the capacity");
    }
    if (c.type == CostType::kTemperaturePenalized && model.type != ModelType::kThermalEcm) {
        fail(n.at("type"), "temperature_penalized needs model thermal_ecm");
    }
    if (c.type == CostType::kStateComponent) {
        const auto s = n.count("state");
        if (s < 1 || s > model_states(model)) fail(n.at("state"), "state index out of range");
        c.state = static_cast<std::size_t>(s);
    }
    n.finish();
    return c;
}

void check_positive(double v, const std::string& path) {
    if (!(v > 0.0)) fail(path, "must be > 0");
}

}  // namespace

const char* to_string(ModelType t) noexcept { return enum_name(t, kModelNames); }
const char* to_string(ConstraintType t) noexcept { return enum_name(t, kConstraintNames); }
const char* to_string(CostType t) noexcept { return enum_name(t, kCostNames); }

double input_bound_amps(const ExperimentConfig& config, const ConstraintConfig& c) {
    if (c.units == CurrentUnits::kCRate) return c.bound * config.model.ecm.capacity / 3600.0;
    return c.bound;
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    Node n(root, "");
    ExperimentConfig cfg;

    cfg.schema_version = n.integer("schema_version");
    if (cfg.schema_version != kSchemaVersion) {
        fail("schema_version", "unsupported version " + std::to_string(cfg.schema_version) + " (expected " +
                                   std::to_string(kSchemaVersion) + ")");
    }
    cfg.model = parse_model(n.child("model"));
    const std::size_t n_states = model_states(cfg.model);

    if (n.has("initial_state")) {
        cfg.initial_state = n.numbers("initial_state");
        if (cfg.initial_state.size() != n_states) {
            fail("initial_state", "expected " + std::to_string(n_states) + " entries, got " +
                                      std::to_string(cfg.initial_state.size()));
        }
    } else {
        cfg.initial_state.assign(n_states, 0.0);
    }

    const auto& arr = n.raw("constraints");
    if (!arr.is_array()) fail("constraints", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        auto c = parse_constraint(Node(arr[i], "constraints[" + std::to_string(i) + "]"), cfg.model, base_dir);
        if (!names.insert(c.name).second) fail("constraints[" + std::to_string(i) + "].name", "duplicate '" + c.name + "'");
        cfg.constraints.push_back(std::move(c));
    }

    cfg.cost = n.has("cost") ? parse_cost(n.child("cost"), cfg.model) : CostConfig{};
    if (!n.has("cost") && !ecm_family(cfg.model.type)) fail("cost", "required for SPM models");

    if (n.has("horizon")) {
        Node h = n.child("horizon");
        cfg.horizon.t_f = h.number("t_f", cfg.horizon.t_f);
        cfg.horizon.dt = h.number("dt", cfg.horizon.t_f / 2000.0);
        h.finish();
    }
    check_positive(cfg.horizon.t_f, "horizon.t_f");
    check_positive(cfg.horizon.dt, "horizon.dt");
    if (cfg.horizon.dt > cfg.horizon.t_f) fail("horizon.dt", "must not exceed t_f");

    if (n.has("policy")) {
        Node p = n.child("policy");
        cfg.policy.u_min = p.number("u_min", cfg.policy.u_min);
        cfg.policy.u_max = p.maybe_number("u_max");
        cfg.policy.bisection_tol = p.maybe_number("bisection_tol");
        if (p.has("max_iter")) cfg.policy.max_iter = p.integer("max_iter");
        cfg.policy.lookahead_dt = p.maybe_number("lookahead_dt");
        p.finish();
    }
    std::optional<double> bound;
    for (const auto& c : cfg.constraints) {
        if (c.type == ConstraintType::kInputUpper) {
            const double b = input_bound_amps(cfg, c);
            bound = bound ? std::min(*bound, b) : b;
        }
    }
    if (!cfg.policy.u_max && !bound) fail("policy.u_max", "required when no input_upper constraint is given");
    const double u_max = cfg.policy.u_max.value_or(bound.value_or(0.0));
    if (!(u_max > cfg.policy.u_min)) fail("policy.u_max", "must exceed policy.u_min");
    if (cfg.policy.bisection_tol) check_positive(*cfg.policy.bisection_tol, "policy.bisection_tol");
    if (cfg.policy.lookahead_dt) check_positive(*cfg.policy.lookahead_dt, "policy.lookahead_dt");
    if (cfg.policy.max_iter < 1) fail("policy.max_iter", "must be >= 1");

    if (n.has("oracle")) {
        Node o = n.child("oracle");
        OracleConfig oc;
        oc.n_steps = o.count("n_steps", oc.n_steps);
        oc.levels = o.numbers("levels");
        oc.threads = static_cast<unsigned>(o.count("threads", oc.threads));
        oc.tol = o.number("tol", oc.tol);
        o.finish();
        if (oc.n_steps < 1) fail("oracle.n_steps", "must be >= 1");
        if (oc.levels.empty()) fail("oracle.levels", "must not be empty");
        check_positive(oc.tol, "oracle.tol");
        cfg.oracle = oc;
    }

    if (n.has("input")) {
        Node in = n.child("input");
        InputProfileConfig ip;
        ip.starts = in.numbers("starts");
        ip.values = in.numbers("values");
        in.finish();
        if (ip.starts.empty() || ip.starts.size() != ip.values.size()) {
            fail("input", "starts and values must be non-empty and of equal length");
        }
        if (ip.starts.front() != 0.0) fail("input.starts", "first start must be 0");
        if (!std::is_sorted(ip.starts.begin(), ip.starts.end(), std::less_equal<>())) {
            fail("input.starts", "must be strictly increasing");
        }
        cfg.input = ip;
    }

    if (n.has("check")) {
        Node c = n.child("check");
        if (c.has("state_lo")) cfg.check.state_lo = c.numbers("state_lo");
        if (c.has("state_hi")) cfg.check.state_hi = c.numbers("state_hi");
        cfg.check.u_lo = c.maybe_number("u_lo");
        cfg.check.u_hi = c.maybe_number("u_hi");
        cfg.check.n_samples = c.count("n_samples", cfg.check.n_samples);
        c.finish();
    }
    if (cfg.check.state_lo.empty()) cfg.check.state_lo.assign(n_states, 0.0);
    if (cfg.check.state_hi.empty()) cfg.check.state_hi.assign(n_states, 1.0);
    if (cfg.check.state_lo.size() != n_states || cfg.check.state_hi.size() != n_states) {
        fail("check", "state_lo and state_hi need " + std::to_string(n_states) + " entries");
    }
    for (std::size_t i = 0; i < n_states; ++i) {
        if (cfg.check.state_lo[i] > cfg.check.state_hi[i]) fail("check.state_lo", "exceeds state_hi");
    }
    if (!cfg.check.u_lo) cfg.check.u_lo = cfg.policy.u_min;
    if (!cfg.check.u_hi) cfg.check.u_hi = u_max;
    if (*cfg.check.u_lo > *cfg.check.u_hi) fail("check.u_lo", "exceeds u_hi");
    if (cfg.check.n_samples < 1) fail("check.n_samples", "must be >= 1");

    cfg.seed = n.count("seed", cfg.seed);
    cfg.tol_active = n.number("tol_active", cfg.tol_active);
    cfg.tol_engaged = n.number("tol_engaged", cfg.tol_engaged);
    check_positive(cfg.tol_active, "tol_active");
    check_positive(cfg.tol_engaged, "tol_engaged");
    n.finish();

    try {
        (void)build_experiment(cfg);
    } catch (const ParameterError& e) {
        fail(e.field(), e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

namespace {

ojson dump_ecm(const EcmParams& p) {
    ojson j;
    j["capacity"] = p.capacity;
    j["series_resistance"] = p.series_resistance;
    j["rc_pairs"] = ojson::array();
    for (const auto& rc : p.rc_pairs) j["rc_pairs"].push_back({{"resistance", rc.resistance}, {"capacitance", rc.capacitance}});
    if (p.ocv.is_table()) {
        j["ocv"] = {{"soc", p.ocv.soc_points()}, {"volts", p.ocv.volt_points()}};
    } else {
        j["ocv"] = {{"offset", p.ocv.offset()}, {"slope", p.ocv.slope()}};
    }
    return j;
}

template <class T>
void put_optional(ojson& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

}  // namespace

std::string dump_config(const ExperimentConfig& cfg) {
    ojson j;
    j["schema_version"] = cfg.schema_version;

    ojson model;
    model["type"] = to_string(cfg.model.type);
    switch (cfg.model.type) {
        case ModelType::kEcm:
            model["ecm"] = dump_ecm(cfg.model.ecm);
            break;
        case ModelType::kThermalEcm:
            model["ecm"] = dump_ecm(cfg.model.ecm);
            model["thermal"] = {{"mass", cfg.model.thermal.mass},
                                {"heat_capacity", cfg.model.thermal.heat_capacity},
                                {"thermal_resistance", cfg.model.thermal.thermal_resistance}};
            break;
        case ModelType::kPadeSpm: {
            const auto& p = cfg.model.pade;
            model["pade"] = {{"a1", p.a1}, {"a2", p.a2}, {"b1", p.b1}, {"b2", p.b2},
                             {"b3", p.b3}, {"c1", p.c1}, {"c2", p.c2}, {"c3", p.c3}};
            break;
        }
        case ModelType::kFdSpm: {
            const auto& p = cfg.model.fd;
            model["fd"] = {{"diffusivity", p.diffusivity},   {"particle_radius", p.particle_radius},
                           {"n_interior", p.n_interior},     {"faraday", p.faraday},
                           {"surface_area", p.surface_area}, {"collector_area", p.collector_area},
                           {"thickness", p.thickness},       {"electrode_sign", p.electrode_sign}};
            break;
        }
    }
    j["model"] = model;
    j["initial_state"] = cfg.initial_state;

    j["constraints"] = ojson::array();
    for (const auto& c : cfg.constraints) {
        ojson cj;
        cj["type"] = to_string(c.type);
        cj["name"] = c.name;
        switch (c.type) {
            case ConstraintType::kStateUpper:
                cj["state"] = c.state;
                cj["bound"] = c.bound;
                break;
            case ConstraintType::kInputUpper:
                cj["bound"] = c.bound;
                cj["units"] = enum_name(c.units, kUnitNames);
                break;
            case ConstraintType::kVoltage:
            case ConstraintType::kTemperature:
                cj["bound"] = c.bound;
                break;
            case ConstraintType::kPlating:
                if (!c.table.empty()) {
                    cj["table"] = c.table;
                } else {
                    cj["concentration"] = c.concentration;
                    cj["max_current"] = c.max_current;
                }
                break;
        }
        put_optional(cj, "tol_active", c.tol_active);
        put_optional(cj, "tol_engaged", c.tol_engaged);
        j["constraints"].push_back(cj);
    }

    ojson cost;
    cost["type"] = to_string(cfg.cost.type);
    if (cfg.cost.type == CostType::kStateComponent) cost["state"] = cfg.cost.state;
    j["cost"] = cost;
    j["horizon"] = {{"t_f", cfg.horizon.t_f}, {"dt", cfg.horizon.dt}};

    ojson policy;
    policy["u_min"] = cfg.policy.u_min;
    put_optional(policy, "u_max", cfg.policy.u_max);
    put_optional(policy, "bisection_tol", cfg.policy.bisection_tol);
    policy["max_iter"] = cfg.policy.max_iter;
    put_optional(policy, "lookahead_dt", cfg.policy.lookahead_dt);
    j["policy"] = policy;

    if (cfg.oracle) {
        j["oracle"] = {{"n_steps", cfg.oracle->n_steps},
                       {"levels", cfg.oracle->levels},
                       {"threads", cfg.oracle->threads},
                       {"tol", cfg.oracle->tol}};
    }
    if (cfg.input) j["input"] = {{"starts", cfg.input->starts}, {"values", cfg.input->values}};

    ojson check;
    check["state_lo"] = cfg.check.state_lo;
    check["state_hi"] = cfg.check.state_hi;
    put_optional(check, "u_lo", cfg.check.u_lo);
    put_optional(check, "u_hi", cfg.check.u_hi);
    check["n_samples"] = cfg.check.n_samples;
    j["check"] = check;

    j["seed"] = cfg.seed;
    j["tol_active"] = cfg.tol_active;
    j["tol_engaged"] = cfg.tol_engaged;
    return j.dump(2) + "\n";
}

void save_config(const ExperimentConfig& config, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write config '" + path + "'");
    out << dump_config(config);
}

Experiment build_experiment(const ExperimentConfig& cfg) {
    const auto& m = cfg.model;
    std::optional<EcmParams> ecm;
    OutputMap surface;
    ControlSystem sys = [&]() {
        switch (m.type) {
            case ModelType::kEcm:
                ecm = m.ecm;
                return build_ecm(m.ecm);
            case ModelType::kThermalEcm:
                ecm = m.ecm;
                return build_thermal_coupled_ecm(m.ecm, m.thermal);
            case ModelType::kPadeSpm: {
                auto s = build_pade_spm(m.pade);
                surface = s.surface_output;
                return s.system;
            }
            case ModelType::kFdSpm: {
                auto s = build_fd_spm(m.fd);
                surface = s.surface_output;
                return s.system;
            }
        }
        throw ConfigError("unknown model type");
    }();

    ConstraintSet set({}, cfg.tol_active);
    for (const auto& c : cfg.constraints) {
        Constraint k = [&]() {
            switch (c.type) {
                case ConstraintType::kStateUpper: return upper_bound_state(c.state - 1, c.bound, c.name);
                case ConstraintType::kInputUpper: return upper_bound_input(input_bound_amps(cfg, c), c.name);
                case ConstraintType::kVoltage: return voltage_limit(m.ecm, c.bound, c.name);
                case ConstraintType::kTemperature:
                    return temperature_limit(c.bound, thermal_temperature_index(m.ecm), c.name);
                case ConstraintType::kPlating:
                    return plating_constraint(PlatingTable(c.concentration, c.max_current), surface, c.name);
            }
            throw ConfigError("unknown constraint type");
        }();
        k.tol_active = c.tol_active;
        k.tol_engaged = c.tol_engaged;
        set.add(std::move(k));
    }

    RunningCost L = [&]() {
        switch (cfg.cost.type) {
            case CostType::kSocRate: return RunningCost::soc_rate(m.ecm.capacity);
            case CostType::kSocIntegral: return RunningCost::soc_integral();
            case CostType::kStateComponent: return RunningCost::state_component(cfg.cost.state - 1);
            case CostType::kTemperaturePenalized:
                return RunningCost::temperature_penalized(0, thermal_temperature_index(m.ecm));
        }
        throw ConfigError("unknown cost type");
    }();

    std::optional<double> bound;
    for (const auto& c : cfg.constraints) {
        if (c.type == ConstraintType::kInputUpper) {
            const double b = input_bound_amps(cfg, c);
            bound = bound ? std::min(*bound, b) : b;
        }
    }
    const double u_max = cfg.policy.u_max.value_or(bound.value_or(0.0));
    auto policy = BangRidePolicy::create(set, u_max, cfg.policy.u_min, cfg.policy.lookahead_dt);
    if (cfg.policy.bisection_tol) policy.bisection_tol = *cfg.policy.bisection_tol;
    policy.max_iter = cfg.policy.max_iter;
    policy.validate();

    Vector x0 = Vector::Zero(static_cast<Eigen::Index>(sys.n_states()));
    for (std::size_t i = 0; i < cfg.initial_state.size(); ++i) x0(static_cast<Eigen::Index>(i)) = cfg.initial_state[i];

    return Experiment{std::move(sys), policy.set, std::move(L), std::move(policy), std::move(x0),
                      cfg.horizon.t_f, cfg.horizon.dt, std::move(ecm), std::move(surface)};
}

}  // namespace monoride
