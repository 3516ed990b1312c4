#include "phcpg/experiment.hpp"

#include "phcpg/energy.hpp"
#include "phcpg/manufactured.hpp"
#include "phcpg/models.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace phcpg {

using nlohmann::json;

// ---------------------------------------------------------------------------
// enum <-> string

std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::Toda: return "toda";
        case ModelKind::RigidBody: return "rigid_body";
        case ModelKind::Wave: return "wave";
    }
    return "?";
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::Converge: return "converge";
        case Mode::ConvergeNodal: return "converge_nodal";
        case Mode::Energy: return "energy";
        case Mode::Run: return "run";
    }
    return "?";
}

ModelKind parse_model(const std::string& s) {
    if (s == "toda") return ModelKind::Toda;
    if (s == "rigid_body") return ModelKind::RigidBody;
    if (s == "wave") return ModelKind::Wave;
    throw ConfigError("model: unknown value '" + s + "' (expected toda, rigid_body or wave)");
}

Mode parse_mode(const std::string& s) {
    if (s == "converge") return Mode::Converge;
    if (s == "converge_nodal") return Mode::ConvergeNodal;
    if (s == "energy") return Mode::Energy;
    if (s == "run") return Mode::Run;
    throw ConfigError("mode: unknown value '" + s + "' (expected converge, converge_nodal, energy or run)");
}

namespace {

std::string to_string(JacobianMode m) {
    return m == JacobianMode::Structured ? "structured" : "finite_difference";
}

JacobianMode parse_jacobian(const std::string& s) {
    if (s == "finite_difference") return JacobianMode::FiniteDifference;
    if (s == "structured") return JacobianMode::Structured;
    throw ConfigError("solver/jacobian: unknown value '" + s + "' (expected finite_difference or structured)");
}

std::string to_string(OutputFormat f) { return f == OutputFormat::Json ? "json" : "csv"; }

OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw ConfigError("output/format: unknown value '" + s + "' (expected csv or json)");
}

int model_dim(const ExperimentConfig& cfg, const Series* series = nullptr) {
    switch (cfg.model) {
        case ModelKind::Toda: return 2 * cfg.toda_N;
        case ModelKind::RigidBody: return 3;
        case ModelKind::Wave: {
            const int n = series && series->wave_N ? *series->wave_N : cfg.wave_N;
            return 2 * n + 3;
        }
    }
    return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// validation

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (series.empty()) fail("series: at least one series is required");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const std::string at = "series/" + std::to_string(i);
        if (s.label.empty()) fail(at + "/label: must not be empty");
        if (!labels.insert(s.label).second) fail(at + "/label: duplicate label '" + s.label + "'");
        if (s.k < 1) fail(at + "/k: must be >= 1");
        if (s.s_q < 1 || s.s_q > kMaxQuadratureNodes) fail(at + "/s_q: must lie in [1, 64]");
        if (s.s_pi < 1 || s.s_pi > kMaxQuadratureNodes) fail(at + "/s_pi: must lie in [1, 64]");
        if (s.wave_N && *s.wave_N < 1) fail(at + "/wave_N: must be >= 1");
        if (s.wave_nu && !(*s.wave_nu >= 0.0)) fail(at + "/wave_nu: must be >= 0");
        if ((s.wave_N || s.wave_nu) && model != ModelKind::Wave) fail(at + ": wave overrides on a non-wave model");
    }
    if (taus.empty()) fail("taus: at least one step size is required");
    for (double t : taus) {
        if (!(t > 0.0) || !std::isfinite(t)) fail("taus: step sizes must be positive");
        if (t > T) fail("taus: step size exceeds the final time");
    }
    if ((mode == Mode::Converge || mode == Mode::ConvergeNodal) && taus.size() < 2) {
        fail("taus: convergence modes need at least two step sizes");
    }
    if ((mode == Mode::Energy || mode == Mode::Run) && taus.size() != 1) {
        fail("taus: energy and run modes take exactly one step size");
    }
    if (!(T > 0.0) || !std::isfinite(T)) fail("T: must be positive");
    if (!(tau_ref > 0.0)) fail("tau_ref: must be positive");
    if (!(newton_tol > 0.0)) fail("solver/newton_tol: must be positive");
    if (newton_max_iter < 1) fail("solver/newton_max_iter: must be >= 1");
    if (workers < 1) fail("workers: must be >= 1");

    switch (model) {
        case ModelKind::Toda:
            if (toda_N < 1) fail("toda/N: must be >= 1");
            if (!(toda_gamma >= 0.0)) fail("toda/gamma: must be >= 0");
            if (control != "sin2t" && control != "zero") fail("control: toda expects sin2t or zero");
            break;
        case ModelKind::RigidBody:
            for (double i : inertia) {
                if (!(i > 0.0)) fail("rigid_body/inertia: moments must be positive");
            }
            if (control != "sin2t" && control != "zero") fail("control: rigid_body expects sin2t or zero");
            break;
        case ModelKind::Wave:
            if (wave_N < 1) fail("wave/N: must be >= 1");
            if (!(wave_ell > 0.0)) fail("wave/ell: must be positive");
            if (!(wave_gamma >= 0.0)) fail("wave/gamma: must be >= 0");
            if (!(wave_nu >= 0.0)) fail("wave/nu: must be >= 0");
            if (wave_rf_nodes < 1 || wave_rf_nodes > kMaxQuadratureNodes) fail("wave/rf_quad_nodes: out of range");
            if (control != "one_minus_sin" && control != "zero") fail("control: wave expects one_minus_sin or zero");
            break;
    }
    if (z0) {
        for (const auto& s : series) {
            if (static_cast<int>(z0->size()) != model_dim(*this, &s)) {
                fail("z0: expected " + std::to_string(model_dim(*this, &s)) + " entries for series '" + s.label + "'");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON config

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["version"] = ExperimentConfig::kVersion;
    j["model"] = to_string(cfg.model);
    j["mode"] = to_string(cfg.mode);
    j["toda"] = {{"N", cfg.toda_N}, {"gamma", cfg.toda_gamma}};
    j["rigid_body"] = {{"inertia", cfg.inertia}, {"axis", cfg.axis}};
    j["wave"] = {{"N", cfg.wave_N},
                 {"ell", cfg.wave_ell},
                 {"gamma", cfg.wave_gamma},
                 {"nu", cfg.wave_nu},
                 {"rf_quad_nodes", cfg.wave_rf_nodes}};
    j["control"] = cfg.control;
    j["z0"] = cfg.z0 ? json(*cfg.z0) : json(nullptr);
    json series = json::array();
    for (const auto& s : cfg.series) {
        json e = {{"label", s.label}, {"k", s.k}, {"s_q", s.s_q}, {"s_pi", s.s_pi}};
        if (s.wave_N) e["wave_N"] = *s.wave_N;
        if (s.wave_nu) e["wave_nu"] = *s.wave_nu;
        series.push_back(std::move(e));
    }
    j["series"] = std::move(series);
    j["taus"] = cfg.taus;
    j["T"] = cfg.T;
    j["tau_ref"] = cfg.tau_ref;
    j["solver"] = {{"jacobian", to_string(cfg.jacobian)},
                   {"newton_tol", cfg.newton_tol},
                   {"newton_max_iter", cfg.newton_max_iter}};
    j["workers"] = cfg.workers;
    j["output"] = {{"path", cfg.out}, {"format", to_string(cfg.format)}};
    return j;
}

namespace {

const char* type_name(json::value_t t) {
    switch (t) {
        case json::value_t::number_integer:
        case json::value_t::number_unsigned: return "integer";
        case json::value_t::number_float: return "number";
        case json::value_t::string: return "string";
        case json::value_t::array: return "array";
        case json::value_t::object: return "object";
        case json::value_t::boolean: return "boolean";
        default: return "null";
    }
}

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const {
        std::set<std::string> known(keys.begin(), keys.end());
        for (const auto& [key, value] : j_.items()) {
            if (!known.count(key)) throw ConfigError(path_ + key + ": unknown field");
        }
    }

    [[nodiscard]] bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    [[nodiscard]] const json& at(const char* key) const {
        if (!j_.contains(key)) throw ConfigError(path_ + key + ": missing field");
        return j_.at(key);
    }

    template <class T>
    void read(const char* key, T& out) const {
        if (!has(key)) return;
        const json& v = j_.at(key);
        try {
            if constexpr (std::is_same_v<T, int>) {
                if (!v.is_number_integer()) throw ConfigError("");
            } else if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw ConfigError("");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ConfigError("");
            }
            out = v.get<T>();
        } catch (const std::exception&) {
            throw ConfigError(path_ + key + ": unexpected " + type_name(v.type()));
        }
    }

    [[nodiscard]] std::string child(const char* key) const { return path_ + key + "/"; }

private:
    const json& j_;
    std::string path_;
};

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    Reader r(j, "");
    r.allow({"version", "model", "mode", "toda", "rigid_body", "wave", "control", "z0", "series", "taus", "T",
             "tau_ref", "solver", "workers", "output"});
    int version = ExperimentConfig::kVersion;
    r.read("version", version);
    if (version != ExperimentConfig::kVersion) {
        throw ConfigError("version: unsupported config version " + std::to_string(version));
    }
    std::string s;
    r.read("model", s = to_string(cfg.model));
    cfg.model = parse_model(s);
    r.read("mode", s = to_string(cfg.mode));
    cfg.mode = parse_mode(s);
    if (r.has("toda")) {
        Reader t(r.at("toda"), r.child("toda"));
        t.allow({"N", "gamma"});
        t.read("N", cfg.toda_N);
        t.read("gamma", cfg.toda_gamma);
    }
    if (r.has("rigid_body")) {
        Reader b(r.at("rigid_body"), r.child("rigid_body"));
        b.allow({"inertia", "axis"});
        b.read("inertia", cfg.inertia);
        b.read("axis", cfg.axis);
    }
    if (r.has("wave")) {
        Reader w(r.at("wave"), r.child("wave"));
        w.allow({"N", "ell", "gamma", "nu", "rf_quad_nodes"});
        w.read("N", cfg.wave_N);
        w.read("ell", cfg.wave_ell);
        w.read("gamma", cfg.wave_gamma);
        w.read("nu", cfg.wave_nu);
        w.read("rf_quad_nodes", cfg.wave_rf_nodes);
    }
    r.read("control", cfg.control);
    if (r.has("z0")) {
        std::vector<double> z0;
        r.read("z0", z0);
        cfg.z0 = std::move(z0);
    }
    if (r.has("series")) {
        const json& arr = r.at("series");
        if (!arr.is_array()) throw ConfigError("series: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Reader e(arr[i], "series/" + std::to_string(i) + "/");
            e.allow({"label", "k", "s_q", "s_pi", "wave_N", "wave_nu"});
            Series ser;
            e.read("label", ser.label);
            e.read("k", ser.k);
            ser.s_q = ser.k;
            ser.s_pi = std::max(ser.k, 3);
            e.read("s_q", ser.s_q);
            e.read("s_pi", ser.s_pi);
            if (e.has("wave_N")) {
                int n = 0;
                e.read("wave_N", n);
                ser.wave_N = n;
            }
            if (e.has("wave_nu")) {
                double nu = 0.0;
                e.read("wave_nu", nu);
                ser.wave_nu = nu;
            }
            cfg.series.push_back(std::move(ser));
        }
    }
    r.read("taus", cfg.taus);
    r.read("T", cfg.T);
    r.read("tau_ref", cfg.tau_ref);
    if (r.has("solver")) {
        Reader sv(r.at("solver"), r.child("solver"));
        sv.allow({"jacobian", "newton_tol", "newton_max_iter"});
        std::string jm = to_string(cfg.jacobian);
        sv.read("jacobian", jm);
        cfg.jacobian = parse_jacobian(jm);
        sv.read("newton_tol", cfg.newton_tol);
        sv.read("newton_max_iter", cfg.newton_max_iter);
    }
    r.read("workers", cfg.workers);
    if (r.has("output")) {
        Reader o(r.at("output"), r.child("output"));
        o.allow({"path", "format"});
        o.read("path", cfg.out);
        std::string f = to_string(cfg.format);
        o.read("format", f);
        cfg.format = parse_format(f);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line/column pair.
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("config syntax error at line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------------
// presets

namespace {

std::vector<double> halvings(double tau0, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(tau0 / std::pow(2.0, i));
    return out;
}

Series make_series(int k, int s_q, int s_pi) {
    return {"k=" + std::to_string(k) + ",s_q=" + std::to_string(s_q) + ",s_pi=" + std::to_string(s_pi), k, s_q, s_pi,
            std::nullopt, std::nullopt};
}

using PresetFactory = std::function<ExperimentConfig()>;

const std::map<std::string, PresetFactory>& preset_table() {
    static const std::map<std::string, PresetFactory> table = [] {
        std::map<std::string, PresetFactory> t;
        auto toda_converge = [](Mode mode) {
            ExperimentConfig c;
            c.model = ModelKind::Toda;
            c.mode = mode;
            for (int k = 1; k <= 4; ++k) c.series.push_back(make_series(k, k, k));
            c.taus = halvings(0.25, 6);
            return c;
        };
        t["toda_varying_degree"] = [=] { return toda_converge(Mode::Converge); };
        t["toda_varying_degree_different_sampling"] = [=] { return toda_converge(Mode::ConvergeNodal); };
        t["toda_varying_quadrature"] = [] {
            ExperimentConfig c;
            c.model = ModelKind::Toda;
            for (int sq = 1; sq <= 5; ++sq) c.series.push_back(make_series(3, sq, 3));
            c.taus = halvings(0.25, 6);
            return c;
        };
        t["toda_varying_projection"] = [] {
            ExperimentConfig c;
            c.model = ModelKind::Toda;
            for (int sp = 1; sp <= 5; ++sp) c.series.push_back(make_series(3, 3, sp));
            c.taus = halvings(0.25, 6);
            return c;
        };
        t["toda_energybalance"] = [] {
            ExperimentConfig c;
            c.model = ModelKind::Toda;
            c.mode = Mode::Energy;
            for (int k = 1; k <= 4; ++k) {
                for (int sp = 1; sp <= std::max(k, 3); ++sp) c.series.push_back(make_series(k, k, sp));
            }
            c.taus = {1e-2};
            return c;
        };
        t["rigid_body_energybalance"] = [] {
            ExperimentConfig c;
            c.model = ModelKind::RigidBody;
            c.mode = Mode::Energy;
            c.z0 = std::vector<double>{0.0, 0.5, 1.0};
            for (int k = 1; k <= 4; ++k) c.series.push_back(make_series(k, k, k));
            c.taus = {1e-2};
            return c;
        };
        auto rigid_converge = [](Mode mode) {
            ExperimentConfig c;
            c.model = ModelKind::RigidBody;
            c.mode = mode;
            for (int k = 1; k <= 4; ++k) c.series.push_back(make_series(k, k, k));
            c.taus = halvings(0.25, 6);
            return c;
        };
        t["rigid_body_varying_degree"] = [=] { return rigid_converge(Mode::Converge); };
        t["rigid_body_varying_degree_different_sampling"] = [=] { return rigid_converge(Mode::ConvergeNodal); };
        for (int nu : {0, 1}) {
            const std::string tag = "damped_wave_nu" + std::to_string(nu);
            auto wave_base = [nu] {
                ExperimentConfig c;
                c.model = ModelKind::Wave;
                c.control = "zero";
                c.wave_nu = nu;
                c.jacobian = JacobianMode::Structured;
                return c;
            };
            auto wave_converge = [=](Mode mode) {
                ExperimentConfig c = wave_base();
                c.mode = mode;
                for (int k : {2, 4, 6}) c.series.push_back(make_series(k, k, 2 * k));
                c.taus = halvings(0.5, 6);
                return c;
            };
            t[tag + "_varying_degree"] = [=] { return wave_converge(Mode::Converge); };
            t[tag + "_varying_degree_different_sampling"] = [=] { return wave_converge(Mode::ConvergeNodal); };
            t[tag + "_varying_discretization"] = [=] {
                ExperimentConfig c = wave_base();
                c.mode = Mode::Converge;
                for (int n : {8, 16, 32, 64}) {
                    Series s = make_series(4, 4, 8);
                    s.label = "h=10/" + std::to_string(n + 1);
                    s.wave_N = n;
                    c.series.push_back(s);
                }
                c.taus = halvings(0.5, 4);
                return c;
            };
            t[tag + "_energybalance"] = [=] {
                ExperimentConfig c = wave_base();
                c.mode = Mode::Energy;
                c.control = "one_minus_sin";
                for (int k = 1; k <= 4; ++k) c.series.push_back(make_series(k, k, 2 * k));
                c.taus = {1e-2};
                return c;
            };
        }
        return t;
    }();
    return table;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, factory] : preset_table()) names.push_back(name);
    return names;
}

ExperimentConfig preset(const std::string& name) {
    const auto& table = preset_table();
    auto it = table.find(name);
    if (it == table.end()) throw ConfigError("preset: unknown preset '" + name + "'");
    ExperimentConfig cfg = it->second();
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// running

namespace {

ScalarFn control_fn(const std::string& name) {
    if (name == "sin2t") return [](double t) { return std::sin(2.0 * t); };
    if (name == "one_minus_sin") return [](double t) { return 1.0 - std::sin(t); };
    return [](double) { return 0.0; };
}

WaveParams wave_params(const ExperimentConfig& cfg, const Series& s) {
    WaveParams p;
    p.N = s.wave_N.value_or(cfg.wave_N);
    p.ell = cfg.wave_ell;
    p.gamma = cfg.wave_gamma;
    p.nu = s.wave_nu.value_or(cfg.wave_nu);
    p.rf_quad_nodes = cfg.wave_rf_nodes;
    return p;
}

struct Setup {
    std::shared_ptr<const PHSystem> system;
    Vector z0;
    TrajectoryFn exact;  // set in convergence modes
    std::optional<Matrix> weight;
};

Setup make_setup(const ExperimentConfig& cfg, const Series& s) {
    Setup out;
    const bool converge = cfg.mode == Mode::Converge || cfg.mode == Mode::ConvergeNodal;
    if (converge) {
        ManufacturedCase mc;
        switch (cfg.model) {
            case ModelKind::Toda: mc = toda_manufactured(TodaParams::uniform(cfg.toda_N, cfg.toda_gamma)); break;
            case ModelKind::RigidBody: mc = rigid_body_manufactured({cfg.inertia, cfg.axis}); break;
            case ModelKind::Wave: mc = damped_wave_manufactured(wave_params(cfg, s)); break;
        }
        auto sys = wrap_manufactured(mc);
        out.z0 = sys->initial_datum();
        out.exact = mc.z_exact;
        if (cfg.model == ModelKind::Wave) out.weight = sys->mass();
        out.system = std::move(sys);
        return out;
    }
    switch (cfg.model) {
        case ModelKind::Toda:
            out.system = make_toda(TodaParams::uniform(cfg.toda_N, cfg.toda_gamma), control_fn(cfg.control));
            out.z0 = Vector::Zero(2 * cfg.toda_N);
            break;
        case ModelKind::RigidBody:
            out.system = make_rigid_body({cfg.inertia, cfg.axis}, control_fn(cfg.control));
            out.z0 = Vector{{0.0, 0.5, 1.0}};
            break;
        case ModelKind::Wave: {
            const WaveParams p = wave_params(cfg, s);
            const ScalarFn g = control_fn(cfg.control);
            auto sys = make_damped_wave(p, g, g);
            const double ell = p.ell;
            out.z0 = sys->sample_state(
                [ell](double x) { return 1.0 + 0.5 * std::sin(std::numbers::pi * x / ell); },
                [ell](double x) { return std::pow(4.0 * x / ell - 2.0, 3); });
            out.system = std::move(sys);
            break;
        }
    }
    if (cfg.z0) out.z0 = Eigen::Map<const Vector>(cfg.z0->data(), static_cast<Eigen::Index>(cfg.z0->size()));
    return out;
}

SolverConfig solver_config(const ExperimentConfig& cfg, const Series& s) {
    SolverConfig sc;
    sc.k = s.k;
    sc.s_q = s.s_q;
    sc.s_pi = s.s_pi;
    sc.newton_tol = cfg.newton_tol;
    sc.newton_max_iter = cfg.newton_max_iter;
    sc.jacobian_mode = cfg.jacobian;
    return sc;
}

std::string fmt_tau(double tau) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", tau);
    return buf;
}

struct JobOutput {
    double tau = 0.0;
    double err_inf = 0.0;
    double err_nodal = 0.0;
    std::vector<std::vector<Cell>> rows;  // energy / run modes
};

JobOutput run_job(const ExperimentConfig& cfg, const Series& s, double tau_in) {
    const Setup setup = make_setup(cfg, s);
    const int m = std::max(1, static_cast<int>(std::lround(cfg.T / tau_in)));
    const TimePartition partition = TimePartition::uniform(0.0, cfg.T, m);
    const SolverConfig sc = solver_config(cfg, s);
    JobOutput out;
    out.tau = cfg.T / m;

    const auto fail = [&](const std::exception& e, int step) {
        return ExperimentSolverError("series '" + s.label + "', tau=" + fmt_tau(out.tau) + ": " + e.what(), step);
    };
    const CpgSolution sol = [&] {
        try {
            return integrate(*setup.system, setup.z0, partition, sc);
        } catch (const NonConvergenceError& e) {
            throw fail(e, e.step());
        } catch (const SingularJacobianError& e) {
            throw fail(e, -1);
        } catch (const std::exception& e) {
            throw fail(e, -1);
        }
    }();

    switch (cfg.mode) {
        case Mode::Converge:
            out.err_inf = linf_error(sol, setup.exact, cfg.tau_ref, setup.weight);
            out.err_nodal = nodal_error(sol, setup.exact, setup.weight);
            break;
        case Mode::ConvergeNodal: out.err_nodal = nodal_error(sol, setup.exact, setup.weight); break;
        case Mode::Energy: {
            const EnergyReport rep = energy_balance_report(*setup.system, sol, sc);
            out.rows.push_back({s.label, 0LL, rep.t[0], rep.H[0], 0.0, 0.0, 0.0});
            for (std::size_t i = 0; i < rep.E.size(); ++i) {
                out.rows.push_back({s.label, static_cast<long long>(i + 1), rep.t[i + 1], rep.H[i + 1],
                                    rep.dissipation[i], rep.supply[i], rep.E[i]});
            }
            break;
        }
        case Mode::Run:
            for (double t : sampling_grid(0.0, cfg.T, cfg.tau_ref)) {
                const Vector z = sol.eval(t);
                std::vector<Cell> row{s.label, t};
                for (Eigen::Index i = 0; i < z.size(); ++i) row.emplace_back(z[i]);
                row.emplace_back(setup.system->hamiltonian(z));
                out.rows.push_back(std::move(row));
            }
            break;
    }
    return out;
}

Cell rate_cell(const Rate& r) {
    switch (r.status) {
        case Rate::Status::Value: return r.value;
        case Rate::Status::BelowFloor: return std::string("below_floor");
        case Rate::Status::Undefined: break;
    }
    return std::monostate{};
}

}  // namespace

Table run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<double> taus = cfg.taus;
    std::sort(taus.begin(), taus.end(), std::greater<>());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

    const std::size_t n_jobs = cfg.series.size() * taus.size();
    std::vector<JobOutput> results(n_jobs);
    std::vector<std::exception_ptr> errors(n_jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < n_jobs; job = next++) {
            try {
                results[job] = run_job(cfg, cfg.series[job / taus.size()], taus[job % taus.size()]);
            } catch (...) {
                errors[job] = std::current_exception();
            }
        }
    };
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), n_jobs);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    Table table;
    switch (cfg.mode) {
        case Mode::Converge: table.columns = {"series", "tau", "err_inf", "eoc_inf", "err_nodal", "eoc_nodal"}; break;
        case Mode::ConvergeNodal: table.columns = {"series", "tau", "err_nodal", "eoc_nodal"}; break;
        case Mode::Energy: table.columns = {"series", "i", "t_i", "H", "dissipation", "supply", "E"}; break;
        case Mode::Run: {
            table.columns = {"series", "t"};
            int dim = 0;
            for (const auto& s : cfg.series) dim = std::max(dim, model_dim(cfg, &s));
            for (int i = 0; i < dim; ++i) table.columns.push_back("z" + std::to_string(i));
            table.columns.push_back("H");
            break;
        }
    }

    for (std::size_t si = 0; si < cfg.series.size(); ++si) {
        const auto begin = results.begin() + static_cast<std::ptrdiff_t>(si * taus.size());
        const std::vector<JobOutput> chunk(begin, begin + static_cast<std::ptrdiff_t>(taus.size()));
        if (cfg.mode == Mode::Energy || cfg.mode == Mode::Run) {
            for (const auto& job : chunk) {
                for (auto row : job.rows) {
                    row.resize(table.columns.size());
                    table.rows.push_back(std::move(row));
                }
            }
            continue;
        }
        std::vector<double> ts;
        std::vector<double> e_inf;
        std::vector<double> e_nod;
        for (const auto& job : chunk) {
            ts.push_back(job.tau);
            e_inf.push_back(job.err_inf);
            e_nod.push_back(job.err_nodal);
        }
        const auto r_nod = eoc(ts, e_nod);
        if (cfg.mode == Mode::Converge) {
            const auto r_inf = eoc(ts, e_inf);
            for (std::size_t i = 0; i < ts.size(); ++i) {
                table.rows.push_back({cfg.series[si].label, ts[i], e_inf[i], rate_cell(r_inf[i]), e_nod[i],
                                      rate_cell(r_nod[i])});
            }
        } else {
            for (std::size_t i = 0; i < ts.size(); ++i) {
                table.rows.push_back({cfg.series[si].label, ts[i], e_nod[i], rate_cell(r_nod[i])});
            }
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// output

namespace {

std::string csv_field(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return "";
            } else if constexpr (std::is_same_v<T, long long>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                return buf;
            } else {
                if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
                std::string q = "\"";
                for (char ch : v) {
                    if (ch == '"') q += '"';
                    q += ch;
                }
                return q + "\"";
            }
        },
        c);
}

json json_value(const Cell& c) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return nullptr;
            } else {
                return v;
            }
        },
        c);
}

}  // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_field(table.columns[i]);
    }
    out += "\r\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_field(row[i]);
        }
        out += "\r\n";
    }
    return out;
}

std::string to_json_text(const Table& table, const ExperimentConfig& cfg) {
    json doc;
    doc["metadata"] = {{"format_version", ExperimentConfig::kVersion}, {"config", to_json(cfg)}};
    doc["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) r[table.columns[i]] = json_value(row[i]);
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string render(const Table& table, const ExperimentConfig& cfg) {
    return cfg.format == OutputFormat::Json ? to_json_text(table, cfg) : to_csv(table);
}

}  // namespace phcpg
