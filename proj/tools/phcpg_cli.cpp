// Command line front end for the cPG experiments.
//
//   phcpg converge --model toda --k 1,2,3 --tau 0.25,0.125,0.0625
//   phcpg energy --preset toda_energybalance --format json --out e.json
//   phcpg run --config my_run.json
//   phcpg presets

#include "phcpg/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Overrides {
    std::string model;
    std::vector<int> k;
    std::vector<int> s_q;
    std::vector<int> s_pi;
    std::vector<double> taus;
    std::optional<double> T;
    std::optional<double> tau_ref;
    std::string out;
    std::string format;
    std::string preset;
    std::string config;
    std::optional<double> nu;
    std::optional<int> wave_N;
    std::optional<int> workers;
    std::string jacobian;
    bool dump_config = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw phcpg::ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int pick(const std::vector<int>& values, std::size_t i, int fallback) {
    if (values.empty()) return fallback;
    return values.size() == 1 ? values.front() : values.at(i);
}

phcpg::ExperimentConfig build_config(phcpg::Mode mode, const Overrides& o) {
    using namespace phcpg;
    if (!o.preset.empty() && !o.config.empty()) throw ConfigError("--preset and --config are mutually exclusive");
    ExperimentConfig cfg;
    const bool base_given = !o.preset.empty() || !o.config.empty();
    if (!o.preset.empty()) cfg = preset(o.preset);
    if (!o.config.empty()) cfg = parse_config(read_file(o.config));
    if (base_given && cfg.mode != mode) {
        throw ConfigError("mode: configuration is for '" + to_string(cfg.mode) + "', not '" + to_string(mode) + "'");
    }
    cfg.mode = mode;
    if (!o.model.empty()) {
        cfg.model = parse_model(o.model);
        if (cfg.model == ModelKind::Wave && cfg.control == "sin2t") cfg.control = "one_minus_sin";
        if (cfg.model == ModelKind::Wave) cfg.jacobian = JacobianMode::Structured;
    }
    if (!o.k.empty() || !o.s_q.empty() || !o.s_pi.empty() || cfg.series.empty()) {
        const std::size_t n = std::max({o.k.size(), o.s_q.size(), o.s_pi.size(), std::size_t{1}});
        for (const auto* v : {&o.k, &o.s_q, &o.s_pi}) {
            if (v->size() > 1 && v->size() != n) throw ConfigError("--k/--sq/--spi: list lengths differ");
        }
        cfg.series.clear();
        for (std::size_t i = 0; i < n; ++i) {
            Series s;
            s.k = pick(o.k, i, 1);
            s.s_q = pick(o.s_q, i, s.k);
            const int spi_default = cfg.model == ModelKind::Wave ? 2 * s.k : std::max(s.k, 3);
            s.s_pi = pick(o.s_pi, i, spi_default);
            s.label = "k=" + std::to_string(s.k) + ",s_q=" + std::to_string(s.s_q) + ",s_pi=" + std::to_string(s.s_pi);
            cfg.series.push_back(s);
        }
    }
    if (!o.taus.empty()) cfg.taus = o.taus;
    if (cfg.taus.empty()) {
        cfg.taus = (mode == Mode::Converge || mode == Mode::ConvergeNodal)
                       ? std::vector<double>{0.25, 0.125, 0.0625, 0.03125}
                       : std::vector<double>{1e-2};
    }
    if (o.T) cfg.T = *o.T;
    if (o.tau_ref) cfg.tau_ref = *o.tau_ref;
    if (o.nu) {
        cfg.wave_nu = *o.nu;
        for (auto& s : cfg.series) s.wave_nu.reset();
    }
    if (o.wave_N) {
        cfg.wave_N = *o.wave_N;
        for (auto& s : cfg.series) s.wave_N.reset();
    }
    if (o.workers) cfg.workers = *o.workers;
    if (!o.jacobian.empty()) {
        if (o.jacobian == "fd" || o.jacobian == "finite_difference") {
            cfg.jacobian = JacobianMode::FiniteDifference;
        } else if (o.jacobian == "structured") {
            cfg.jacobian = JacobianMode::Structured;
        } else {
            throw ConfigError("--jacobian: expected fd or structured");
        }
    }
    if (!o.out.empty()) cfg.out = o.out;
    if (!o.format.empty()) cfg.format = o.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--model", o.model, "toda, rigid_body or wave")
        ->check(CLI::IsMember({"toda", "rigid_body", "wave"}));
    sub->add_option("--k", o.k, "polynomial degree(s)")->delimiter(',');
    sub->add_option("--sq", o.s_q, "quadrature nodes per step (per series)")->delimiter(',');
    sub->add_option("--spi", o.s_pi, "projection nodes per step (per series)")->delimiter(',');
    sub->add_option("--tau", o.taus, "step size(s)")->delimiter(',');
    sub->add_option("--T", o.T, "final time");
    sub->add_option("--tau-ref", o.tau_ref, "sampling step for sup-norm errors and run output");
    sub->add_option("--out", o.out, "output file (stdout when omitted)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--preset", o.preset, "start from a built-in configuration");
    sub->add_option("--config", o.config, "start from a JSON configuration file");
    sub->add_option("--nu", o.nu, "wave viscosity");
    sub->add_option("--N", o.wave_N, "wave interior grid points");
    sub->add_option("--workers", o.workers, "parallel jobs");
    sub->add_option("--jacobian", o.jacobian, "fd or structured");
    sub->add_flag("--dump-config", o.dump_config, "print the resolved configuration as JSON and exit");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-consistent continuous Petrov-Galerkin time stepping for port-Hamiltonian systems"};
    app.require_subcommand(1);

    Overrides o;
    std::vector<std::pair<CLI::App*, phcpg::Mode>> subs;
    subs.emplace_back(app.add_subcommand("converge", "error and EOC table against a manufactured solution"),
                      phcpg::Mode::Converge);
    subs.emplace_back(app.add_subcommand("converge_nodal", "nodal error and EOC table"), phcpg::Mode::ConvergeNodal);
    subs.emplace_back(app.add_subcommand("energy", "per-step energy balance audit"), phcpg::Mode::Energy);
    subs.emplace_back(app.add_subcommand("run", "sampled trajectory and Hamiltonian"), phcpg::Mode::Run);
    for (auto& [sub, mode] : subs) add_common(sub, o);
    auto* presets = app.add_subcommand("presets", "list built-in configurations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (presets->parsed()) {
        for (const auto& name : phcpg::preset_names()) {
            std::cout << name << "  (" << phcpg::to_string(phcpg::preset(name).mode) << ")\n";
        }
        return 0;
    }

    try {
        phcpg::Mode mode = phcpg::Mode::Converge;
        for (auto& [sub, m] : subs) {
            if (sub->parsed()) mode = m;
        }
        const phcpg::ExperimentConfig cfg = build_config(mode, o);
        if (o.dump_config) {
            std::cout << phcpg::to_json(cfg).dump(2) << '\n';
            return 0;
        }
        const std::string text = phcpg::render(phcpg::run_experiment(cfg), cfg);
        if (cfg.out.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(cfg.out, std::ios::binary);
            if (!f) throw phcpg::ConfigError("output/path: cannot write '" + cfg.out + "'");
            f << text;
        }
        return 0;
    } catch (const phcpg::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const phcpg::ExperimentSolverError& e) {
        std::cerr << "solver failure";
        if (e.step() >= 0) std::cerr << " at step " << e.step();
        std::cerr << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
