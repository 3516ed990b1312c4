#pragma once

#include "phcpg/solver.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace phcpg {

enum class ModelKind { Toda, RigidBody, Wave };
enum class Mode { Converge, ConvergeNodal, Energy, Run };
enum class OutputFormat { Csv, Json };

/// Invalid experiment configuration; what() names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A solver failure inside an experiment job, tagged with the series label,
/// step size and step index.
class ExperimentSolverError : public std::runtime_error {
public:
    ExperimentSolverError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
    [[nodiscard]] int step() const noexcept { return step_; }

private:
    int step_;
};

/// One curve of an experiment: a discretisation (and optionally a wave mesh
/// or viscosity) swept over the configured step sizes.
struct Series {
    std::string label;
    int k = 1;
    int s_q = 1;
    int s_pi = 1;
    std::optional<int> wave_N;
    std::optional<double> wave_nu;
};

/// Full description of one experiment run. Serialises to the versioned JSON
/// config file format (see README).
struct ExperimentConfig {
    static constexpr int kVersion = 1;

    ModelKind model = ModelKind::Toda;
    Mode mode = Mode::Converge;

    int toda_N = 5;
    double toda_gamma = 0.1;
    std::array<double, 3> inertia{1.0, 1.0, 1.0};
    std::array<double, 3> axis{1.0, 1.0, 1.0};
    int wave_N = 10;
    double wave_ell = 10.0;
    double wave_gamma = 0.1;
    double wave_nu = 0.0;
    int wave_rf_nodes = 10;

    /// "sin2t" or "zero" for the Toda/rigid-body control, "one_minus_sin" or
    /// "zero" for the wave boundary data.
    std::string control = "sin2t";
    /// Initial datum for energy/run modes; model default when unset.
    std::optional<std::vector<double>> z0;

    std::vector<Series> series;
    std::vector<double> taus;
    double T = 5.0;
    double tau_ref = 1.25e-4;

    JacobianMode jacobian = JacobianMode::FiniteDifference;
    double newton_tol = 1e-12;
    int newton_max_iter = 50;
    int workers = 1;

    std::string out;
    OutputFormat format = OutputFormat::Csv;

    /// Throws ConfigError describing the first invalid field.
    void validate() const;
};

[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j);
/// Parses config text; syntax errors report line and column.
[[nodiscard]] ExperimentConfig parse_config(const std::string& text);

[[nodiscard]] std::vector<std::string> preset_names();
/// Built-in named configuration; throws ConfigError on an
/// unknown name.
[[nodiscard]] ExperimentConfig preset(const std::string& name);

[[nodiscard]] std::string to_string(ModelKind m);
[[nodiscard]] std::string to_string(Mode m);
[[nodiscard]] Mode parse_mode(const std::string& s);
[[nodiscard]] ModelKind parse_model(const std::string& s);

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Runs every (series, tau) job of the experiment, up to cfg.workers at a
/// time, and assembles the result table in deterministic order. Throws
/// ExperimentSolverError on solver failure, reporting the first failing job
/// in table order.
[[nodiscard]] Table run_experiment(const ExperimentConfig& cfg);

/// RFC-4180 style CSV: header row, comma separated, quoted when needed.
[[nodiscard]] std::string to_csv(const Table& table);
/// {"metadata": {...}, "columns": [...], "rows": [{column: value}, ...]}.
[[nodiscard]] std::string to_json_text(const Table& table, const ExperimentConfig& cfg);
[[nodiscard]] std::string render(const Table& table, const ExperimentConfig& cfg);

}  // namespace phcpg
