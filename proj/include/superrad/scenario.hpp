#pragma once

// Scenario configuration, single runs, figure reproduction and sweeps.
//
// Config files are flat "key = value" text (schema_version 1). '#' starts a
// comment. Lists are comma separated. Keys:
//
//   schema_version      1
//   model               bb_full | bb_logistic | bb_interacting | bf | fb | exponential
//   output_path         CSV path relative to the output directory
//   outputs             observable (column) names; empty = all
//   time.t_end, time.n_samples, time.spacing (linear | log), time.t_first
//   integrator.method (adaptive_embedded_rk | fixed_rk4), integrator.rel_tol,
//     .abs_tol, .initial_step, .max_step, .min_step, .max_steps
//   params.*            model parameters, see model_keys()
//   sweep.param, sweep.values
//
// For the bb models params.omega and params.eta are accepted as derived
// inputs: they fix g (from Delta, Gamma) and u (from N, Gamma) at run time.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "superrad/bb.hpp"
#include "superrad/bf.hpp"
#include "superrad/fb.hpp"
#include "superrad/ode.hpp"
#include "superrad/trajectory.hpp"

namespace superrad::cli {

inline constexpr int kSchemaVersion = 1;

enum class ModelKind { bb_full, bb_logistic, bb_interacting, bf, fb, exponential };

enum class Spacing { linear, log };

struct TimeGrid {
    double t_end = 1.0;
    std::size_t n_samples = 201;
    Spacing spacing = Spacing::linear;
    std::optional<double> t_first;  // first positive sample for log spacing

    std::vector<double> samples() const;
};

// Single-rate reference N (1 - exp(-rate t)), used for no-cooperativity curves.
struct ExponentialParams {
    double n_total = 1.0;
    double rate = 1.0;
};

struct ScenarioConfig {
    ModelKind model = ModelKind::bb_logistic;
    bb::BBParams bb;
    std::optional<double> bb_omega;  // derived input, resolved into bb.g
    std::optional<double> bb_eta;    // derived input, resolved into bb.u
    bf::BFParams bf;
    bool fast_neutrino = false;
    fb::FBParams fb;
    fb::Form fb_form = fb::Form::pair;
    ExponentialParams exponential;

    TimeGrid time;
    ode::IntegratorConfig integrator;
    std::vector<std::string> outputs;
    std::string output_path = "trajectory.csv";

    std::string sweep_param;
    std::vector<double> sweep_values;
};

const char* to_string(ModelKind m);

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
// Applies one key; throws ConfigInvalid naming `key`.
void set_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);
// Resolves derived inputs (omega, eta) into primary parameters.
ScenarioConfig resolved(const ScenarioConfig& cfg);
// Throws ConfigInvalid with the offending field path.
void validate(const ScenarioConfig& cfg);
// Canonical text of a resolved config; parse_config(to_text(c)) reproduces c.
std::string to_text(const ScenarioConfig& cfg);

std::vector<std::string> model_keys(ModelKind m);
std::vector<std::string> observables(const ScenarioConfig& cfg);
bool is_numeric_key(const ScenarioConfig& cfg, const std::string& key);

// Simulates without touching the filesystem. Kernel failures are rethrown as
// IntegrationFailed.
Trajectory simulate(const ScenarioConfig& cfg);

struct RunOutput {
    Trajectory trajectory;
    std::filesystem::path csv;
    std::filesystem::path metadata;
};

// Validates, simulates, writes <out_dir>/<output_path> and its .json sidecar.
// `extra_metadata` entries are merged into the sidecar.
RunOutput run(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
              const nlohmann::json& extra_metadata = nlohmann::json::object());

// Rebuilds the config recorded in a sidecar.
ScenarioConfig config_from_metadata(const nlohmann::json& metadata);

// Derived scalars used by sweeps: NaN where not applicable or not reached.
struct Summary {
    double t_50 = 0.0;
    double sharpness = 0.0;
    double residual = 0.0;
    double plateau_metric = 0.0;
    double inflection_frac = 0.0;
    double max_drift = 0.0;
};
Summary summarize(const ScenarioConfig& cfg, const Trajectory& traj);

struct SweepOutput {
    std::vector<RunOutput> runs;  // ordered as sweep_values
    std::vector<Summary> summaries;
    std::filesystem::path summary_csv;
};

// One run per value of cfg.sweep_param, executed on up to `jobs` threads.
SweepOutput sweep(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, unsigned jobs = 1);

enum class Figure { fig1, fig2, fig3, figfb };
std::optional<Figure> parse_figure(const std::string& name);
const char* to_string(Figure f);

struct FigureCurve {
    std::string label;
    ScenarioConfig config;
    bool legend_unavailable = false;
};

// Curve definitions for one figure (no I/O).
std::vector<FigureCurve> figure_curves(Figure f);
// Writes one CSV + sidecar per curve under <out_dir>/<figure>/.
std::vector<RunOutput> reproduce_figure(Figure f, const std::filesystem::path& out_dir, unsigned jobs = 1);

}  // namespace superrad::cli
