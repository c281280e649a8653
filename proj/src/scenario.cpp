#include "superrad/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "superrad/error.hpp"

namespace superrad::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [p, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || p != last || !std::isfinite(out)) throw ConfigInvalid(key, "expected a finite number, got '" + v + "'");
    return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
    double d = to_double(key, v);
    if (d < 0 || std::floor(d) != d || d > 1e15) throw ConfigInvalid(key, "expected a non-negative integer, got '" + v + "'");
    return static_cast<std::size_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigInvalid(key, "expected true or false, got '" + v + "'");
}

std::vector<std::string> to_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& s : to_list(v)) out.push_back(to_double(key, s));
    return out;
}

std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + xs[i];
    return out;
}

std::string join(const std::vector<double>& xs) {
    std::vector<std::string> s;
    for (double x : xs) s.push_back(format_real(x));
    return join(s);
}

bool is_bb(ModelKind m) { return m == ModelKind::bb_full || m == ModelKind::bb_logistic || m == ModelKind::bb_interacting; }

std::optional<ModelKind> parse_model(const std::string& s) {
    static const std::map<std::string, ModelKind> names{{"bb_full", ModelKind::bb_full},
                                                        {"bb_logistic", ModelKind::bb_logistic},
                                                        {"bb_interacting", ModelKind::bb_interacting},
                                                        {"bf", ModelKind::bf},
                                                        {"fb", ModelKind::fb},
                                                        {"exponential", ModelKind::exponential}};
    auto it = names.find(s);
    if (it == names.end()) return std::nullopt;
    return it->second;
}

void set_param(ScenarioConfig& c, const std::string& key, const std::string& name, const std::string& v) {
    if (is_bb(c.model)) {
        auto& p = c.bb;
        if (name == "n_total") p.n_total = to_double(key, v);
        else if (name == "g") p.g = to_double(key, v);
        else if (name == "g_phase") p.g_phase = to_double(key, v);
        else if (name == "delta") p.delta = to_double(key, v);
        else if (name == "gamma_cap") p.gamma_cap = to_double(key, v);
        else if (name == "u") p.u = to_double(key, v);
        else if (name == "eps_a") p.eps_a = to_double(key, v);
        else if (name == "eps_b") p.eps_b = to_double(key, v);
        else if (name == "e_nu") p.e_nu = to_double(key, v);
        else if (name == "omega") c.bb_omega = to_double(key, v);
        else if (name == "eta") c.bb_eta = to_double(key, v);
        else throw ConfigInvalid(key, "unknown parameter for model " + std::string(to_string(c.model)));
        return;
    }
    switch (c.model) {
        case ModelKind::bf: {
            auto& p = c.bf;
            if (name == "n_total") p.n_total = to_double(key, v);
            else if (name == "alpha") p.alpha = to_count(key, v);
            else if (name == "n_levels") p.n_levels = to_count(key, v);
            else if (name == "g_alpha") p.g_alpha = to_double(key, v);
            else if (name == "gamma_th") p.gamma_th = to_double(key, v);
            else if (name == "gamma_cap") p.gamma_cap = to_double(key, v);
            else if (name == "gamma_profile") p.gamma_profile = to_doubles(key, v);
            else if (name == "e_a") p.e_a = to_double(key, v);
            else if (name == "e_levels") p.e_levels = to_doubles(key, v);
            else if (name == "e_nu") p.e_nu = to_double(key, v);
            else if (name == "fast_neutrino") c.fast_neutrino = to_bool(key, v);
            else throw ConfigInvalid(key, "unknown parameter for model bf");
            return;
        }
        case ModelKind::fb: {
            auto& p = c.fb;
            if (name == "n_total") p.n_total = to_double(key, v);
            else if (name == "gamma_decay") p.gamma_decay = to_double(key, v);
            else if (name == "gamma_phi_a") p.gamma_phi_a = to_double(key, v);
            else if (name == "gamma_phi_b") p.gamma_phi_b = to_double(key, v);
            else if (name == "e_a") p.e_a = to_double(key, v);
            else if (name == "e_b") p.e_b = to_double(key, v);
            else if (name == "form") {
                if (v == "pair") c.fb_form = fb::Form::pair;
                else if (v == "reduced") c.fb_form = fb::Form::reduced;
                else throw ConfigInvalid(key, "expected pair or reduced");
            } else throw ConfigInvalid(key, "unknown parameter for model fb");
            return;
        }
        case ModelKind::exponential:
            if (name == "n_total") c.exponential.n_total = to_double(key, v);
            else if (name == "rate") c.exponential.rate = to_double(key, v);
            else throw ConfigInvalid(key, "unknown parameter for model exponential");
            return;
        default:
            throw ConfigInvalid(key, "unknown parameter");
    }
}

Trajectory exponential_trajectory(const ExponentialParams& p, const std::vector<double>& times) {
    Trajectory traj;
    traj.times = times;
    std::vector<double> frac, rate, nb;
    for (double t : times) {
        double f = -std::expm1(-p.rate * t);
        frac.push_back(f);
        rate.push_back(p.rate * std::exp(-p.rate * t));
        nb.push_back(p.n_total * f);
    }
    traj.add_column("n_b_frac", std::move(frac));
    traj.add_column("n_b_frac_rate", std::move(rate));
    traj.add_column("n_b", std::move(nb));
    traj.metadata["model"] = "exponential";
    traj.metadata["params"] = {{"n_total", p.n_total}, {"rate", p.rate}};
    traj.metadata["max_conservation_drift"] = 0.0;
    for (double f : kCrossingFractions) {
        double t = p.rate > 0 ? -std::log1p(-f) / p.rate : kNaN;
        record_crossing(traj, "n_b_frac", f, t <= times.back() ? t : kNaN);
    }
    return traj;
}

const char* method_name(ode::Method m) {
    return m == ode::Method::fixed_rk4 ? "fixed_rk4" : "adaptive_embedded_rk";
}

double crossing_or_nan(const Trajectory& t, const char* value, const char* rate, double thr) {
    try {
        return crossing_time(t, value, rate, thr);
    } catch (const NoCrossing&) {
        return kNaN;
    }
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    std::vector<std::exception_ptr> errors(n);
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<double> TimeGrid::samples() const {
    if (spacing == Spacing::linear) return ode::linear_grid(0.0, t_end, n_samples);
    return ode::log_grid(0.0, t_first.value_or(t_end * 1e-6), t_end, n_samples);
}

const char* to_string(ModelKind m) {
    switch (m) {
        case ModelKind::bb_full: return "bb_full";
        case ModelKind::bb_logistic: return "bb_logistic";
        case ModelKind::bb_interacting: return "bb_interacting";
        case ModelKind::bf: return "bf";
        case ModelKind::fb: return "fb";
        case ModelKind::exponential: return "exponential";
    }
    return "?";
}

std::vector<std::string> model_keys(ModelKind m) {
    if (is_bb(m))
        return {"n_total", "g", "g_phase", "delta", "gamma_cap", "u", "eps_a", "eps_b", "e_nu", "omega", "eta"};
    switch (m) {
        case ModelKind::bf:
            return {"n_total", "alpha", "n_levels", "g_alpha", "gamma_th", "gamma_cap", "gamma_profile",
                    "e_a", "e_levels", "e_nu", "fast_neutrino"};
        case ModelKind::fb: return {"n_total", "gamma_decay", "gamma_phi_a", "gamma_phi_b", "e_a", "e_b", "form"};
        case ModelKind::exponential: return {"n_total", "rate"};
        default: return {};
    }
}

bool is_numeric_key(const ScenarioConfig& cfg, const std::string& key) {
    static const std::vector<std::string> top{"time.t_end", "time.t_first", "integrator.rel_tol",
                                              "integrator.abs_tol", "integrator.initial_step",
                                              "integrator.max_step", "integrator.min_step"};
    if (std::find(top.begin(), top.end(), key) != top.end()) return true;
    if (key.rfind("params.", 0) != 0) return false;
    const std::string name = key.substr(7);
    static const std::vector<std::string> non_numeric{"gamma_profile", "e_levels", "fast_neutrino", "form"};
    if (std::find(non_numeric.begin(), non_numeric.end(), name) != non_numeric.end()) return false;
    auto keys = model_keys(cfg.model);
    return std::find(keys.begin(), keys.end(), name) != keys.end();
}

void set_value(ScenarioConfig& c, const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (key == "schema_version") {
        if (to_count(key, v) != static_cast<std::size_t>(kSchemaVersion))
            throw ConfigInvalid(key, "unsupported schema version " + v);
    } else if (key == "model") {
        auto m = parse_model(v);
        if (!m) throw ConfigInvalid(key, "unknown model '" + v + "'");
        c.model = *m;
    } else if (key == "output_path") {
        c.output_path = v;
    } else if (key == "outputs") {
        c.outputs = to_list(v);
    } else if (key == "time.t_end") {
        c.time.t_end = to_double(key, v);
    } else if (key == "time.n_samples") {
        c.time.n_samples = to_count(key, v);
    } else if (key == "time.spacing") {
        if (v == "linear") c.time.spacing = Spacing::linear;
        else if (v == "log") c.time.spacing = Spacing::log;
        else throw ConfigInvalid(key, "expected linear or log");
    } else if (key == "time.t_first") {
        c.time.t_first = to_double(key, v);
    } else if (key == "integrator.method") {
        if (v == "fixed_rk4") c.integrator.method = ode::Method::fixed_rk4;
        else if (v == "adaptive_embedded_rk") c.integrator.method = ode::Method::adaptive_embedded_rk;
        else throw ConfigInvalid(key, "expected fixed_rk4 or adaptive_embedded_rk");
    } else if (key == "integrator.rel_tol") {
        c.integrator.rel_tol = to_double(key, v);
    } else if (key == "integrator.abs_tol") {
        c.integrator.abs_tol = to_double(key, v);
    } else if (key == "integrator.initial_step") {
        c.integrator.initial_step = to_double(key, v);
    } else if (key == "integrator.max_step") {
        c.integrator.max_step = to_double(key, v);
    } else if (key == "integrator.min_step") {
        c.integrator.min_step = to_double(key, v);
    } else if (key == "integrator.max_steps") {
        c.integrator.max_steps = to_count(key, v);
    } else if (key == "sweep.param") {
        c.sweep_param = v;
    } else if (key == "sweep.values") {
        c.sweep_values = to_doubles(key, v);
    } else if (key.rfind("params.", 0) == 0) {
        set_param(c, key, key.substr(7), v);
    } else {
        throw ConfigInvalid(key, "unknown key");
    }
}

ScenarioConfig parse_config(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigInvalid("line " + std::to_string(lineno), "expected 'key = value'");
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    ScenarioConfig cfg;
    // The model decides which params.* keys exist, so apply it first.
    bool have_model = false;
    for (const auto& [k, v] : entries)
        if (k == "model") {
            set_value(cfg, k, v);
            have_model = true;
        }
    if (!have_model) throw ConfigInvalid("model", "missing");
    for (const auto& [k, v] : entries)
        if (k != "model") set_value(cfg, k, v);
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigInvalid("--config", "cannot read " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

ScenarioConfig resolved(const ScenarioConfig& cfg) {
    ScenarioConfig c = cfg;
    if (is_bb(c.model)) {
        auto& p = c.bb;
        if (c.bb_omega) {
            if (!(*c.bb_omega >= 0)) throw ConfigInvalid("params.omega", "must be >= 0");
            if (!(p.gamma_cap > 0)) throw ConfigInvalid("params.gamma_cap", "must be > 0");
            p.g = std::sqrt(*c.bb_omega * (p.delta * p.delta + p.gamma_cap * p.gamma_cap) / (2.0 * p.gamma_cap));
            c.bb_omega.reset();
        }
        if (c.bb_eta) {
            if (!(*c.bb_eta >= 0)) throw ConfigInvalid("params.eta", "must be >= 0");
            p.u = std::sqrt(*c.bb_eta) * p.gamma_cap / p.n_total;
            c.bb_eta.reset();
        }
    }
    return c;
}

std::vector<std::string> observables(const ScenarioConfig& cfg) {
    switch (cfg.model) {
        case ModelKind::bb_full:
            return {"n_b_frac", "n_b_frac_rate", "n_b", "n_b_rate", "n_a", "n_c", "s_re", "s_im"};
        case ModelKind::bb_logistic:
        case ModelKind::bb_interacting: return {"n_b_frac", "n_b_frac_rate", "n_b", "n_b_rate"};
        case ModelKind::bf: {
            std::vector<std::string> out{"n_a", "decayed_frac", "decayed_frac_rate", "decay_rate", "n_c", "gamma_t"};
            for (std::size_t k = 0; k < cfg.bf.levels(); ++k) out.push_back("n_k." + std::to_string(k));
            return out;
        }
        case ModelKind::fb: return {"n_b_frac", "n_b_frac_rate", "n_b", "n_a", "t_gamma_n2"};
        case ModelKind::exponential: return {"n_b_frac", "n_b_frac_rate", "n_b"};
    }
    return {};
}

void validate(const ScenarioConfig& raw) {
    ScenarioConfig cfg = resolved(raw);
    if (cfg.time.n_samples < 2) throw ConfigInvalid("time.n_samples", "must be >= 2");
    if (!(cfg.time.t_end > 0)) throw ConfigInvalid("time.t_end", "must be > 0");
    if (cfg.time.spacing == Spacing::log && cfg.time.t_first &&
        !(*cfg.time.t_first > 0 && *cfg.time.t_first < cfg.time.t_end))
        throw ConfigInvalid("time.t_first", "must lie in (0, t_end)");
    if (cfg.output_path.empty()) throw ConfigInvalid("output_path", "must not be empty");
    try {
        cfg.integrator.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigInvalid("integrator", e.what());
    }
    auto names = observables(cfg);
    for (const auto& o : cfg.outputs)
        if (std::find(names.begin(), names.end(), o) == names.end())
            throw ConfigInvalid("outputs", "unknown observable '" + o + "' for model " + to_string(cfg.model));
    try {
        if (is_bb(cfg.model)) cfg.bb.validate();
        else if (cfg.model == ModelKind::bf) cfg.bf.validate();
        else if (cfg.model == ModelKind::fb) cfg.fb.validate();
        else if (!(cfg.exponential.n_total >= 1 && cfg.exponential.rate >= 0))
            throw std::invalid_argument("exponential: need n_total >= 1 and rate >= 0");
    } catch (const std::invalid_argument& e) {
        throw ConfigInvalid("params", e.what());
    }
}

std::string to_text(const ScenarioConfig& raw) {
    ScenarioConfig c = resolved(raw);
    std::ostringstream os;
    auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
    auto num = [&](const std::string& k, double v) { kv(k, format_real(v)); };
    kv("schema_version", std::to_string(kSchemaVersion));
    kv("model", to_string(c.model));
    if (is_bb(c.model)) {
        num("params.n_total", c.bb.n_total);
        num("params.g", c.bb.g);
        num("params.g_phase", c.bb.g_phase);
        num("params.delta", c.bb.delta);
        num("params.gamma_cap", c.bb.gamma_cap);
        num("params.u", c.bb.u);
        if (c.bb.eps_a) num("params.eps_a", *c.bb.eps_a);
        if (c.bb.eps_b) num("params.eps_b", *c.bb.eps_b);
        if (c.bb.e_nu) num("params.e_nu", *c.bb.e_nu);
    } else if (c.model == ModelKind::bf) {
        num("params.n_total", c.bf.n_total);
        kv("params.alpha", std::to_string(c.bf.alpha));
        kv("params.n_levels", std::to_string(c.bf.n_levels));
        num("params.g_alpha", c.bf.g_alpha);
        num("params.gamma_th", c.bf.gamma_th);
        num("params.gamma_cap", c.bf.gamma_cap);
        if (!c.bf.gamma_profile.empty()) kv("params.gamma_profile", join(c.bf.gamma_profile));
        num("params.e_a", c.bf.e_a);
        if (!c.bf.e_levels.empty()) kv("params.e_levels", join(c.bf.e_levels));
        num("params.e_nu", c.bf.e_nu);
        kv("params.fast_neutrino", c.fast_neutrino ? "true" : "false");
    } else if (c.model == ModelKind::fb) {
        num("params.n_total", c.fb.n_total);
        num("params.gamma_decay", c.fb.gamma_decay);
        num("params.gamma_phi_a", c.fb.gamma_phi_a);
        num("params.gamma_phi_b", c.fb.gamma_phi_b);
        num("params.e_a", c.fb.e_a);
        num("params.e_b", c.fb.e_b);
        kv("params.form", fb::to_string(c.fb_form));
    } else {
        num("params.n_total", c.exponential.n_total);
        num("params.rate", c.exponential.rate);
    }
    num("time.t_end", c.time.t_end);
    kv("time.n_samples", std::to_string(c.time.n_samples));
    kv("time.spacing", c.time.spacing == Spacing::linear ? "linear" : "log");
    if (c.time.t_first) num("time.t_first", *c.time.t_first);
    kv("integrator.method", method_name(c.integrator.method));
    num("integrator.rel_tol", c.integrator.rel_tol);
    num("integrator.abs_tol", c.integrator.abs_tol);
    num("integrator.initial_step", c.integrator.initial_step);
    num("integrator.max_step", c.integrator.max_step);
    num("integrator.min_step", c.integrator.min_step);
    kv("integrator.max_steps", std::to_string(c.integrator.max_steps));
    if (!c.outputs.empty()) kv("outputs", join(c.outputs));
    kv("output_path", c.output_path);
    if (!c.sweep_param.empty()) kv("sweep.param", c.sweep_param);
    if (!c.sweep_values.empty()) kv("sweep.values", join(c.sweep_values));
    return os.str();
}

Trajectory simulate(const ScenarioConfig& raw) {
    validate(raw);
    ScenarioConfig cfg = resolved(raw);
    const std::vector<double> times = cfg.time.samples();
    try {
        switch (cfg.model) {
            case ModelKind::bb_full: return bb::bb_simulate(cfg.bb, bb::Variant::full, times, cfg.integrator);
            case ModelKind::bb_logistic: return bb::bb_simulate(cfg.bb, bb::Variant::logistic, times, cfg.integrator);
            case ModelKind::bb_interacting:
                return bb::bb_simulate(cfg.bb, bb::Variant::interacting, times, cfg.integrator);
            case ModelKind::bf: return bf::bf_simulate(cfg.bf, times, cfg.fast_neutrino, cfg.integrator);
            case ModelKind::fb: return fb::fb_simulate(cfg.fb, times, cfg.fb_form, cfg.integrator);
            case ModelKind::exponential: return exponential_trajectory(cfg.exponential, times);
        }
    } catch (const ConfigInvalid&) {
        throw;
    } catch (const Error& e) {
        throw IntegrationFailed(std::string(to_string(cfg.model)) + ": " + e.what());
    }
    throw ConfigInvalid("model", "unhandled model");
}

RunOutput run(const ScenarioConfig& raw, const std::filesystem::path& out_dir, const nlohmann::json& extra) {
    ScenarioConfig cfg = resolved(raw);
    Trajectory full = simulate(cfg);

    RunOutput out;
    out.trajectory.times = full.times;
    const auto names = cfg.outputs.empty() ? full.column_names() : cfg.outputs;
    for (const auto& n : names) out.trajectory.add_column(n, full.column(n));

    nlohmann::json meta = full.metadata;
    meta["schema_version"] = kSchemaVersion;
    meta["tool_version"] = kToolVersion;
    meta["scenario_model"] = to_string(cfg.model);
    meta["integrator"] = {{"method", method_name(cfg.integrator.method)},
                          {"rel_tol", cfg.integrator.rel_tol},
                          {"abs_tol", cfg.integrator.abs_tol},
                          {"initial_step", cfg.integrator.initial_step},
                          {"max_step", cfg.integrator.max_step},
                          {"min_step", cfg.integrator.min_step},
                          {"max_steps", cfg.integrator.max_steps}};
    meta["time_grid"] = {{"t_end", cfg.time.t_end},
                         {"n_samples", cfg.time.n_samples},
                         {"spacing", cfg.time.spacing == Spacing::linear ? "linear" : "log"}};
    meta["columns"] = names;
    meta["seed"] = nullptr;
    meta["legend_unavailable"] = false;
    meta["config_text"] = to_text(cfg);
    for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
    out.trajectory.metadata = meta;

    out.csv = out_dir / cfg.output_path;
    out.metadata = out.csv;
    out.metadata.replace_extension(".json");
    write_csv(out.trajectory, out.csv);
    write_metadata(out.trajectory, out.metadata);
    return out;
}

ScenarioConfig config_from_metadata(const nlohmann::json& metadata) {
    if (!metadata.contains("config_text")) throw ConfigInvalid("config_text", "missing from metadata");
    return parse_config(metadata.at("config_text").get<std::string>());
}

Summary summarize(const ScenarioConfig& raw, const Trajectory& traj) {
    ScenarioConfig cfg = resolved(raw);
    Summary s{kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
    if (traj.metadata.contains("max_conservation_drift"))
        s.max_drift = traj.metadata.at("max_conservation_drift").get<double>();

    auto frac_stats = [&](double n_total) {
        const auto& f = traj.column("n_b_frac");
        s.t_50 = crossing_or_nan(traj, "n_b_frac", "n_b_frac_rate", 0.5);
        try {
            s.sharpness = fb::fb_sharpness(traj);
        } catch (const Error&) {
        }
        s.residual = n_total * (1.0 - f.back());
    };

    if (is_bb(cfg.model)) {
        frac_stats(cfg.bb.n_total);
        auto variant = cfg.model == ModelKind::bb_full        ? bb::Variant::full
                       : cfg.model == ModelKind::bb_logistic ? bb::Variant::logistic
                                                              : bb::Variant::interacting;
        s.inflection_frac = bb::bb_inflection_fraction(traj, cfg.bb, variant);
    } else if (cfg.model == ModelKind::bf) {
        s.t_50 = crossing_or_nan(traj, "decayed_frac", "decayed_frac_rate", 0.5);
        s.residual = traj.column("n_a").back();
        try {
            s.plateau_metric = bf::bf_plateau_metric(traj);
        } catch (const Error&) {
        }
    } else if (cfg.model == ModelKind::fb) {
        frac_stats(cfg.fb.n_total);
    } else {
        frac_stats(cfg.exponential.n_total);
    }
    return s;
}

SweepOutput sweep(const ScenarioConfig& raw, const std::filesystem::path& out_dir, unsigned jobs) {
    if (raw.sweep_param.empty()) throw ConfigInvalid("sweep.param", "missing");
    if (!is_numeric_key(raw, raw.sweep_param))
        throw ConfigInvalid("sweep.param", "'" + raw.sweep_param + "' is not a numeric field of model " + to_string(raw.model));
    if (raw.sweep_values.empty()) throw ConfigInvalid("sweep.values", "empty value list");

    std::vector<ScenarioConfig> configs;
    const std::filesystem::path base(raw.output_path);
    const std::string stem = base.stem().string();
    for (std::size_t i = 0; i < raw.sweep_values.size(); ++i) {
        ScenarioConfig c = raw;
        set_value(c, raw.sweep_param, format_real(raw.sweep_values[i]));
        c.sweep_param.clear();
        c.sweep_values.clear();
        char idx[16];
        std::snprintf(idx, sizeof idx, "%03zu", i);
        c.output_path = (base.parent_path() / (stem + "_" + idx + ".csv")).string();
        validate(c);
        configs.push_back(std::move(c));
    }

    SweepOutput out;
    out.runs.resize(configs.size());
    out.summaries.resize(configs.size());
    parallel_for(configs.size(), jobs, [&](std::size_t i) {
        nlohmann::json extra = {{"sweep", {{"param", raw.sweep_param}, {"value", raw.sweep_values[i]}, {"index", i}}}};
        out.runs[i] = run(configs[i], out_dir, extra);
        out.summaries[i] = summarize(configs[i], simulate(configs[i]));
    });

    out.summary_csv = out_dir / base.parent_path() / (stem + "_summary.csv");
    if (out.summary_csv.has_parent_path()) std::filesystem::create_directories(out.summary_csv.parent_path());
    std::ofstream os(out.summary_csv, std::ios::binary);
    os << "value,t_50,sharpness,residual,plateau_metric,inflection_frac,max_drift\n";
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto& s = out.summaries[i];
        os << format_real(raw.sweep_values[i]) << ',' << format_real(s.t_50) << ',' << format_real(s.sharpness) << ','
           << format_real(s.residual) << ',' << format_real(s.plateau_metric) << ','
           << format_real(s.inflection_frac) << ',' << format_real(s.max_drift) << '\n';
    }
    if (!os) throw std::runtime_error("write failed: " + out.summary_csv.string());
    return out;
}

}  // namespace superrad::cli
