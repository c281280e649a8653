#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <thread>

#include "superrad/error.hpp"
#include "superrad/scenario.hpp"

namespace superrad::cli {

namespace {

TimeGrid log_time(double t_first, double t_end, std::size_t n) {
    TimeGrid g;
    g.t_end = t_end;
    g.n_samples = n;
    g.spacing = Spacing::log;
    g.t_first = t_first;
    return g;
}

ScenarioConfig bb_reduced(ModelKind model, double n_total, double eta) {
    ScenarioConfig c;
    c.model = model;
    c.bb.n_total = n_total;
    c.bb.delta = 0.0;
    c.bb.gamma_cap = 1.0;
    c.bb_omega = 1.0;
    if (model == ModelKind::bb_interacting) c.bb_eta = eta;
    c.time = log_time(1e-8, 10.0, 401);
    c.integrator.rel_tol = 1e-10;
    c.integrator.abs_tol = 1e-14;
    c.integrator.initial_step = 1e-10;
    c.outputs = {"n_b_frac", "n_b_frac_rate", "n_b"};
    return c;
}

std::string label_of(double x) {
    return format_real(x);
}

}  // namespace

std::optional<Figure> parse_figure(const std::string& name) {
    static const std::map<std::string, Figure> names{
        {"fig1", Figure::fig1}, {"fig2", Figure::fig2}, {"fig3", Figure::fig3}, {"figfb", Figure::figfb}};
    auto it = names.find(name);
    if (it == names.end()) return std::nullopt;
    return it->second;
}

const char* to_string(Figure f) {
    switch (f) {
        case Figure::fig1: return "fig1";
        case Figure::fig2: return "fig2";
        case Figure::fig3: return "fig3";
        case Figure::figfb: return "figfb";
    }
    return "?";
}

std::vector<FigureCurve> figure_curves(Figure f) {
    std::vector<FigureCurve> out;
    switch (f) {
        case Figure::fig1: {
            // Legend values are not stated with the figure; a decade ladder stands in.
            for (double n : {1.0, 10.0, 1e2, 1e3, 1e4, 1e5}) {
                auto c = bb_reduced(ModelKind::bb_logistic, n, 0.0);
                c.output_path = "fig1_N" + label_of(n) + ".csv";
                out.push_back({"N=" + label_of(n), c, true});
            }
            ScenarioConfig ref;
            ref.model = ModelKind::exponential;
            ref.exponential = {1.0, 1.0};
            ref.time = log_time(1e-8, 10.0, 401);
            ref.output_path = "fig1_no_superradiance.csv";
            out.push_back({"no superradiance", ref, false});
            break;
        }
        case Figure::fig2:
            for (double eta : {0.0, 1.0, 1e2, 1e4}) {
                auto c = bb_reduced(ModelKind::bb_interacting, 1e5, eta);
                c.output_path = "fig2_eta" + label_of(eta) + ".csv";
                out.push_back({"eta=" + label_of(eta), c, false});
            }
            break;
        case Figure::fig3: {
            const std::pair<const char*, double> rows[] = {{"upper", 1.0}, {"middle", 0.1}, {"lower", 0.01}};
            for (const auto& [pos, g] : rows) {
                ScenarioConfig c;
                c.model = ModelKind::bf;
                c.bf.n_total = 100;
                c.bf.alpha = 80;
                c.bf.g_alpha = g;
                c.bf.gamma_th = 1.0;
                c.bf.gamma_cap = 1.0;
                c.fast_neutrino = true;
                c.time = log_time(1e-3, 1e3, 601);
                c.output_path = std::string("fig3_") + pos + ".csv";
                out.push_back({std::string(pos) + " g/gamma=" + label_of(g), c, false});
            }
            ScenarioConfig ref;
            ref.model = ModelKind::exponential;
            ref.exponential = {100.0, 1.0};
            ref.time = log_time(1e-3, 1e3, 601);
            ref.output_path = "fig3_exponential_reference.csv";
            out.push_back({"exponential reference", ref, false});
            break;
        }
        case Figure::figfb:
            for (double n : {1e2, 1e3, 1e4}) {
                ScenarioConfig c;
                c.model = ModelKind::fb;
                c.fb.n_total = n;
                c.fb.gamma_decay = 1.0;
                c.time = log_time(1e-8, 0.1, 601);
                c.integrator.initial_step = 1e-10;
                c.output_path = "figfb_N" + label_of(n) + ".csv";
                out.push_back({"N=" + label_of(n), c, true});
            }
            break;
    }
    return out;
}

std::vector<RunOutput> reproduce_figure(Figure f, const std::filesystem::path& out_dir, unsigned jobs) {
    const auto curves = figure_curves(f);
    std::vector<RunOutput> out(curves.size());
    std::vector<std::exception_ptr> errors(curves.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < curves.size(); i = next++) {
            try {
                nlohmann::json extra = {{"figure", to_string(f)},
                                        {"curve", curves[i].label},
                                        {"legend_unavailable", curves[i].legend_unavailable}};
                out[i] = run(curves[i].config, out_dir / to_string(f), extra);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(curves.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < jobs; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace superrad::cli
