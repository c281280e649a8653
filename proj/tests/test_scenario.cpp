#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "superrad/error.hpp"
#include "superrad/scenario.hpp"

using namespace superrad;
using namespace superrad::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "superrad_test_scenario" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string field_of(const std::string& text) {
    try {
        validate(parse_config(text));
    } catch (const ConfigInvalid& e) {
        return e.field();
    }
    return "";
}

const char* kLogistic = R"(# logistic run
model = bb_logistic
params.n_total = 100
params.omega = 1      # resolved into g
time.t_end = 1
time.n_samples = 101
outputs = n_b_frac, n_b_frac_rate
output_path = logistic.csv
)";

}  // namespace

TEST_CASE("config parsing and derived inputs") {
    auto cfg = parse_config(kLogistic);
    CHECK(cfg.model == ModelKind::bb_logistic);
    CHECK(cfg.outputs == std::vector<std::string>{"n_b_frac", "n_b_frac_rate"});
    auto r = resolved(cfg);
    CHECK(bb::bb_omega(r.bb) == doctest::Approx(1.0).epsilon(1e-15));

    auto eta = parse_config("model = bb_interacting\nparams.n_total = 1000\nparams.gamma_cap = 2\nparams.eta = 25\n");
    CHECK(bb::bb_eta(resolved(eta).bb) == doctest::Approx(25.0).epsilon(1e-14));

    // Canonical text round-trips.
    auto again = parse_config(to_text(cfg));
    CHECK(to_text(again) == to_text(cfg));
}

TEST_CASE("config errors name the offending field") {
    CHECK(field_of("model = bb_logistic\nparams.bogus = 1\n") == "params.bogus");
    CHECK(field_of("model = bb_logistic\ntime.n_samples = 1\n") == "time.n_samples");
    CHECK(field_of("model = bb_logistic\ntime.n_samples = many\n") == "time.n_samples");
    CHECK(field_of("model = bb_logistic\noutputs = n_b_frac, n_k.3\n") == "outputs");
    CHECK(field_of("model = fb\nparams.n_total = 7\n") == "params");
    CHECK(field_of("model = quantum_foam\n") == "model");
    CHECK(field_of("params.n_total = 3\n") == "model");
    CHECK(field_of("model = bf\nnonsense line\n") == "line 2");
    CHECK(field_of("model = bf\ntime.spacing = log\ntime.t_first = 5\ntime.t_end = 1\n") == "time.t_first");
    CHECK(field_of("model = bf\nintegrator.rel_tol = -1\n") == "integrator");
    CHECK(field_of("model = bf\nschema_version = 9\n") == "schema_version");
}

TEST_CASE("observables per model") {
    ScenarioConfig c;
    c.model = ModelKind::bf;
    c.bf.alpha = 3;
    auto obs = observables(c);
    CHECK(std::find(obs.begin(), obs.end(), "n_k.3") != obs.end());
    CHECK(std::find(obs.begin(), obs.end(), "n_k.4") == obs.end());
    CHECK(is_numeric_key(c, "params.g_alpha"));
    CHECK_FALSE(is_numeric_key(c, "params.fast_neutrino"));
    CHECK_FALSE(is_numeric_key(c, "params.omega"));
    CHECK(is_numeric_key(c, "time.t_end"));
}

TEST_CASE("run: logistic saturates, files round-trip and regenerate") {
    auto dir = scratch("run");
    auto out = run(parse_config(kLogistic), dir);
    CHECK(std::filesystem::exists(out.csv));
    CHECK(std::filesystem::exists(out.metadata));
    auto back = read_csv(out.csv);
    CHECK(std::abs(back.column("n_b_frac").back() - 1.0) <= 1e-8);
    CHECK(back.times == out.trajectory.times);
    for (const auto& n : out.trajectory.column_names()) CHECK(back.column(n) == out.trajectory.column(n));
    CHECK(back.metadata == out.trajectory.metadata);

    const auto& meta = out.trajectory.metadata;
    for (const char* key : {"model", "params", "integrator", "time_grid", "max_conservation_drift", "seed",
                            "tool_version", "legend_unavailable", "config_text", "schema_version"})
        CHECK(meta.contains(key));

    // Regenerate from the sidecar alone into a second directory.
    auto dir2 = scratch("regen");
    auto cfg2 = config_from_metadata(read_metadata(out.metadata));
    auto out2 = run(cfg2, dir2);
    CHECK(slurp(out2.csv) == slurp(out.csv));
    CHECK(slurp(out2.metadata) == slurp(out.metadata));
}

TEST_CASE("run: bf residual population") {
    auto cfg = parse_config(R"(model = bf
params.n_total = 100
params.alpha = 80
params.g_alpha = 1
params.gamma_th = 1
params.fast_neutrino = true
time.t_end = 1000
time.n_samples = 301
time.spacing = log
time.t_first = 1e-3
outputs = n_a, decayed_frac
output_path = bf.csv
)");
    auto out = run(cfg, scratch("bf"));
    double na = read_csv(out.csv).column("n_a").back();
    // Exact fixed point is 19; allow integrator roundoff at the conservation tolerance.
    CHECK(na >= 19.0 - 1e-8 * 100);
    CHECK(na <= 21.0);
}

TEST_CASE("integration failures are reported as IntegrationFailed") {
    auto cfg = parse_config("model = fb\nparams.n_total = 1000\ntime.t_end = 0.01\nintegrator.max_steps = 5\n");
    CHECK_THROWS_AS(simulate(cfg), IntegrationFailed);
}

TEST_CASE("exponential reference model") {
    auto cfg = parse_config("model = exponential\nparams.n_total = 10\nparams.rate = 2\ntime.t_end = 3\n");
    auto t = simulate(cfg);
    for (std::size_t i = 0; i < t.size(); ++i)
        CHECK(t.column("n_b_frac")[i] == doctest::Approx(1.0 - std::exp(-2.0 * t.times[i])));
}

TEST_CASE("figure curve sets") {
    auto fig3 = figure_curves(Figure::fig3);
    REQUIRE(fig3.size() == 4);
    CHECK(fig3[0].config.bf.g_alpha == 1.0);
    CHECK(fig3[1].config.bf.g_alpha == 0.1);
    CHECK(fig3[2].config.bf.g_alpha == 0.01);
    CHECK(fig3[3].config.model == ModelKind::exponential);
    for (const auto& c : fig3) CHECK_FALSE(c.legend_unavailable);

    for (const auto& c : figure_curves(Figure::fig1))
        if (c.config.model != ModelKind::exponential) CHECK(c.legend_unavailable);
    for (const auto& c : figure_curves(Figure::figfb)) CHECK(c.legend_unavailable);
    auto fig2 = figure_curves(Figure::fig2);
    REQUIRE(fig2.size() == 4);
    for (const auto& c : fig2) {
        CHECK(c.config.bb.n_total == 1e5);
        CHECK_FALSE(c.legend_unavailable);
    }
    CHECK(parse_figure("fig3") == Figure::fig3);
    CHECK_FALSE(parse_figure("fig9").has_value());
}

TEST_CASE("figure reproduction") {
    auto dir = scratch("figures");
    SUBCASE("fig3 early-time ordering") {
        auto runs = reproduce_figure(Figure::fig3, dir, 4);
        REQUIRE(runs.size() == 4);
        std::vector<double> early;
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& t = runs[i].trajectory;
            auto it = std::lower_bound(t.times.begin(), t.times.end(), 0.1);
            early.push_back(t.column("decayed_frac")[static_cast<std::size_t>(it - t.times.begin())]);
        }
        CHECK(early[0] > early[1]);
        CHECK(early[1] > early[2]);
        CHECK(std::filesystem::exists(dir / "fig3" / "fig3_upper.csv"));
    }
    SUBCASE("fig2 eta = 0 equals the fig1 logistic curve") {
        auto f1 = reproduce_figure(Figure::fig1, dir, 2);
        auto f2 = reproduce_figure(Figure::fig2, dir, 2);
        const auto& a = f1[5].trajectory;
        const auto& b = f2[0].trajectory;
        REQUIRE(a.times == b.times);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(std::abs(a.column("n_b_frac")[i] - b.column("n_b_frac")[i]) <= 1e-10);
        CHECK(f1[0].trajectory.metadata.at("legend_unavailable") == true);
        CHECK(f2[0].trajectory.metadata.at("legend_unavailable") == false);
    }
    SUBCASE("figfb t_50 decreases with N") {
        auto runs = reproduce_figure(Figure::figfb, dir, 3);
        double prev = INFINITY;
        for (const auto& r : runs) {
            double t50 = crossing_time(r.trajectory, "n_b_frac", "n_b_frac_rate", 0.5);
            CHECK(t50 < prev);
            prev = t50;
        }
    }
}

TEST_CASE("sweeps") {
    SUBCASE("fb over N") {
        auto cfg = parse_config(R"(model = fb
time.t_end = 0.1
time.spacing = log
time.t_first = 1e-8
time.n_samples = 401
sweep.param = params.n_total
sweep.values = 100, 1000
output_path = fbsweep.csv
)");
        auto dir = scratch("sweep_fb");
        auto out = sweep(cfg, dir, 2);
        REQUIRE(out.summaries.size() == 2);
        CHECK(out.summaries[1].t_50 < out.summaries[0].t_50);
        CHECK(std::filesystem::exists(dir / "fbsweep_000.csv"));
        CHECK(std::filesystem::exists(dir / "fbsweep_001.json"));
        auto summary = slurp(out.summary_csv);
        CHECK(summary.rfind("value,t_50,sharpness,residual,plateau_metric,inflection_frac,max_drift\n", 0) == 0);

        // Concurrency does not change the outputs.
        auto dir1 = scratch("sweep_fb_serial");
        auto serial = sweep(cfg, dir1, 1);
        CHECK(slurp(serial.summary_csv) == summary);
        CHECK(slurp(dir1 / "fbsweep_001.csv") == slurp(dir / "fbsweep_001.csv"));
    }
    SUBCASE("interacting inflection over eta") {
        auto cfg = parse_config(R"(model = bb_interacting
params.n_total = 1000
params.omega = 1
time.t_end = 0.1
time.n_samples = 401
sweep.param = params.u
sweep.values = 0, 0.0031622776601683794  # eta = 0 and 10
output_path = eta.csv
)");
        auto out = sweep(cfg, scratch("sweep_eta"), 2);
        CHECK(out.summaries[1].inflection_frac >= out.summaries[0].inflection_frac);
    }
    SUBCASE("invalid sweeps") {
        auto cfg = parse_config("model = fb\nsweep.param = params.n_total\n");
        CHECK_THROWS_AS(sweep(cfg, scratch("sweep_bad"), 1), ConfigInvalid);
        cfg.sweep_values = {100};
        cfg.sweep_param = "params.form";
        CHECK_THROWS_AS(sweep(cfg, scratch("sweep_bad"), 1), ConfigInvalid);
        cfg.sweep_param = "";
        CHECK_THROWS_AS(sweep(cfg, scratch("sweep_bad"), 1), ConfigInvalid);
    }
}
