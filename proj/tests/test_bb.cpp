#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "superrad/bb.hpp"

using namespace superrad;
using namespace superrad::bb;

namespace {

// Delta = 0, Gamma = 1 and |g| chosen so that Omega equals `omega`.
BBParams resonant(double n_total, double omega) {
    BBParams p;
    p.n_total = n_total;
    p.gamma_cap = 1.0;
    p.g = std::sqrt(omega / 2.0);
    return p;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("omega") {
    BBParams p;
    p.g = 0.0;
    CHECK(bb_omega(p) == 0.0);
    p.g = 1.0;
    p.delta = 0.0;
    p.gamma_cap = 10.0;
    CHECK(bb_omega(p) == doctest::Approx(0.2).epsilon(1e-15));
    p.g = 0.7;
    p.gamma_cap = 2.5;
    double resonant_value = bb_omega(p);
    p.delta = 2.5;
    CHECK(bb_omega(p) == doctest::Approx(0.49 / 2.5).epsilon(1e-15));
    CHECK(bb_omega(p) == doctest::Approx(resonant_value / 2).epsilon(1e-15));
}

TEST_CASE("eta") {
    BBParams p;
    p.n_total = 1000;
    p.u = 0.02;
    p.gamma_cap = 4.0;
    CHECK(bb_eta(p) == doctest::Approx(25.0).epsilon(1e-14));
}

TEST_CASE("full rhs at the initial state") {
    BBParams p;
    p.n_total = 50;
    p.g = 0.3;
    p.g_phase = 0.7;
    p.delta = 0.2;
    p.u = 0.05;
    BBState s{50.0, 0.0, 0.0, {0.0, 0.0}};
    auto d = bb_full_rhs(s, p);
    CHECK(d.n_a == 0.0);
    CHECK(d.n_b == 0.0);
    CHECK(d.n_c == 0.0);
    auto expected = std::complex<double>(0, -1) * p.g_complex() * 50.0;
    CHECK(std::abs(d.s - expected) < 1e-14);
}

TEST_CASE("full rhs decoupled limit") {
    BBParams p;
    p.n_total = 10;
    p.g = 0.0;
    p.delta = 0.4;
    p.gamma_cap = 1.5;
    p.u = 0.1;
    BBState s{6.0, 4.0, 0.3, {0.2, -0.1}};
    auto d = bb_full_rhs(s, p);
    CHECK(d.n_a == 0.0);
    CHECK(d.n_b == 0.0);
    CHECK(d.n_c == doctest::Approx(-2 * 1.5 * 0.3));
    double delta_eff = 0.4 + 0.1 * (6.0 - 4.0 + 1.0);
    auto expected = std::complex<double>(-1.5, delta_eff) * s.s;
    CHECK(std::abs(d.s - expected) < 1e-15);
}

TEST_CASE("full rhs conserves n_a + n_b identically") {
    BBParams p;
    p.n_total = 10;
    p.g = 0.8;
    p.g_phase = 1.1;
    p.delta = -0.3;
    p.u = 0.2;
    for (double sr : {-1.0, 0.3, 2.0})
        for (double si : {-0.5, 0.0, 1.7}) {
            auto d = bb_full_rhs({7.0, 3.0, 0.4, {sr, si}}, p);
            CHECK(d.n_a + d.n_b == 0.0);
        }
}

TEST_CASE("adiabatic correlator") {
    BBParams p;
    p.g = 1.0;
    p.delta = 1.0;
    p.gamma_cap = 1.0;
    CHECK(bb_adiabatic_s(0.0, 3.0, p) == std::complex<double>(0.0, 0.0));
    auto s = bb_adiabatic_s(1.0, 0.0, p);
    CHECK(s.real() == doctest::Approx(0.5));
    CHECK(s.imag() == doctest::Approx(-0.5));

    p.delta = 0.0;
    p.g = 0.6;
    p.gamma_cap = 2.0;
    auto r = bb_adiabatic_s(4.0, 2.0, p);
    CHECK(r.real() == doctest::Approx(0.0));
    CHECK(r.imag() == doctest::Approx(-0.6 * 4.0 * 3.0 / 2.0));
    CHECK((std::conj(p.g_complex()) * r).imag() == doctest::Approx(-0.36 * 12.0 / 2.0));
}

TEST_CASE("logistic rate") {
    auto p = resonant(100, 1.0);
    CHECK(bb_logistic_rhs(100.0, p) == doctest::Approx(0.0));
    CHECK(bb_logistic_rhs(0.0, p) == doctest::Approx(100.0));
    CHECK(bb_logistic_rhs(50.0, p) == doctest::Approx(2550.0));
}

TEST_CASE("logistic closed form") {
    CHECK(bb_logistic_closed_form(0.0, 100.0, 1.0) == 0.0);
    CHECK(std::abs(bb_logistic_closed_form(50.0 / 101.0, 100.0, 1.0) - 1.0) < 1e-15);
    for (double n : {1.0, 10.0, 100.0, 1e5}) {
        double t = std::log(n + 2.0) / (n + 1.0);
        CHECK(bb_logistic_closed_form(t, n, 1.0) == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(bb_logistic_time_at(0.5, n, 1.0) == doctest::Approx(t).epsilon(1e-13));
    }
    // Huge arguments do not overflow.
    CHECK(bb_logistic_closed_form(1e6, 1e5, 1.0) == 1.0);
}

TEST_CASE("interacting rate") {
    auto p = resonant(10, 1.0);
    for (double nb : {0.0, 2.5, 7.0, 10.0}) CHECK(bb_interacting_rhs(nb, p) == bb_logistic_rhs(nb, p));
    p.u = std::sqrt(3.0) / 10.0;  // eta = 3
    CHECK(bb_eta(p) == doctest::Approx(3.0));
    CHECK(bb_interacting_rhs(0.0, p) == doctest::Approx(2.5));
    for (double eta : {0.0, 1.0, 1e4}) {
        p.u = std::sqrt(eta) / 10.0;
        CHECK(bb_interacting_rhs(5.0, p) == doctest::Approx(6.0 * 5.0));
    }
}

TEST_CASE("closed-form equivalence of the integrated logistic law") {
    for (double n : {10.0, 1e3, 1e5}) {
        auto p = resonant(n, 1.0);
        double t_end = 20.0 / (n + 1.0);
        auto times = ode::linear_grid(0.0, t_end, 401);
        auto traj = bb_simulate(p, Variant::logistic, times);
        const auto& f = traj.column("n_b_frac");
        double err = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i)
            err = std::max(err, std::abs(f[i] - bb_logistic_closed_form(times[i], n, 1.0)));
        CAPTURE(n);
        CHECK(err <= 1e-8);
    }
}

TEST_CASE("eta = 0 interacting trajectory equals the logistic one") {
    auto p = resonant(1e3, 1.0);
    auto times = ode::log_grid(0.0, 1e-6, 0.05, 200);
    auto a = bb_simulate(p, Variant::logistic, times);
    auto b = bb_simulate(p, Variant::interacting, times);
    CHECK(max_abs_diff(a.column("n_b_frac"), b.column("n_b_frac")) <= 1e-10);
}

TEST_CASE("logistic emission peak at (N - 1)/2") {
    auto p = resonant(100, 1.0);
    CHECK(bb_rate_peak(p, Variant::logistic) == doctest::Approx(49.5));
    auto times = ode::linear_grid(0.0, 0.1, 401);
    auto traj = bb_simulate(p, Variant::logistic, times);
    const auto& nb = traj.column("n_b");
    const auto& rate = traj.column("n_b_rate");
    auto i = static_cast<std::size_t>(std::max_element(rate.begin(), rate.end()) - rate.begin());
    REQUIRE(i > 0);
    REQUIRE(i + 1 < nb.size());
    double spacing = std::max(nb[i] - nb[i - 1], nb[i + 1] - nb[i]);
    CHECK(std::abs(nb[i] - 49.5) <= spacing);
    CHECK(bb_inflection_fraction(traj, p, Variant::logistic) == doctest::Approx(0.495));
}

TEST_CASE("interaction shifts the inflection point") {
    auto p = resonant(1e5, 1.0);
    p.u = 100.0 / 1e5;  // eta = 1e4
    double peak = bb_rate_peak(p, Variant::interacting);
    // Slope of the rate at the midpoint is -Omega N < 0, so the exact peak
    // sits just below N/2 for any finite eta.
    CHECK(peak / 1e5 < 0.5);
    CHECK(peak / 1e5 > 0.4999);
    p.u = 0.0;
    CHECK(bb_rate_peak(p, Variant::interacting) == doctest::Approx((1e5 - 1) / 2));
}

TEST_CASE("full variant: conservation, bounds, phase invariance") {
    BBParams p;
    p.n_total = 20;
    p.g = 0.05;
    p.gamma_cap = 1.0;
    p.delta = 0.3;
    ode::IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    double t_end = 8.0 * bb_logistic_time_at(0.5, p.n_total, bb_omega(p));
    auto times = ode::linear_grid(0.0, t_end, 201);
    auto a = bb_simulate(p, Variant::full, times, cfg);
    p.g_phase = std::numbers::pi / 3;
    auto b = bb_simulate(p, Variant::full, times, cfg);

    const auto& na = a.column("n_a");
    const auto& nb = a.column("n_b");
    const auto& nc = a.column("n_c");
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(na[i] + nb[i] - p.n_total) <= 1e-8 * p.n_total);
        CHECK(nb[i] >= 0.0);
        CHECK(nb[i] <= p.n_total * (1 + 1e-12));
        CHECK(nc[i] >= 0.0);
        CHECK(nc[i] <= 1.0 + 1e-9);
    }
    CHECK(a.metadata.at("max_conservation_drift").get<double>() <= 1e-8 * p.n_total);
    CHECK(max_abs_diff(a.column("n_a"), b.column("n_a")) <= 1e-10);
    CHECK(max_abs_diff(a.column("n_b"), b.column("n_b")) <= 1e-10);
    CHECK(max_abs_diff(a.column("n_c"), b.column("n_c")) <= 1e-10);
}

TEST_CASE("small n_c when Gamma/g = 1e3") {
    BBParams p;
    p.n_total = 10;
    p.g = 1e-3;
    p.gamma_cap = 1.0;
    double t_end = 4.0 * bb_logistic_time_at(0.5, p.n_total, bb_omega(p));
    auto traj = bb_simulate(p, Variant::full, ode::linear_grid(0.0, t_end, 401));
    const auto& nc = traj.column("n_c");
    CHECK(*std::max_element(nc.begin(), nc.end()) < 1e-3);
}

TEST_CASE("full variant reproduces the logistic half-decay time") {
    BBParams p;
    p.n_total = 100;
    p.g = 1e-3;
    p.gamma_cap = 1.0;
    const double omega = bb_omega(p);
    const double t_half = std::log(102.0) / (omega * 101.0);
    auto traj = bb_simulate(p, Variant::full, ode::linear_grid(0.0, 3.0 * t_half, 301));
    double t50 = crossing_time(traj, "n_b_frac", "n_b_frac_rate", 0.5);
    CHECK(std::abs(t50 / t_half - 1.0) < 0.05);
}

TEST_CASE("parameter validation") {
    BBParams p;
    p.gamma_cap = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = BBParams{};
    p.n_total = 0.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = BBParams{};
    p.eps_a = 1.0;
    p.eps_b = 0.2;
    p.e_nu = 0.3;
    p.delta = 0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.delta = 0.5;
    CHECK_NOTHROW(p.validate());
}
