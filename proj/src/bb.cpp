#include "superrad/bb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace superrad::bb {

void BBParams::validate() const {
    if (!(n_total >= 1)) throw std::invalid_argument("BBParams: n_total must be >= 1");
    if (!(g >= 0)) throw std::invalid_argument("BBParams: g must be >= 0");
    if (!(gamma_cap > 0)) throw std::invalid_argument("BBParams: gamma_cap must be > 0");
    if (!(u >= 0)) throw std::invalid_argument("BBParams: u must be >= 0");
    if (eps_a && eps_b && e_nu) {
        double d = *eps_a - *eps_b - *e_nu;
        if (std::abs(d - delta) > 1e-12 * std::max(1.0, std::abs(delta)))
            throw std::invalid_argument("BBParams: delta != eps_a - eps_b - e_nu");
    }
}

double bb_omega(const BBParams& p) {
    return 2.0 * p.g * p.g * p.gamma_cap / (p.delta * p.delta + p.gamma_cap * p.gamma_cap);
}

double bb_eta(const BBParams& p) {
    double r = p.u * p.n_total / p.gamma_cap;
    return r * r;
}

BBDerived bb_derived(const BBParams& p) { return {bb_omega(p), bb_eta(p)}; }

BBState bb_full_rhs(const BBState& s, const BBParams& p) {
    using namespace std::complex_literals;
    const std::complex<double> g = p.g_complex();
    const double flow = 2.0 * std::imag(std::conj(g) * s.s);  // dn_a/dt
    const double delta_eff = p.delta + p.u * (s.n_a - s.n_b + 1.0);
    const double source = s.n_c * s.n_b * (1.0 + s.n_a) - (1.0 - s.n_c) * s.n_a * (1.0 + s.n_b);

    BBState d;
    d.n_a = flow;
    d.n_b = -flow;
    d.n_c = -flow - 2.0 * p.gamma_cap * s.n_c;
    d.s = (1i * delta_eff - p.gamma_cap) * s.s + 1i * g * source;
    return d;
}

std::complex<double> bb_adiabatic_s(double n_a, double n_b, const BBParams& p) {
    using namespace std::complex_literals;
    return 1i * p.g_complex() * n_a * (1.0 + n_b) / (1i * p.delta - p.gamma_cap);
}

double bb_logistic_rhs(double n_b, const BBParams& p) {
    return bb_omega(p) * (1.0 + n_b) * (p.n_total - n_b);
}

double bb_interacting_rhs(double n_b, const BBParams& p) {
    double x = 1.0 - 2.0 * n_b / p.n_total;
    return bb_logistic_rhs(n_b, p) / (1.0 + bb_eta(p) * x * x);
}

double bb_logistic_closed_form(double t, double n_total, double omega) {
    const double x = omega * (n_total + 1.0) * t;
    if (x > 700.0) {
        double e = std::exp(-x);
        return (1.0 - e) / (1.0 + n_total * e);
    }
    double em1 = std::expm1(x);
    return em1 / (em1 + n_total + 1.0);
}

double bb_logistic_time_at(double fraction, double n_total, double omega) {
    if (!(fraction >= 0 && fraction < 1)) throw std::invalid_argument("bb_logistic_time_at: fraction in [0, 1)");
    return (std::log1p(n_total * fraction) - std::log1p(-fraction)) / (omega * (n_total + 1.0));
}

double bb_rate_peak(const BBParams& p, Variant variant) {
    const double n = p.n_total;
    if (variant == Variant::logistic || bb_eta(p) == 0.0) return std::max(0.0, 0.5 * (n - 1.0));
    if (variant != Variant::interacting) throw std::invalid_argument("bb_rate_peak: reduced variants only");

    const double eta = bb_eta(p);
    // Sign of d/dn [(1+n)(N-n) / D(n)] with D = 1 + eta (1 - 2n/N)^2.
    auto slope_sign = [&](double x) {
        double u = 1.0 - 2.0 * x / n;
        double d = 1.0 + eta * u * u;
        return (n - 1.0 - 2.0 * x) * d + (1.0 + x) * (n - x) * 4.0 * eta * u / n;
    };
    double lo = 0.0, hi = n;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * n; ++i) {
        double mid = 0.5 * (lo + hi);
        if (slope_sign(mid) > 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

nlohmann::json params_json(const BBParams& p) {
    nlohmann::json j = {{"n_total", p.n_total}, {"g", p.g},     {"g_phase", p.g_phase},
                        {"delta", p.delta},     {"gamma_cap", p.gamma_cap}, {"u", p.u}};
    if (p.eps_a) j["eps_a"] = *p.eps_a;
    if (p.eps_b) j["eps_b"] = *p.eps_b;
    if (p.e_nu) j["e_nu"] = *p.e_nu;
    return j;
}

}  // namespace

Trajectory bb_simulate(const BBParams& p, Variant variant, std::span<const double> sample_times,
                       const ode::IntegratorConfig& config) {
    p.validate();
    if (sample_times.size() < 2) throw std::invalid_argument("bb_simulate: need at least two samples");
    const double n = p.n_total;

    ode::IvpProblem prob;
    prob.t0 = 0.0;
    prob.t_end = sample_times.back();
    if (variant == Variant::full) {
        prob.dimension = 5;
        prob.y0 = {n, 0.0, 0.0, 0.0, 0.0};
        prob.rhs = [p](double, std::span<const double> y, std::span<double> dy) {
            BBState d = bb_full_rhs({y[0], y[1], y[2], {y[3], y[4]}}, p);
            dy[0] = d.n_a;
            dy[1] = d.n_b;
            dy[2] = d.n_c;
            dy[3] = d.s.real();
            dy[4] = d.s.imag();
        };
    } else {
        prob.dimension = 1;
        prob.y0 = {0.0};
        if (variant == Variant::logistic)
            prob.rhs = [p](double, std::span<const double> y, std::span<double> dy) {
                dy[0] = bb_logistic_rhs(y[0], p);
            };
        else
            prob.rhs = [p](double, std::span<const double> y, std::span<double> dy) {
                dy[0] = bb_interacting_rhs(y[0], p);
            };
    }

    const std::size_t ib = (variant == Variant::full) ? 1 : 0;
    for (double f : kCrossingFractions) prob.thresholds.push_back({ib, f * n});

    ode::SolutionGrid grid = ode::integrate(prob, config, sample_times);

    Trajectory traj;
    traj.times = grid.times;
    std::vector<double> frac, frac_rate, nb, nb_rate;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        nb.push_back(grid.states[i][ib]);
        nb_rate.push_back(grid.derivatives[i][ib]);
        frac.push_back(nb.back() / n);
        frac_rate.push_back(nb_rate.back() / n);
    }
    traj.add_column("n_b_frac", std::move(frac));
    traj.add_column("n_b_frac_rate", std::move(frac_rate));
    traj.add_column("n_b", std::move(nb));
    traj.add_column("n_b_rate", std::move(nb_rate));

    double drift = 0.0;
    if (variant == Variant::full) {
        traj.add_column("n_a", grid.component(0));
        traj.add_column("n_c", grid.component(2));
        traj.add_column("s_re", grid.component(3));
        traj.add_column("s_im", grid.component(4));
        for (const auto& s : grid.states) drift = std::max(drift, std::abs(s[0] + s[1] - n));
    }

    traj.metadata["model"] = std::string("bb_") + to_string(variant);
    traj.metadata["params"] = params_json(p);
    traj.metadata["derived"] = {{"omega", bb_omega(p)}, {"eta", bb_eta(p)}};
    traj.metadata["max_conservation_drift"] = drift;
    traj.metadata["conservation_law"] = variant == Variant::full ? "n_a + n_b = N" : "n_a eliminated";
    traj.metadata["accepted_steps"] = grid.accepted_steps;
    traj.metadata["rejected_steps"] = grid.rejected_steps;
    for (std::size_t k = 0; k < std::size(kCrossingFractions); ++k)
        record_crossing(traj, "n_b_frac", kCrossingFractions[k], grid.threshold_times[k]);
    return traj;
}

double bb_inflection_fraction(const Trajectory& traj, const BBParams& p, Variant variant) {
    const auto& rate = traj.column("n_b_rate");
    const auto& nb = traj.column("n_b");
    if (rate.empty()) throw std::invalid_argument("bb_inflection_fraction: empty trajectory");
    std::size_t k = static_cast<std::size_t>(std::max_element(rate.begin(), rate.end()) - rate.begin());
    if (variant != Variant::full) {
        double peak = bb_rate_peak(p, variant);
        if (peak >= nb.front() && peak <= nb.back()) return peak / p.n_total;
    }
    return nb[k] / p.n_total;
}

const char* to_string(Variant v) {
    switch (v) {
        case Variant::full: return "full";
        case Variant::logistic: return "logistic";
        case Variant::interacting: return "interacting";
    }
    return "?";
}

}  // namespace superrad::bb
