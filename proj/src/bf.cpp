#include "superrad/bf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "superrad/error.hpp"

namespace superrad::bf {

void BFParams::validate() const {
    if (!(n_total >= 1)) throw std::invalid_argument("BFParams: n_total must be >= 1");
    if (alpha >= levels()) throw std::invalid_argument("BFParams: alpha must be < n_levels");
    if (!(g_alpha >= 0 && gamma_th >= 0 && gamma_cap >= 0))
        throw std::invalid_argument("BFParams: rates must be >= 0");
    if (!gamma_profile.empty()) {
        if (gamma_profile.size() != levels()) throw std::invalid_argument("BFParams: gamma_profile needs one entry per level");
        for (double g : gamma_profile)
            if (!(g >= 0)) throw std::invalid_argument("BFParams: gamma_profile entries must be >= 0");
    }
    if (!e_levels.empty()) {
        if (e_levels.size() != levels()) throw std::invalid_argument("BFParams: e_levels needs one entry per level");
        if (!std::is_sorted(e_levels.begin(), e_levels.end()))
            throw std::invalid_argument("BFParams: e_levels must be ascending");
    }
}

namespace {

// Flat-state kernel shared by bf_rhs and the integrator. Ladder occupations
// live in `nk`, derivatives in `dnk`.
double ladder_rhs(double n_a, double n_c, std::span<const double> nk, std::span<double> dnk,
                  const BFParams& p) {
    const std::size_t m = nk.size() - 1;
    const double inflow = p.g_alpha * n_a * (1.0 - nk[p.alpha]) * (1.0 - n_c);
    for (std::size_t k = 0; k <= m; ++k) {
        double d = (k == p.alpha) ? inflow : 0.0;
        if (k > 0) d -= p.gamma_link(k) * nk[k] * (1.0 - nk[k - 1]);
        if (k < m) d += p.gamma_link(k + 1) * nk[k + 1] * (1.0 - nk[k]);
        dnk[k] = d;
    }
    return inflow;
}

}  // namespace

BFState bf_rhs(const BFState& s, const BFParams& p) {
    if (s.n_k.size() != p.levels()) throw std::invalid_argument("bf_rhs: ladder size mismatch");
    BFState d;
    d.n_k.resize(s.n_k.size());
    double inflow = ladder_rhs(s.n_a, s.n_c, s.n_k, d.n_k, p);
    d.n_a = -inflow;
    d.n_c = inflow - p.gamma_cap * s.n_c;
    return d;
}

Trajectory bf_simulate(const BFParams& p, std::span<const double> sample_times, bool fast_neutrino,
                       const ode::IntegratorConfig& config) {
    p.validate();
    if (sample_times.size() < 2) throw std::invalid_argument("bf_simulate: need at least two samples");
    const std::size_t levels = p.levels();
    // State layout: [n_a, (n_c), n_0 .. n_M].
    const std::size_t off = fast_neutrino ? 1 : 2;

    ode::IvpProblem prob;
    prob.dimension = off + levels;
    prob.y0.assign(prob.dimension, 0.0);
    prob.y0[0] = p.n_total;
    prob.t0 = 0.0;
    prob.t_end = sample_times.back();
    prob.rhs = [p, off, levels, fast_neutrino](double, std::span<const double> y, std::span<double> dy) {
        const double n_c = fast_neutrino ? 0.0 : y[1];
        double inflow = ladder_rhs(y[0], n_c, y.subspan(off, levels), dy.subspan(off, levels), p);
        dy[0] = -inflow;
        if (!fast_neutrino) dy[1] = inflow - p.gamma_cap * y[1];
    };

    // Decayed fraction f is reached when n_a falls to N (1 - f).
    for (double f : kCrossingFractions) prob.thresholds.push_back({0, p.n_total * (1.0 - f)});

    ode::SolutionGrid grid = ode::integrate(prob, config, sample_times);

    Trajectory traj;
    traj.times = grid.times;
    std::vector<double> n_a, frac, frac_rate, rate, n_c, gt;
    double drift = 0.0, worst_bound = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& y = grid.states[i];
        const auto& dy = grid.derivatives[i];
        double sum = 0.0, dsum = 0.0;
        for (std::size_t k = 0; k < levels; ++k) {
            double v = y[off + k];
            sum += v;
            dsum += dy[off + k];
            worst_bound = std::max({worst_bound, -v, v - 1.0});
        }
        double nc = fast_neutrino ? 0.0 : y[1];
        worst_bound = std::max({worst_bound, -nc, nc - 1.0, -y[0]});
        drift = std::max(drift, std::abs(y[0] + sum - p.n_total));
        n_a.push_back(y[0]);
        frac.push_back(sum / p.n_total);
        frac_rate.push_back(dsum / p.n_total);
        rate.push_back(-dy[0]);
        n_c.push_back(nc);
        gt.push_back(p.gamma_th * grid.times[i]);
    }
    if (worst_bound > 1e-6)
        throw BoundViolation("bf_simulate: occupation left [0, 1] by " + std::to_string(worst_bound));

    traj.add_column("n_a", std::move(n_a));
    traj.add_column("decayed_frac", std::move(frac));
    traj.add_column("decayed_frac_rate", std::move(frac_rate));
    traj.add_column("decay_rate", std::move(rate));
    traj.add_column("n_c", std::move(n_c));
    traj.add_column("gamma_t", std::move(gt));
    for (std::size_t k = 0; k < levels; ++k) traj.add_column("n_k." + std::to_string(k), grid.component(off + k));

    traj.metadata["model"] = "bf";
    traj.metadata["params"] = {{"n_total", p.n_total},     {"alpha", p.alpha},         {"n_levels", levels},
                               {"g_alpha", p.g_alpha},     {"gamma_th", p.gamma_th},   {"gamma_cap", p.gamma_cap},
                               {"e_a", p.e_a},             {"e_nu", p.e_nu},           {"e_levels", p.e_levels},
                               {"gamma_profile", p.gamma_profile}};
    traj.metadata["fast_neutrino"] = fast_neutrino;
    traj.metadata["time_unit"] = "1/gamma_th (column gamma_t); column time is raw";
    traj.metadata["max_conservation_drift"] = drift;
    traj.metadata["conservation_law"] = "n_a + sum_k n_k = N";
    traj.metadata["max_bound_violation"] = worst_bound;
    traj.metadata["accepted_steps"] = grid.accepted_steps;
    traj.metadata["rejected_steps"] = grid.rejected_steps;
    for (std::size_t k = 0; k < std::size(kCrossingFractions); ++k)
        record_crossing(traj, "decayed_frac", kCrossingFractions[k], grid.threshold_times[k]);
    return traj;
}

double bf_plateau_metric(const Trajectory& traj) {
    const auto& rate = traj.column("decay_rate");
    std::vector<double> t, r;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.times[i] > 0) {
            t.push_back(traj.times[i]);
            r.push_back(traj.times[i] * std::max(0.0, rate[i]));
        }
    }
    if (t.size() < 3) throw EmptyTrajectory("bf_plateau_metric: need at least three positive sample times");

    const std::size_t n = t.size();
    std::vector<double> before(n), after(n);
    before[0] = r[0];
    for (std::size_t i = 1; i < n; ++i) before[i] = std::max(before[i - 1], r[i]);
    after[n - 1] = r[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) after[i] = std::max(after[i + 1], r[i]);

    const double la = std::log(t.front()), lb = std::log(t.back());
    const double lo = la + (lb - la) / 3.0, hi = la + 2.0 * (lb - la) / 3.0;
    double metric = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double lt = std::log(t[i]);
        if (lt < lo || lt > hi) continue;
        double rim = std::min(before[i], after[i]);
        if (rim > 0) metric = std::max(metric, (rim - r[i]) / rim);
    }
    return metric;
}

}  // namespace superrad::bf
