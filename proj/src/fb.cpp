#include "superrad/fb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "superrad/error.hpp"

namespace superrad::fb {

void FBParams::validate() const {
    if (!(n_total >= 2) || std::fmod(n_total, 2.0) != 0.0)
        throw std::invalid_argument("FBParams: n_total must be even and >= 2");
    if (!(gamma_decay >= 0 && gamma_phi_a >= 0 && gamma_phi_b >= 0))
        throw std::invalid_argument("FBParams: rates must be >= 0");
}

FBState fb_rhs(const FBState& s, const FBParams& p) {
    const double events = p.gamma_decay * s.n_a * (s.n_b + 1.0) * (s.n_b + 2.0);
    return {-events, 2.0 * events};
}

double fb_reduced_rhs(double n_b, const FBParams& p) {
    return p.gamma_decay * (p.n_total - n_b) * (n_b + 1.0) * (n_b + 2.0);
}

namespace {
constexpr double kGrowthFraction = 0.25;
}

Trajectory fb_simulate(const FBParams& p, std::span<const double> sample_times, Form form,
                       const ode::IntegratorConfig& config) {
    p.validate();
    if (sample_times.size() < 2) throw std::invalid_argument("fb_simulate: need at least two samples");
    const double n = p.n_total;

    ode::IvpProblem prob;
    prob.t0 = 0.0;
    prob.t_end = sample_times.back();
    std::size_t ib = 0;
    if (form == Form::pair) {
        prob.dimension = 2;
        prob.y0 = {0.5 * n, 0.0};
        ib = 1;
        prob.rhs = [p](double, std::span<const double> y, std::span<double> dy) {
            FBState d = fb_rhs({y[0], y[1]}, p);
            dy[0] = d.n_a;
            dy[1] = d.n_b;
        };
    } else {
        prob.dimension = 1;
        prob.y0 = {0.0};
        prob.rhs = [p](double, std::span<const double> y, std::span<double> dy) { dy[0] = fb_reduced_rhs(y[0], p); };
    }
    prob.step_limit = [p, ib, form](double, std::span<const double> y) {
        double nb = y[ib];
        double rate = form == Form::pair ? fb_rhs({y[0], nb}, p).n_b : fb_reduced_rhs(nb, p);
        return rate > 0 ? kGrowthFraction * (nb + 2.0) / rate : 1e300;
    };

    for (double f : kCrossingFractions) prob.thresholds.push_back({ib, f * n});

    ode::SolutionGrid grid = ode::integrate(prob, config, sample_times);

    Trajectory traj;
    traj.times = grid.times;
    std::vector<double> frac, frac_rate, nb, na, scaled;
    double drift = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& y = grid.states[i];
        double b = y[ib];
        double a = form == Form::pair ? y[0] : 0.5 * (n - b);
        if (form == Form::pair) drift = std::max(drift, std::abs(2.0 * a + b - n));
        nb.push_back(b);
        na.push_back(a);
        frac.push_back(b / n);
        frac_rate.push_back(grid.derivatives[i][ib] / n);
        scaled.push_back(grid.times[i] * p.gamma_decay * n * n);
    }
    traj.add_column("n_b_frac", std::move(frac));
    traj.add_column("n_b_frac_rate", std::move(frac_rate));
    traj.add_column("n_b", std::move(nb));
    traj.add_column("n_a", std::move(na));
    traj.add_column("t_gamma_n2", std::move(scaled));

    traj.metadata["model"] = "fb";
    traj.metadata["form"] = to_string(form);
    traj.metadata["params"] = {{"n_total", n},
                               {"gamma_decay", p.gamma_decay},
                               {"gamma_phi_a", p.gamma_phi_a},
                               {"gamma_phi_b", p.gamma_phi_b},
                               {"e_a", p.e_a},
                               {"e_b", p.e_b}};
    traj.metadata["time_unit"] = "raw; column t_gamma_n2 = gamma N^2 t";
    traj.metadata["max_conservation_drift"] = drift;
    traj.metadata["conservation_law"] = form == Form::pair ? "2 n_a + n_b = N" : "n_a eliminated";
    traj.metadata["accepted_steps"] = grid.accepted_steps;
    traj.metadata["rejected_steps"] = grid.rejected_steps;
    for (std::size_t k = 0; k < std::size(kCrossingFractions); ++k)
        record_crossing(traj, "n_b_frac", kCrossingFractions[k], grid.threshold_times[k]);
    return traj;
}

double fb_sharpness(const Trajectory& traj) {
    const auto& f = traj.column("n_b_frac");
    if (f.empty()) throw EmptyTrajectory("fb_sharpness: empty trajectory");
    if (*std::max_element(f.begin(), f.end()) < 0.9)
        throw ThresholdNotReached("fb_sharpness: decayed fraction never reaches 0.9");
    double t10 = crossing_time(traj, "n_b_frac", "n_b_frac_rate", 0.1);
    double t50 = crossing_time(traj, "n_b_frac", "n_b_frac_rate", 0.5);
    double t90 = crossing_time(traj, "n_b_frac", "n_b_frac_rate", 0.9);
    return (t90 - t10) / t50;
}

const char* to_string(Form f) { return f == Form::pair ? "pair" : "reduced"; }

}  // namespace superrad::fb
