#pragma once

// Fermion-pair condensate -> boson decay: each event destroys one molecule of
// mode a and creates two quanta of the bosonic mode b.

#include <span>

#include "superrad/ode.hpp"
#include "superrad/trajectory.hpp"

namespace superrad::fb {

struct FBParams {
    double n_total = 100.0;  // fermionic atoms; must be even
    double gamma_decay = 1.0;
    double gamma_phi_a = 0.0;  // dephasing, oracle only
    double gamma_phi_b = 0.0;  // dephasing, oracle only
    double e_a = 0.0;
    double e_b = 0.0;

    void validate() const;
};

struct FBState {
    double n_a = 0.0;  // pairs
    double n_b = 0.0;  // bosons
};

enum class Form { pair, reduced };

// dn_a = -gamma n_a (n_b + 1)(n_b + 2), dn_b = -2 dn_a.
FBState fb_rhs(const FBState& state, const FBParams& p);
// gamma (N - n_b)(n_b + 1)(n_b + 2).
double fb_reduced_rhs(double n_b, const FBParams& p);

// Integrates from n_a = N/2, n_b = 0. The step size is capped at a fraction of
// the instantaneous growth time (n_b + 2) / dn_b so the explosion is resolved.
// Columns: n_b_frac, n_b_frac_rate, n_b, n_a, t_gamma_n2 (time in 1/(gamma N^2)).
Trajectory fb_simulate(const FBParams& p, std::span<const double> sample_times, Form form = Form::pair,
                       const ode::IntegratorConfig& config = {});

// (t_90 - t_10) / t_50 of the n_b_frac column; ThresholdNotReached if the
// fraction never reaches 0.9.
double fb_sharpness(const Trajectory& traj);

const char* to_string(Form f);

}  // namespace superrad::fb
