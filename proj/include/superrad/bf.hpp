#pragma once

// Boson -> fermion decay: a condensate mode feeds one preferred level of a
// fermionic ladder, decayed atoms relax downwards with Pauli blocking, and the
// neutrino mode leaks out at rate Gamma.

#include <cstddef>
#include <span>
#include <vector>

#include "superrad/ode.hpp"
#include "superrad/trajectory.hpp"

namespace superrad::bf {

struct BFParams {
    double n_total = 100.0;
    std::size_t alpha = 80;     // arrival level
    std::size_t n_levels = 0;   // levels 0..n_levels-1; 0 selects alpha + 1
    double g_alpha = 1.0;       // capture rate into level alpha
    double gamma_th = 1.0;      // uniform relaxation rate
    double gamma_cap = 1.0;     // neutrino escape rate
    // Optional per-link rates gamma_k for the jump k -> k-1, indexed by k
    // (entry 0 unused). Empty means gamma_th everywhere.
    std::vector<double> gamma_profile;
    double e_a = 0.0;
    std::vector<double> e_levels;  // may be empty; ascending when given
    double e_nu = 0.0;

    std::size_t levels() const noexcept { return n_levels == 0 ? alpha + 1 : n_levels; }
    double gamma_link(std::size_t k) const { return gamma_profile.empty() ? gamma_th : gamma_profile.at(k); }
    void validate() const;
};

struct BFState {
    double n_a = 0.0;
    double n_c = 0.0;
    std::vector<double> n_k;
};

// Truncated equations with P = g_alpha n_a (1 - n_alpha)(1 - n_c):
//   dn_a = -P, dn_c = P - Gamma n_c,
//   dn_k = delta_{k,alpha} P - gamma n_k (1 - n_{k-1}) [k > 0] + gamma n_{k+1} (1 - n_k) [k < M].
BFState bf_rhs(const BFState& state, const BFParams& p);

// Integrates from n_a = N, empty ladder, n_c = 0. With fast_neutrino the
// neutrino occupation is pinned to zero and removed from the state.
// Columns: n_a, decayed_frac, decayed_frac_rate, decay_rate (= -dn_a/dt),
// n_c, gamma_t, and n_k.<i> for every level. Occupations leaving [0, 1] by
// more than 1e-6 raise BoundViolation.
Trajectory bf_simulate(const BFParams& p, std::span<const double> sample_times, bool fast_neutrino,
                       const ode::IntegratorConfig& config = {});

// Depth of the deepest valley in the log-time decay rate t * (-dn_a/dt) inside
// the middle third of the log-time window, relative to the lower of the two
// enclosing maxima. Unimodal rates give 0; a Pauli-blocking plateau between
// an early burst and the later transport-limited decay gives a value near 1.
// Throws EmptyTrajectory when fewer than three positive sample times exist.
double bf_plateau_metric(const Trajectory& traj);

}  // namespace superrad::bf
