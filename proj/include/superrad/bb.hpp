#pragma once

// Boson -> boson decay: condensate mode a converts into daughter mode b while
// emitting one neutrino into a single leaky fermionic mode c. Units hbar = 1.

#include <complex>
#include <optional>
#include <span>

#include "superrad/ode.hpp"
#include "superrad/trajectory.hpp"

namespace superrad::bb {

struct BBParams {
    double n_total = 1.0;    // N, total atoms
    double g = 0.0;          // |g|
    double g_phase = 0.0;    // arg g, radians
    double delta = 0.0;      // eps_a - eps_b - e_nu
    double gamma_cap = 1.0;  // neutrino escape rate Gamma
    double u = 0.0;          // equal contact coupling U_a = U_b = U_ab
    // Bare energies; only the oracle Hamiltonian uses them.
    std::optional<double> eps_a, eps_b, e_nu;

    void validate() const;
    std::complex<double> g_complex() const { return std::polar(g, g_phase); }
};

struct BBState {
    double n_a = 0.0;
    double n_b = 0.0;
    double n_c = 0.0;
    std::complex<double> s{0.0, 0.0};  // <a^dag b c>
};

struct BBDerived {
    double omega = 0.0;
    double eta = 0.0;
};

enum class Variant { full, logistic, interacting };

// Omega = 2 g^2 Gamma / (Delta^2 + Gamma^2).
double bb_omega(const BBParams& p);
// eta = (U N / Gamma)^2.
double bb_eta(const BBParams& p);
BBDerived bb_derived(const BBParams& p);

// Mean-field closed set for (n_a, n_b, n_c, S) including the Pauli factor on n_c
// and the interaction-shifted detuning Delta + U (n_a - n_b + 1).
BBState bb_full_rhs(const BBState& state, const BBParams& p);

// Quasi-static correlator i g n_a (1 + n_b) / (i Delta - Gamma).
std::complex<double> bb_adiabatic_s(double n_a, double n_b, const BBParams& p);

// Omega (1 + n_b)(N - n_b).
double bb_logistic_rhs(double n_b, const BBParams& p);
// Same rate divided by 1 + eta (1 - 2 n_b / N)^2.
double bb_interacting_rhs(double n_b, const BBParams& p);

// Decayed fraction of the logistic law with n_b(0) = 0, evaluated without overflow.
double bb_logistic_closed_form(double t, double n_total, double omega);
// Time at which the logistic fraction equals `fraction` (0 <= fraction < 1).
double bb_logistic_time_at(double fraction, double n_total, double omega);

// Occupation n_b at which the reduced rate (logistic or interacting) peaks.
double bb_rate_peak(const BBParams& p, Variant variant);

// Integrates the chosen variant from n_a = N, n_b = n_c = 0, S = 0.
// Columns: n_b_frac, n_b_frac_rate, n_b, n_b_rate; the full variant adds
// n_a, n_c, s_re, s_im. Metadata carries max_conservation_drift.
Trajectory bb_simulate(const BBParams& p, Variant variant, std::span<const double> sample_times,
                       const ode::IntegratorConfig& config = {});

// n_b / N at the maximum of dn_b/dt along the trajectory. For the reduced
// variants the sampled maximum is refined to the exact peak of the rate law
// between the neighbouring samples; the full variant returns the sampled argmax.
double bb_inflection_fraction(const Trajectory& traj, const BBParams& p, Variant variant);

const char* to_string(Variant v);

}  // namespace superrad::bb
