#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace superrad::ode {

using State = std::vector<double>;

// dydt = f(t, y). Must be deterministic and free of side effects.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

// Optional upper bound on the next step size, evaluated at the start of each step.
using StepLimit = std::function<double(double t, std::span<const double> y)>;

enum class Method { fixed_rk4, adaptive_embedded_rk };

struct IntegratorConfig {
    Method method = Method::adaptive_embedded_rk;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double initial_step = 1e-6;
    double max_step = 1e300;
    double min_step = 1e-20;
    std::size_t max_steps = 10'000'000;

    // Throws std::invalid_argument when the ordering or positivity constraints fail.
    void validate() const;
};

// First time at which state[component] reaches value, located on the stepper's
// dense output rather than on the sample grid.
struct Threshold {
    std::size_t component = 0;
    double value = 0.0;
};

struct IvpProblem {
    std::size_t dimension = 0;
    Rhs rhs;
    double t0 = 0.0;
    State y0;
    double t_end = 1.0;
    StepLimit step_limit;  // may be empty
    std::vector<Threshold> thresholds;
};

struct SolutionGrid {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<State> derivatives;  // rhs evaluated at each sample
    std::vector<double> threshold_times;  // one per problem threshold; NaN if never reached
    double t0 = 0.0;
    double t_end = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;

    std::size_t size() const noexcept { return times.size(); }
    std::vector<double> component(std::size_t i) const;
};

// Integrates `problem` and samples the solution at `sample_times` through the
// stepper's dense output. Sample times must lie in [t0, t_end] and be strictly
// increasing.
//
// Errors: StepUnderflow, MaxStepsExceeded, NonFiniteState (all superrad::Error).
SolutionGrid integrate(const IvpProblem& problem, const IntegratorConfig& config,
                       std::span<const double> sample_times);

// Earliest time at which `component` crosses `threshold`. Between samples the
// component is represented by a monotonicity-preserving cubic Hermite
// interpolant built from the stored derivatives; the crossing is bisected to
// machine precision, far inside 1e-6 * (t_end - t0). Throws NoCrossing if the
// threshold is never reached. Accuracy is limited by the sample spacing; use
// IvpProblem::thresholds when the crossing must not depend on the grid.
double find_crossing(const SolutionGrid& grid, std::size_t component, double threshold);

// Sample-time helpers.
std::vector<double> linear_grid(double t0, double t_end, std::size_t n);
// n points; the first is t0 (may be 0), the remaining n-1 are log-spaced from t_first to t_end.
std::vector<double> log_grid(double t0, double t_first, double t_end, std::size_t n);

}  // namespace superrad::ode
