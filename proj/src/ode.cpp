#include "superrad/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "superrad/error.hpp"

namespace superrad::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension (Hairer, Norsett & Wanner, DOPRI5 dense output).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_samples(const IvpProblem& p, std::span<const double> samples) {
    if (p.y0.size() != p.dimension) throw std::invalid_argument("integrate: dimension != size(y0)");
    if (!(p.t_end > p.t0)) throw std::invalid_argument("integrate: t_end must exceed t0");
    if (!p.rhs) throw std::invalid_argument("integrate: empty rhs");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i] < p.t0 || samples[i] > p.t_end)
            throw std::invalid_argument("integrate: sample time outside [t0, t_end]");
        if (i > 0 && !(samples[i] > samples[i - 1]))
            throw std::invalid_argument("integrate: sample times must be strictly increasing");
    }
    if (!all_finite(p.y0)) throw NonFiniteState("integrate: non-finite initial state");
}

std::string at_time(const char* what, double t) {
    std::ostringstream os;
    os.precision(17);
    os << what << " at t = " << t;
    return os.str();
}

// Collects dense-output samples as the stepper advances.
class Sampler {
public:
    Sampler(const IvpProblem& p, std::span<const double> samples, SolutionGrid& out)
        : p_(p), samples_(samples), out_(out) {
        out_.times.reserve(samples.size());
        out_.states.reserve(samples.size());
        out_.derivatives.reserve(samples.size());
    }

    bool pending() const { return next_ < samples_.size(); }
    double next_time() const { return samples_[next_]; }

    // Emits every sample in (t_prev, t_new] (or [t0, t0] at the start). `eval`
    // writes the interpolated state at a given time; endpoints are copied exactly.
    template <typename Eval>
    void emit_until(double t_prev, const State& y_prev, double t_new, const State& y_new,
                    Eval&& eval) {
        while (pending() && next_time() <= t_new) {
            double ts = next_time();
            State y(p_.dimension);
            if (ts == t_new) {
                y = y_new;
            } else if (ts == t_prev) {
                y = y_prev;
            } else {
                eval(ts, y);
            }
            push(ts, std::move(y));
        }
    }

    void push(double ts, State y) {
        State dy(p_.dimension);
        p_.rhs(ts, y, dy);
        out_.times.push_back(ts);
        out_.states.push_back(std::move(y));
        out_.derivatives.push_back(std::move(dy));
        ++next_;
    }

private:
    const IvpProblem& p_;
    std::span<const double> samples_;
    SolutionGrid& out_;
    std::size_t next_ = 0;
};

// Locates problem thresholds inside each accepted step by bisection on the
// step's interpolant.
class ThresholdTracker {
public:
    ThresholdTracker(const IvpProblem& p, SolutionGrid& out) : p_(p), out_(out) {
        out_.threshold_times.assign(p.thresholds.size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t k = 0; k < p.thresholds.size(); ++k) {
            if (p.thresholds[k].component >= p.dimension)
                throw std::invalid_argument("integrate: threshold component out of range");
            if (p.y0[p.thresholds[k].component] == p.thresholds[k].value) out_.threshold_times[k] = p.t0;
        }
    }

    // `eval(ts, i)` is the interpolated component i at time ts in [t, t1].
    template <typename Eval>
    void scan(double t, const State& y, double t1, const State& y1, Eval&& eval) {
        for (std::size_t k = 0; k < p_.thresholds.size(); ++k) {
            if (!std::isnan(out_.threshold_times[k])) continue;
            const auto [i, v] = p_.thresholds[k];
            const double a = y[i] - v, b = y1[i] - v;
            if (b == 0.0) {
                out_.threshold_times[k] = t1;
                continue;
            }
            if ((a < 0) == (b < 0)) continue;
            const bool rising = a < 0;
            double lo = t, hi = t1;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                if ((eval(mid, i) - v < 0) == rising) lo = mid;
                else hi = mid;
            }
            out_.threshold_times[k] = 0.5 * (lo + hi);
        }
    }

private:
    const IvpProblem& p_;
    SolutionGrid& out_;
};

void integrate_rk4(const IvpProblem& p, const IntegratorConfig& cfg, Sampler& sampler,
                   ThresholdTracker& tracker, SolutionGrid& out) {
    const std::size_t n = p.dimension;
    State y = p.y0, y1(n), k1(n), k2(n), k3(n), k4(n), tmp(n), f1(n);
    double t = p.t0;
    p.rhs(t, y, k1);
    sampler.emit_until(t, y, t, y, [](double, State&) {});

    std::size_t steps = 0;
    while (t < p.t_end) {
        if (++steps > cfg.max_steps) throw MaxStepsExceeded(at_time("rk4: max_steps exceeded", t));
        double h = cfg.initial_step;
        if (p.step_limit) h = std::min(h, p.step_limit(t, y));
        bool last = false;
        if (t + h >= p.t_end) {
            h = p.t_end - t;
            last = true;
        }
        if (h < cfg.min_step && !last) throw StepUnderflow(at_time("rk4: step below min_step", t));

        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        p.rhs(t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        p.rhs(t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        p.rhs(t + h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!all_finite(y1)) throw NonFiniteState(at_time("rk4: non-finite state", t + h));

        double t1 = last ? p.t_end : t + h;
        p.rhs(t1, y1, f1);
        ++out.accepted_steps;

        // Cubic Hermite dense output from endpoint values and slopes.
        auto hermite = [&](double ts, std::size_t i) {
            double th = (ts - t) / h;
            double h00 = (1 + 2 * th) * (1 - th) * (1 - th), h10 = th * (1 - th) * (1 - th);
            double h01 = th * th * (3 - 2 * th), h11 = th * th * (th - 1);
            return h00 * y[i] + h10 * h * k1[i] + h01 * y1[i] + h11 * h * f1[i];
        };
        sampler.emit_until(t, y, t1, y1, [&](double ts, State& ys) {
            for (std::size_t i = 0; i < n; ++i) ys[i] = hermite(ts, i);
        });
        tracker.scan(t, y, t1, y1, hermite);

        t = t1;
        y.swap(y1);
        k1.swap(f1);
    }
}

void integrate_dopri(const IvpProblem& p, const IntegratorConfig& cfg, Sampler& sampler,
                     ThresholdTracker& tracker, SolutionGrid& out) {
    const std::size_t n = p.dimension;
    State y = p.y0, y1(n), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n);
    std::array<State, 5> rc;
    for (auto& r : rc) r.resize(n);

    constexpr double beta = 0.04, safe = 0.9;
    constexpr double expo1 = 0.2 - beta * 0.75;
    constexpr double facc1 = 5.0, facc2 = 0.1;  // step may shrink 5x or grow 10x
    double facold = 1e-4;

    double t = p.t0;
    p.rhs(t, y, k1);
    if (!all_finite(k1)) throw NonFiniteState(at_time("dopri5: non-finite derivative", t));
    sampler.emit_until(t, y, t, y, [](double, State&) {});

    double h = std::min(cfg.initial_step, cfg.max_step);
    std::size_t steps = 0;
    bool reject = false;

    while (t < p.t_end) {
        if (steps++ >= cfg.max_steps) throw MaxStepsExceeded(at_time("dopri5: max_steps exceeded", t));
        if (p.step_limit) h = std::min(h, p.step_limit(t, y));
        bool last = false;
        if (t + h >= p.t_end) {
            h = p.t_end - t;
            last = true;
        }

        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        p.rhs(t + c2 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        p.rhs(t + c3 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        p.rhs(t + c4 * h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        p.rhs(t + c5 * h, tmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        double t1 = last ? p.t_end : t + h;
        p.rhs(t1, tmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        p.rhs(t1, y1, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err = std::max(err, std::abs(e) / sc);
        }

        if (!std::isfinite(err) || !all_finite(k7)) {
            // Overshoot into a blow-up region; retry with a much smaller step.
            h /= facc1;
            ++out.rejected_steps;
            reject = true;
            if (h < cfg.min_step) throw NonFiniteState(at_time("dopri5: non-finite trial state", t));
            continue;
        }

        double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(facc2, std::min(facc1, fac / safe));
            double hnew = h / fac;
            facold = std::max(err, 1e-4);
            ++out.accepted_steps;

            for (std::size_t i = 0; i < n; ++i) {
                double ydiff = y1[i] - y[i];
                double bspl = h * k1[i] - ydiff;
                rc[0][i] = y[i];
                rc[1][i] = ydiff;
                rc[2][i] = bspl;
                rc[3][i] = ydiff - h * k7[i] - bspl;
                rc[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            auto dense = [&](double ts, std::size_t i) {
                double th = (ts - t) / h, th1 = 1.0 - th;
                return rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
            };
            sampler.emit_until(t, y, t1, y1, [&](double ts, State& ys) {
                for (std::size_t i = 0; i < n; ++i) ys[i] = dense(ts, i);
            });
            tracker.scan(t, y, t1, y1, dense);

            t = t1;
            y.swap(y1);
            k1.swap(k7);
            if (std::abs(hnew) > cfg.max_step) hnew = cfg.max_step;
            if (reject) hnew = std::min(hnew, h);
            reject = false;
            if (hnew < cfg.min_step && t < p.t_end)
                throw StepUnderflow(at_time("dopri5: step below min_step", t));
            h = hnew;
        } else {
            double hnew = h / std::min(facc1, fac11 / safe);
            ++out.rejected_steps;
            reject = true;
            if (hnew < cfg.min_step) throw StepUnderflow(at_time("dopri5: step below min_step", t));
            h = hnew;
        }
    }
}

}  // namespace

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0)) throw std::invalid_argument("IntegratorConfig: rel_tol must be > 0");
    if (!(abs_tol > 0)) throw std::invalid_argument("IntegratorConfig: abs_tol must be > 0");
    if (!(min_step > 0 && min_step <= initial_step && initial_step <= max_step))
        throw std::invalid_argument("IntegratorConfig: need 0 < min_step <= initial_step <= max_step");
    if (max_steps == 0) throw std::invalid_argument("IntegratorConfig: max_steps must be > 0");
}

std::vector<double> SolutionGrid::component(std::size_t i) const {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s.at(i));
    return out;
}

SolutionGrid integrate(const IvpProblem& problem, const IntegratorConfig& config,
                       std::span<const double> sample_times) {
    config.validate();
    check_samples(problem, sample_times);

    SolutionGrid out;
    out.t0 = problem.t0;
    out.t_end = problem.t_end;
    Sampler sampler(problem, sample_times, out);
    ThresholdTracker tracker(problem, out);
    if (config.method == Method::fixed_rk4)
        integrate_rk4(problem, config, sampler, tracker, out);
    else
        integrate_dopri(problem, config, sampler, tracker, out);
    return out;
}

double find_crossing(const SolutionGrid& grid, std::size_t component, double threshold) {
    if (grid.size() == 0) throw NoCrossing("find_crossing: empty grid");
    if (component >= grid.states.front().size())
        throw std::invalid_argument("find_crossing: component out of range");

    auto value = [&](std::size_t k) { return grid.states[k][component]; };
    if (value(0) == threshold) return grid.times[0];

    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double ya = value(k) - threshold, yb = value(k + 1) - threshold;
        if (yb == 0.0) return grid.times[k + 1];
        if ((ya < 0) == (yb < 0)) continue;

        double ta = grid.times[k], tb = grid.times[k + 1], h = tb - ta;
        double y0 = value(k), y1 = value(k + 1);
        double m0 = grid.derivatives[k][component], m1 = grid.derivatives[k + 1][component];
        // Fritsch-Carlson limiter keeps the Hermite cubic monotone on this interval.
        double delta = (y1 - y0) / h;
        if (m0 * delta <= 0) m0 = 0;
        if (m1 * delta <= 0) m1 = 0;
        double al = m0 / delta, be = m1 / delta;
        if (al * al + be * be > 9.0) {
            double tau = 3.0 / std::sqrt(al * al + be * be);
            m0 = tau * al * delta;
            m1 = tau * be * delta;
        }
        auto interp = [&](double t) {
            double th = (t - ta) / h;
            double h00 = (1 + 2 * th) * (1 - th) * (1 - th), h10 = th * (1 - th) * (1 - th);
            double h01 = th * th * (3 - 2 * th), h11 = th * th * (th - 1);
            return h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1 - threshold;
        };
        double lo = ta, hi = tb;
        const bool rising = ya < 0;
        // Bisect to machine precision (well inside 1e-6 of the window).
        for (int it = 0; it < 200 && hi - lo > 0; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if ((interp(mid) < 0) == rising)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }
    throw NoCrossing("find_crossing: threshold never reached");
}

std::vector<double> linear_grid(double t0, double t_end, std::size_t n) {
    if (n < 2) throw std::invalid_argument("linear_grid: need at least 2 points");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = t0 + (t_end - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = t_end;
    return out;
}

std::vector<double> log_grid(double t0, double t_first, double t_end, std::size_t n) {
    if (n < 2) throw std::invalid_argument("log_grid: need at least 2 points");
    if (!(t_first > t0 && t_end > t_first && t_first > 0))
        throw std::invalid_argument("log_grid: need 0 < t_first, t0 < t_first < t_end");
    std::vector<double> out(n);
    out[0] = t0;
    const double la = std::log(t_first), lb = std::log(t_end);
    for (std::size_t i = 1; i < n; ++i) {
        double f = (n == 2) ? 1.0 : static_cast<double>(i - 1) / static_cast<double>(n - 2);
        out[i] = std::exp(la + (lb - la) * f);
    }
    out.back() = t_end;
    if (n > 2) out[1] = t_first;
    return out;
}

}  // namespace superrad::ode
