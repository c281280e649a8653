#include <doctest.h>

#include <cmath>

#include "superrad/error.hpp"
#include "superrad/lindblad.hpp"
#include "superrad/oracle.hpp"

using namespace superrad;
using namespace superrad::oracle;

namespace {

bb::BBParams bb_small() {
    bb::BBParams p;
    p.n_total = 2;
    p.g = 0.7;
    p.g_phase = 0.4;
    p.delta = 0.7;
    p.gamma_cap = 1.1;
    return p;
}

bf::BFParams bf_small() {
    bf::BFParams p;
    p.n_total = 2;
    p.alpha = 1;
    p.g_alpha = 0.8;
    p.gamma_th = 0.6;
    p.gamma_cap = 1.5;
    return p;
}

fb::FBParams fb_small(double gamma_phi = 0.0) {
    fb::FBParams p;
    p.n_total = 4;
    p.gamma_decay = 0.9;
    p.gamma_phi_a = gamma_phi;
    p.gamma_phi_b = gamma_phi;
    p.e_a = 0.3;
    p.e_b = 0.1;
    return p;
}

std::vector<double> expectations(const Operator& op, const std::vector<DensityMatrix>& states) {
    std::vector<double> out;
    for (const auto& r : states) out.push_back(expectation(op, r).real());
    return out;
}

}  // namespace

TEST_CASE("system dimensions") {
    CHECK(build_bb_system(bb_small(), 3).space->total_dim() == 18);
    CHECK(build_bf_system(bf_small(), 3).space->total_dim() == 24);
    CHECK(build_fb_system(fb_small(), 3, 5).space->total_dim() == 15);
    CHECK_THROWS_AS(build_bb_system(bb_small(), 2), TruncationTooSmall);
    CHECK_THROWS_AS(build_bb_system(bb_small(), 40, 100), CapExceeded);
}

TEST_CASE("decoupled limits freeze the condensate") {
    auto times = ode::linear_grid(0.0, 3.0, 7);
    {
        auto p = bb_small();
        p.g = 0.0;
        auto sys = build_bb_system(p, 3);
        auto rho0 = DensityMatrix::fock_state(sys.space, {2, 0, 0});
        auto na = expectations(build_mode_op(sys.space, "a", ModeOp::number), evolve(sys, rho0, times));
        for (double x : na) CHECK(std::abs(x - 2.0) < 1e-12);
    }
    {
        auto p = bf_small();
        p.g_alpha = 0.0;
        auto sys = build_bf_system(p, 3);
        auto rho0 = DensityMatrix::fock_state(sys.space, {2, 0, 0, 0});
        auto na = expectations(build_mode_op(sys.space, "a", ModeOp::number), evolve(sys, rho0, times));
        for (double x : na) CHECK(std::abs(x - 2.0) < 1e-12);
    }
    {
        auto p = fb_small(0.5);
        p.gamma_decay = 0.0;
        auto sys = build_fb_system(p, 3, 5);
        auto rho0 = DensityMatrix::fock_state(sys.space, {2, 0});
        auto states = evolve(sys, rho0, times);
        auto na = expectations(build_mode_op(sys.space, "a", ModeOp::number), states);
        auto nb = expectations(build_mode_op(sys.space, "b", ModeOp::number), states);
        for (std::size_t i = 0; i < na.size(); ++i) {
            CHECK(std::abs(na[i] - 2.0) < 1e-12);
            CHECK(std::abs(nb[i]) < 1e-12);
        }
    }
}

TEST_CASE("diagonal Hamiltonian without jumps keeps populations") {
    auto p = fb_small();
    auto sys = build_fb_system(p, 3, 5);
    sys.jumps.clear();
    sys.jump_labels.clear();
    auto rho0 = DensityMatrix::random(sys.space, fb_sector(sys.space, 4), 11);
    auto states = evolve(sys, rho0, ode::linear_grid(0.0, 2.0, 5));
    for (const auto& r : states)
        CHECK((r.matrix().diagonal() - rho0.matrix().diagonal()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("evolution stays physical and conserves particle number") {
    auto bbs = build_bb_system(bb_small(), 3);
    auto bb_states = evolve(bbs, DensityMatrix::fock_state(bbs.space, {2, 0, 0}), ode::linear_grid(0.0, 5.0, 21));
    auto bb_total = build_mode_op(bbs.space, "a", ModeOp::number) + build_mode_op(bbs.space, "b", ModeOp::number);
    for (const auto& r : bb_states) {
        auto rep = r.physicality();
        CHECK(rep.trace_defect < 1e-8);
        CHECK(rep.hermiticity_defect < 1e-10);
        CHECK(rep.min_eigenvalue >= -1e-8);
        CHECK(std::abs(expectation(bb_total, r).real() - 2.0) < 1e-8);
    }

    auto fbs = build_fb_system(fb_small(0.4), 3, 5);
    auto fb_states = evolve(fbs, DensityMatrix::fock_state(fbs.space, {2, 0}), ode::linear_grid(0.0, 2.0, 21));
    auto fb_total = Complex(2.0, 0.0) * build_mode_op(fbs.space, "a", ModeOp::number) +
                    build_mode_op(fbs.space, "b", ModeOp::number);
    for (const auto& r : fb_states) {
        auto rep = r.physicality();
        CHECK(rep.trace_defect < 1e-8);
        CHECK(rep.hermiticity_defect < 1e-10);
        CHECK(rep.min_eigenvalue >= -1e-8);
        CHECK(std::abs(expectation(fb_total, r).real() - 4.0) < 1e-8);
    }
}

TEST_CASE("superoperator paths agree with operator stepping") {
    auto sys = build_bb_system(bb_small(), 3);
    auto rho0 = DensityMatrix::random(sys.space, bb_sector(sys.space, 2), 3);
    EvolveOptions super, direct;
    direct.propagator_dim_limit = 0;
    // Short intervals step with matvecs; the long final interval powers the step map.
    std::vector<double> times{0.0, 0.25, 0.5, 60.0};
    auto a = evolve(sys, rho0, times, super);
    auto b = evolve(sys, rho0, times, direct);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i].matrix() - b[i].matrix()).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("FB populations are independent of dephasing") {
    auto times = ode::linear_grid(0.0, 2.0, 21);
    std::vector<std::vector<double>> na, nb;
    for (double phi : {0.0, 9.0}) {
        auto sys = build_fb_system(fb_small(phi), 3, 5);
        auto states = evolve(sys, DensityMatrix::fock_state(sys.space, {2, 0}), times);
        na.push_back(expectations(build_mode_op(sys.space, "a", ModeOp::number), states));
        nb.push_back(expectations(build_mode_op(sys.space, "b", ModeOp::number), states));
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(na[0][i] - na[1][i]) < 1e-10);
        CHECK(std::abs(nb[0][i] - nb[1][i]) < 1e-10);
    }
}

TEST_CASE("EOM identity: decoupled BB gives zero residual") {
    auto p = bb_small();
    p.g = 0.0;
    auto sys = build_bb_system(p, 3);
    auto rho = DensityMatrix::random(sys.space, bb_sector(sys.space, 2), 5);
    auto id = bb_identities(sys, p, {});
    REQUIRE(!id.empty());
    CHECK(check_eom_identity(sys, rho, id[0].lhs, id[0].rhs) == 0.0);
}

TEST_CASE("EOM identities along evolutions") {
    {
        auto p = bf_small();
        auto sys = build_bf_system(p, 3);
        auto states = evolve(sys, DensityMatrix::fock_state(sys.space, {2, 0, 0, 0}), ode::linear_grid(0.1, 4.0, 10));
        for (const auto& id : bf_identities(sys, p))
            for (const auto& r : states) CHECK(check_eom_identity(sys, r, id.lhs, id.rhs) < 1e-8);
    }
    {
        auto p = fb_small(0.3);
        auto sys = build_fb_system(p, 3, 5);
        auto mid = evolve(sys, DensityMatrix::fock_state(sys.space, {2, 0}), std::vector<double>{0.3});
        for (const auto& id : fb_identities(sys, p))
            CHECK(check_eom_identity(sys, mid.back(), id.lhs, id.rhs) < 1e-8);
    }
    {
        auto p = bb_small();
        CollisionCouplings coll{0.3, 0.5, 0.2};
        auto sys = build_bb_system(p, 3, coll);
        auto rho = DensityMatrix::random(sys.space, bb_sector(sys.space, 2), 17);
        for (const auto& id : bb_identities(sys, p, coll)) {
            CAPTURE(id.name);
            CHECK(check_eom_identity(sys, rho, id.lhs, id.rhs) < 1e-8);
        }
    }
}

TEST_CASE("collision commutator formula") {
    auto space = std::make_shared<FockSpace>(
        std::vector<Mode>{{"a", Statistics::bose, 4}, {"b", Statistics::bose, 4}, {"c", Statistics::fermi, 2}});
    CollisionCouplings coll{0.37, 1.3, 0.11};
    auto a = build_mode_op(space, "a", ModeOp::destroy);
    auto b = build_mode_op(space, "b", ModeOp::destroy);
    auto c = build_mode_op(space, "c", ModeOp::destroy);
    auto x = a.adjoint() * b * c;
    auto diff = commutator(collision_hamiltonian(space, coll), x) - collision_commutator_formula(space, coll);
    CHECK(max_abs(diff) < 1e-12);
}

TEST_CASE("identity battery") {
    for (std::uint64_t seed : {1u, 42u}) {
        auto report = run_identity_battery(seed);
        CHECK(report.seed == seed);
        CHECK(report.identities.size() >= 4);
        for (const auto& r : report.identities) {
            CAPTURE(r.name);
            CHECK(r.samples == 20);
            CHECK(r.max_residual < 1e-8);
        }
        CHECK(report.collision_commutator_residual < 1e-12);
        CHECK(report.passed());
    }
}

TEST_CASE("random states are physical and sector-restricted") {
    auto sys = build_bb_system(bb_small(), 3);
    auto sector = bb_sector(sys.space, 2);
    auto r1 = DensityMatrix::random(sys.space, sector, 9);
    auto r2 = DensityMatrix::random(sys.space, sector, 9);
    CHECK(r1.matrix() == r2.matrix());
    CHECK_NOTHROW(r1.check_physical());
    auto outside = identity(sys.space) - sector;
    CHECK(std::abs(expectation(outside, r1)) < 1e-14);

    DenseMatrix bad = r1.matrix();
    bad(0, 0) += 0.1;
    CHECK_THROWS_AS(DensityMatrix(sys.space, bad).check_physical(), NonPhysicalState);
}

TEST_CASE("mean-field comparison at N = 2 (reported only)") {
    auto p = bb_small();
    p.g = 0.01;
    p.delta = 0.0;
    p.gamma_cap = 1.0;
    p.g_phase = 0.0;
    auto sys = build_bb_system(p, 3);
    double t_end = 3.0 * bb::bb_logistic_time_at(0.5, 2.0, bb::bb_omega(p));
    auto times = ode::linear_grid(0.0, t_end, 11);
    auto exact = expectations(build_mode_op(sys.space, "b", ModeOp::number),
                              evolve(sys, DensityMatrix::fock_state(sys.space, {2, 0, 0}), times));
    auto mf = bb::bb_simulate(p, bb::Variant::full, times).column("n_b");
    double dev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) dev = std::max(dev, std::abs(exact[i] - mf[i]));
    MESSAGE("max |<n_b>_exact - <n_b>_mean-field| at N = 2: " << dev);
    CHECK(std::isfinite(dev));
}
