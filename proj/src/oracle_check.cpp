#include <algorithm>

#include "superrad/oracle.hpp"

namespace superrad::oracle {

namespace {

void accumulate(std::vector<IdentityResult>& out, const LindbladSystem& sys, const std::vector<EomIdentity>& ids,
                const Operator& sector, std::uint64_t seed, std::size_t n_states) {
    std::vector<IdentityResult> local;
    for (const auto& id : ids) local.push_back({id.name, 0, 0.0});
    for (std::size_t k = 0; k < n_states; ++k) {
        DensityMatrix rho = DensityMatrix::random(sys.space, sector, seed + k);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            double r = check_eom_identity(sys, rho, ids[i].lhs, ids[i].rhs);
            local[i].max_residual = std::max(local[i].max_residual, r);
            ++local[i].samples;
        }
    }
    out.insert(out.end(), local.begin(), local.end());
}

}  // namespace

bool BatteryReport::passed(double identity_tol, double commutator_tol) const {
    for (const auto& r : identities)
        if (!(r.max_residual < identity_tol)) return false;
    return collision_commutator_residual < commutator_tol;
}

BatteryReport run_identity_battery(std::uint64_t seed, std::size_t n_states) {
    BatteryReport report;
    report.seed = seed;

    bb::BBParams bbp;
    bbp.n_total = 2;
    bbp.g = 0.7;
    bbp.g_phase = 0.4;
    bbp.eps_a = 1.3;
    bbp.eps_b = 0.4;
    bbp.e_nu = 0.2;
    bbp.delta = 0.7;
    bbp.gamma_cap = 1.1;
    const CollisionCouplings coll{0.3, 0.5, 0.2};
    LindbladSystem bbs = build_bb_system(bbp, 3, coll);
    accumulate(report.identities, bbs, bb_identities(bbs, bbp, coll), bb_sector(bbs.space, 2), seed, n_states);

    Operator x = build_mode_op(bbs.space, "a", ModeOp::create) * build_mode_op(bbs.space, "b", ModeOp::destroy) *
                 build_mode_op(bbs.space, "c", ModeOp::destroy);
    report.collision_commutator_residual =
        max_abs(commutator(collision_hamiltonian(bbs.space, coll), x) - collision_commutator_formula(bbs.space, coll));

    bf::BFParams bfp;
    bfp.n_total = 2;
    bfp.alpha = 1;
    bfp.n_levels = 2;
    bfp.g_alpha = 0.8;
    bfp.gamma_th = 0.6;
    bfp.gamma_cap = 1.5;
    bfp.e_a = 2.0;
    bfp.e_levels = {0.1, 0.5};
    bfp.e_nu = 1.0;
    LindbladSystem bfs = build_bf_system(bfp, 3);
    accumulate(report.identities, bfs, bf_identities(bfs, bfp), bf_sector(bfs.space, 2), seed + 1000, n_states);

    fb::FBParams fbp;
    fbp.n_total = 4;
    fbp.gamma_decay = 0.9;
    fbp.gamma_phi_a = 0.3;
    fbp.gamma_phi_b = 0.2;
    fbp.e_a = 1.0;
    fbp.e_b = 0.4;
    LindbladSystem fbs = build_fb_system(fbp, 3, 5);
    accumulate(report.identities, fbs, fb_identities(fbs, fbp), fb_sector(fbs.space, 4), seed + 2000, n_states);

    return report;
}

}  // namespace superrad::oracle
