#pragma once

// Exact Lindblad models matching the three mean-field decay models, plus the
// operator identities their equations of motion rest on.

#include <cstdint>
#include <string>
#include <vector>

#include "superrad/bb.hpp"
#include "superrad/bf.hpp"
#include "superrad/fb.hpp"
#include "superrad/fock.hpp"
#include "superrad/lindblad.hpp"

namespace superrad::oracle {

struct CollisionCouplings {
    double u_a = 0.0;
    double u_b = 0.0;
    double u_ab = 0.0;
};

// Modes (a: bose, b: bose, c: fermi);
// H = eps_a n_a + eps_b n_b + E_nu n_c + g c^dag b^dag a + g* a^dag b c + H_coll,
// single jump sqrt(2 Gamma) c. Without bare energies, eps_a = delta and
// eps_b = E_nu = 0. Throws TruncationTooSmall if bose_trunc < N + 1.
LindbladSystem build_bb_system(const bb::BBParams& p, std::size_t bose_trunc,
                               std::size_t cap = kDefaultDimensionCap);
LindbladSystem build_bb_system(const bb::BBParams& p, std::size_t bose_trunc, const CollisionCouplings& coll,
                               std::size_t cap = kDefaultDimensionCap);

// U_a n_a^2 + U_b n_b^2 + U_ab n_a n_b on a space with modes a and b.
Operator collision_hamiltonian(const SpacePtr& space, const CollisionCouplings& coll);
// (2U_a - U_ab) a^dag b c n_a - (2U_b - U_ab) a^dag b c n_b + (U_a + U_b - U_ab) a^dag b c.
Operator collision_commutator_formula(const SpacePtr& space, const CollisionCouplings& coll);

// Modes (a: bose; b0..bM: fermi; c: fermi); H diagonal in the occupations;
// jumps sqrt(g_alpha) c^dag b_alpha^dag a, sqrt(Gamma) c, sqrt(gamma_k) b_{k-1}^dag b_k.
LindbladSystem build_bf_system(const bf::BFParams& p, std::size_t bose_trunc,
                               std::size_t cap = kDefaultDimensionCap);

// Modes (a: bose pairs, b: bose); H = E_a n_a + E_b n_b;
// jumps sqrt(gamma) (b^dag)^2 a, sqrt(gamma_phi_a) n_a, sqrt(gamma_phi_b) n_b.
LindbladSystem build_fb_system(const fb::FBParams& p, std::size_t pair_trunc, std::size_t bose_trunc,
                               std::size_t cap = kDefaultDimensionCap);

// Number-conserving sectors on which the truncated ladder algebra is exact for
// every identity below: n_a + n_b <= N, n_a + sum_k n_k <= N, 2 n_a + n_b <= N.
Operator bb_sector(const SpacePtr& space, std::size_t n_total);
Operator bf_sector(const SpacePtr& space, std::size_t n_total);
Operator fb_sector(const SpacePtr& space, std::size_t n_total);

// d<lhs>/dt = <rhs> before any factorisation.
struct EomIdentity {
    std::string name;
    Operator lhs;
    Operator rhs;
};

// bb.population: n_a -> i (g c^dag b^dag a - g* a^dag b c)
// bb.neutrino:   n_c -> -i (g c^dag b^dag a - g* a^dag b c) - 2 Gamma n_c
// bb.correlator: a^dag b c -> (i Delta - Gamma) a^dag b c + i [H_coll, a^dag b c]
//                + i g (n_c n_b (1 + n_a) - n_a (1 + n_b)(1 - n_c))
std::vector<EomIdentity> bb_identities(const LindbladSystem& sys, const bb::BBParams& p,
                                       const CollisionCouplings& coll);
// bf.atom (n_a), bf.neutrino (n_c) and bf.level.<k> (n_k) in the untruncated
// correlator form.
std::vector<EomIdentity> bf_identities(const LindbladSystem& sys, const bf::BFParams& p);
// fb.pairs: n_a -> -gamma n_a (n_b + 1)(n_b + 2); fb.bosons: n_b -> 2 gamma n_a (n_b + 1)(n_b + 2).
std::vector<EomIdentity> fb_identities(const LindbladSystem& sys, const fb::FBParams& p);

struct IdentityResult {
    std::string name;
    std::size_t samples = 0;
    double max_residual = 0.0;
};

struct BatteryReport {
    std::uint64_t seed = 0;
    std::vector<IdentityResult> identities;
    double collision_commutator_residual = 0.0;
    bool passed(double identity_tol = 1e-8, double commutator_tol = 1e-12) const;
};

// Evaluates every identity on `n_states` seeded random density matrices per
// model: BB with N = 2, BF with N = 2 and levels {0, 1} (alpha = 1), FB with
// N = 4; plus the collision commutator with unequal couplings.
BatteryReport run_identity_battery(std::uint64_t seed, std::size_t n_states = 20);

}  // namespace superrad::oracle
