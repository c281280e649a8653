#include "superrad/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "superrad/error.hpp"

namespace superrad::oracle {

namespace {

using namespace std::complex_literals;

std::size_t integral_count(double n, const char* who) {
    double r = std::round(n);
    if (std::abs(r - n) > 1e-12 || r < 0) throw std::invalid_argument(std::string(who) + ": n_total must be a whole number");
    return static_cast<std::size_t>(r);
}

Operator op(const SpacePtr& s, const std::string& mode, ModeOp kind) { return build_mode_op(s, mode, kind); }

std::string level(std::size_t k) { return "b" + std::to_string(k); }

}  // namespace

Operator collision_hamiltonian(const SpacePtr& s, const CollisionCouplings& c) {
    Operator na = op(s, "a", ModeOp::number), nb = op(s, "b", ModeOp::number);
    return Complex(c.u_a) * (na * na) + Complex(c.u_b) * (nb * nb) + Complex(c.u_ab) * (na * nb);
}

Operator collision_commutator_formula(const SpacePtr& s, const CollisionCouplings& c) {
    Operator x = op(s, "a", ModeOp::create) * op(s, "b", ModeOp::destroy) * op(s, "c", ModeOp::destroy);
    Operator na = op(s, "a", ModeOp::number), nb = op(s, "b", ModeOp::number);
    return Complex(2 * c.u_a - c.u_ab) * (x * na) - Complex(2 * c.u_b - c.u_ab) * (x * nb) +
           Complex(c.u_a + c.u_b - c.u_ab) * x;
}

LindbladSystem build_bb_system(const bb::BBParams& p, std::size_t bose_trunc, std::size_t cap) {
    return build_bb_system(p, bose_trunc, CollisionCouplings{p.u, p.u, p.u}, cap);
}

LindbladSystem build_bb_system(const bb::BBParams& p, std::size_t bose_trunc, const CollisionCouplings& coll,
                               std::size_t cap) {
    p.validate();
    const std::size_t n = integral_count(p.n_total, "build_bb_system");
    if (bose_trunc < n + 1) throw TruncationTooSmall("build_bb_system: bose_trunc must be >= N + 1");
    auto s = std::make_shared<const FockSpace>(
        std::vector<Mode>{{"a", Statistics::bose, bose_trunc}, {"b", Statistics::bose, bose_trunc},
                          {"c", Statistics::fermi, 2}},
        cap);

    const double eps_a = p.eps_a.value_or(p.delta);
    const double eps_b = p.eps_b.value_or(0.0);
    const double e_nu = p.e_nu.value_or(0.0);
    const Complex g = p.g_complex();

    Operator vertex = op(s, "c", ModeOp::create) * op(s, "b", ModeOp::create) * op(s, "a", ModeOp::destroy);
    LindbladSystem sys;
    sys.space = s;
    sys.hamiltonian = Complex(eps_a) * op(s, "a", ModeOp::number) + Complex(eps_b) * op(s, "b", ModeOp::number) +
                      Complex(e_nu) * op(s, "c", ModeOp::number) + g * vertex + std::conj(g) * vertex.adjoint() +
                      collision_hamiltonian(s, coll);
    sys.jumps = {Complex(std::sqrt(2.0 * p.gamma_cap)) * op(s, "c", ModeOp::destroy)};
    sys.jump_labels = {"neutrino_escape"};
    sys.validate();
    return sys;
}

LindbladSystem build_bf_system(const bf::BFParams& p, std::size_t bose_trunc, std::size_t cap) {
    p.validate();
    const std::size_t n = integral_count(p.n_total, "build_bf_system");
    if (bose_trunc < n + 1) throw TruncationTooSmall("build_bf_system: bose_trunc must be >= N + 1");
    const std::size_t levels = p.levels();

    std::vector<Mode> modes{{"a", Statistics::bose, bose_trunc}};
    for (std::size_t k = 0; k < levels; ++k) modes.push_back({level(k), Statistics::fermi, 2});
    modes.push_back({"c", Statistics::fermi, 2});
    auto s = std::make_shared<const FockSpace>(std::move(modes), cap);

    LindbladSystem sys;
    sys.space = s;
    Operator h = Complex(p.e_a) * op(s, "a", ModeOp::number) + Complex(p.e_nu) * op(s, "c", ModeOp::number);
    if (!p.e_levels.empty())
        for (std::size_t k = 0; k < levels; ++k) h = h + Complex(p.e_levels[k]) * op(s, level(k), ModeOp::number);
    sys.hamiltonian = h;

    sys.jumps.push_back(Complex(std::sqrt(p.g_alpha)) * (op(s, "c", ModeOp::create) *
                                                         op(s, level(p.alpha), ModeOp::create) *
                                                         op(s, "a", ModeOp::destroy)));
    sys.jump_labels.push_back("electron_capture");
    sys.jumps.push_back(Complex(std::sqrt(p.gamma_cap)) * op(s, "c", ModeOp::destroy));
    sys.jump_labels.push_back("neutrino_escape");
    for (std::size_t k = 1; k < levels; ++k) {
        sys.jumps.push_back(Complex(std::sqrt(p.gamma_link(k))) *
                            (op(s, level(k - 1), ModeOp::create) * op(s, level(k), ModeOp::destroy)));
        sys.jump_labels.push_back("thermalization." + std::to_string(k));
    }
    sys.validate();
    return sys;
}

LindbladSystem build_fb_system(const fb::FBParams& p, std::size_t pair_trunc, std::size_t bose_trunc,
                               std::size_t cap) {
    p.validate();
    const std::size_t n = integral_count(p.n_total, "build_fb_system");
    if (pair_trunc < n / 2 + 1 || bose_trunc < n + 1)
        throw TruncationTooSmall("build_fb_system: need pair_trunc >= N/2 + 1 and bose_trunc >= N + 1");
    auto s = std::make_shared<const FockSpace>(
        std::vector<Mode>{{"a", Statistics::bose, pair_trunc}, {"b", Statistics::bose, bose_trunc}}, cap);

    Operator na = op(s, "a", ModeOp::number), nb = op(s, "b", ModeOp::number);
    Operator bdag = op(s, "b", ModeOp::create);
    LindbladSystem sys;
    sys.space = s;
    sys.hamiltonian = Complex(p.e_a) * na + Complex(p.e_b) * nb;
    sys.jumps = {Complex(std::sqrt(p.gamma_decay)) * (bdag * bdag * op(s, "a", ModeOp::destroy)),
                 Complex(std::sqrt(p.gamma_phi_a)) * na, Complex(std::sqrt(p.gamma_phi_b)) * nb};
    sys.jump_labels = {"pair_decay", "dephasing_a", "dephasing_b"};
    sys.validate();
    return sys;
}

Operator bb_sector(const SpacePtr& s, std::size_t n) {
    const std::size_t a = s->index_of("a"), b = s->index_of("b");
    return sector_projector(s, [=](const std::vector<std::size_t>& occ) { return occ[a] + occ[b] <= n; });
}

Operator bf_sector(const SpacePtr& s, std::size_t n) {
    const std::size_t a = s->index_of("a");
    std::vector<std::size_t> ladder;
    for (std::size_t m = 0; m < s->modes().size(); ++m)
        if (s->modes()[m].label.size() > 1 && s->modes()[m].label[0] == 'b') ladder.push_back(m);
    return sector_projector(s, [=](const std::vector<std::size_t>& occ) {
        std::size_t total = occ[a];
        for (auto m : ladder) total += occ[m];
        return total <= n;
    });
}

Operator fb_sector(const SpacePtr& s, std::size_t n) {
    const std::size_t a = s->index_of("a"), b = s->index_of("b");
    return sector_projector(s, [=](const std::vector<std::size_t>& occ) { return 2 * occ[a] + occ[b] <= n; });
}

std::vector<EomIdentity> bb_identities(const LindbladSystem& sys, const bb::BBParams& p,
                                       const CollisionCouplings& coll) {
    const auto& s = sys.space;
    const Complex g = p.g_complex();
    Operator one = identity(s);
    Operator na = op(s, "a", ModeOp::number), nb = op(s, "b", ModeOp::number), nc = op(s, "c", ModeOp::number);
    Operator x = op(s, "a", ModeOp::create) * op(s, "b", ModeOp::destroy) * op(s, "c", ModeOp::destroy);
    Operator xdag = x.adjoint();
    Operator flow = 1i * (g * xdag - std::conj(g) * x);

    Operator source = nc * nb * (one + na) - na * (one + nb) * (one - nc);
    Operator correlator_rhs = (1i * p.delta - p.gamma_cap) * x + 1i * collision_commutator_formula(s, coll) +
                              (1i * g) * source;
    return {
        {"bb.population", na, flow},
        {"bb.neutrino", nc, Complex(-1.0) * flow - Complex(2.0 * p.gamma_cap) * nc},
        {"bb.correlator", x, correlator_rhs},
    };
}

std::vector<EomIdentity> bf_identities(const LindbladSystem& sys, const bf::BFParams& p) {
    const auto& s = sys.space;
    const std::size_t levels = p.levels();
    Operator one = identity(s);
    Operator na = op(s, "a", ModeOp::number), nc = op(s, "c", ModeOp::number);
    std::vector<Operator> nk;
    for (std::size_t k = 0; k < levels; ++k) nk.push_back(op(s, level(k), ModeOp::number));
    Operator capture = Complex(p.g_alpha) * (na * (one - nk[p.alpha]) * (one - nc));

    std::vector<EomIdentity> out{
        {"bf.atom", na, Complex(-1.0) * capture},
        {"bf.neutrino", nc, capture - Complex(p.gamma_cap) * nc},
    };
    for (std::size_t k = 0; k < levels; ++k) {
        Operator rhs = k == p.alpha ? capture : zero(s);
        if (k > 0) rhs = rhs - Complex(p.gamma_link(k)) * (nk[k] * (one - nk[k - 1]));
        if (k + 1 < levels) rhs = rhs + Complex(p.gamma_link(k + 1)) * (nk[k + 1] * (one - nk[k]));
        out.push_back({"bf.level." + std::to_string(k), nk[k], rhs});
    }
    return out;
}

std::vector<EomIdentity> fb_identities(const LindbladSystem& sys, const fb::FBParams& p) {
    const auto& s = sys.space;
    Operator one = identity(s);
    Operator na = op(s, "a", ModeOp::number), nb = op(s, "b", ModeOp::number);
    Operator events = Complex(p.gamma_decay) * (na * (nb + one) * (nb + Complex(2.0) * one));
    return {
        {"fb.pairs", na, Complex(-1.0) * events},
        {"fb.bosons", nb, Complex(2.0) * events},
    };
}

}  // namespace superrad::oracle
