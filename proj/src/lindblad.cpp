#include "superrad/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "superrad/error.hpp"

namespace superrad::oracle {

namespace {

using namespace std::complex_literals;

double induced_norm_bound(const DenseMatrix& m) {
    double n1 = m.cwiseAbs().colwise().sum().maxCoeff();
    double ninf = m.cwiseAbs().rowwise().sum().maxCoeff();
    return std::sqrt(n1 * ninf);
}

DenseMatrix effective_hamiltonian(const LindbladSystem& sys) {
    DenseMatrix heff = sys.hamiltonian.dense();
    for (const auto& l : sys.jumps) heff -= 0.5i * DenseMatrix(l.matrix.adjoint() * l.matrix);
    return heff;
}

// Column-major vectorisation: vec(A X B) = (B^T kron A) vec(X).
DenseMatrix superoperator(const LindbladSystem& sys) {
    const Eigen::Index d = static_cast<Eigen::Index>(sys.space->total_dim());
    const DenseMatrix heff = effective_hamiltonian(sys);
    const DenseMatrix id = DenseMatrix::Identity(d, d);
    DenseMatrix s = DenseMatrix::Zero(d * d, d * d);
    auto add_kron = [&](const DenseMatrix& a, const DenseMatrix& b, Complex scale) {
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                Complex aij = a(i, j);
                if (aij == Complex(0)) continue;
                s.block(i * d, j * d, d, d) += (scale * aij) * b;
            }
    };
    add_kron(id, heff, -1i);
    add_kron(heff.conjugate(), id, 1i);
    for (const auto& l : sys.jumps) {
        DenseMatrix ld = l.dense();
        add_kron(ld.conjugate(), ld, 1.0);
    }
    return s;
}

DenseMatrix matrix_power(DenseMatrix base, std::size_t n) {
    DenseMatrix result = DenseMatrix::Identity(base.rows(), base.cols());
    bool first = true;
    while (n > 0) {
        if (n & 1u) {
            if (first) {
                result = base;
                first = false;
            } else {
                result = (result * base).eval();
            }
        }
        n >>= 1u;
        if (n > 0) base = (base * base).eval();
    }
    return result;
}

DenseMatrix hermitian_part(const DenseMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

void LindbladSystem::validate() const {
    if (!space) throw std::invalid_argument("LindbladSystem: no space");
    const auto d = static_cast<Eigen::Index>(space->total_dim());
    if (hamiltonian.matrix.rows() != d) throw DimensionMismatch("LindbladSystem: Hamiltonian size");
    for (const auto& l : jumps)
        if (l.matrix.rows() != d) throw DimensionMismatch("LindbladSystem: jump size");
    DenseMatrix h = hamiltonian.dense();
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("LindbladSystem: Hamiltonian is not Hermitian");
}

DensityMatrix::DensityMatrix(SpacePtr space, DenseMatrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
    const auto d = static_cast<Eigen::Index>(space_->total_dim());
    if (matrix_.rows() != d || matrix_.cols() != d) throw DimensionMismatch("DensityMatrix: size does not match space");
}

DensityMatrix DensityMatrix::fock_state(const SpacePtr& space, const std::vector<std::size_t>& occupations) {
    const auto d = static_cast<Eigen::Index>(space->total_dim());
    DenseMatrix m = DenseMatrix::Zero(d, d);
    auto i = static_cast<Eigen::Index>(space->basis_index(occupations));
    m(i, i) = 1.0;
    return {space, std::move(m)};
}

DensityMatrix DensityMatrix::random(const SpacePtr& space, const Operator& sector, std::uint64_t seed) {
    const auto d = static_cast<Eigen::Index>(space->total_dim());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    DenseMatrix g(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) g(i, j) = Complex(normal(rng), normal(rng));
    g = sector.matrix * g;
    DenseMatrix rho = g * g.adjoint();
    Complex tr = rho.trace();
    if (std::abs(tr) == 0.0) throw std::invalid_argument("DensityMatrix::random: empty sector");
    rho /= tr.real();
    rho = hermitian_part(rho);
    return {space, std::move(rho)};
}

PhysicalityReport DensityMatrix::physicality() const {
    PhysicalityReport r;
    r.trace_defect = std::abs(matrix_.trace() - Complex(1.0));
    r.hermiticity_defect = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian_part(matrix_), Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    return r;
}

void DensityMatrix::check_physical() const {
    auto r = physicality();
    if (r.trace_defect > 1e-8 || r.hermiticity_defect > 1e-8 || r.min_eigenvalue < -1e-8)
        throw NonPhysicalState("density matrix left the physical set: trace defect " + std::to_string(r.trace_defect) +
                               ", hermiticity defect " + std::to_string(r.hermiticity_defect) +
                               ", min eigenvalue " + std::to_string(r.min_eigenvalue));
}

DenseMatrix lindblad_generator(const LindbladSystem& sys, const DenseMatrix& rho) {
    DenseMatrix out = -1i * (sys.hamiltonian.matrix * rho - rho * sys.hamiltonian.matrix);
    for (const auto& l : sys.jumps) {
        SparseMatrix ldl = l.matrix.adjoint() * l.matrix;
        DenseMatrix lr = l.matrix * rho;
        out += lr * l.matrix.adjoint();
        out -= 0.5 * (ldl * rho + rho * ldl);
    }
    return out;
}

Complex expectation(const Operator& op, const DenseMatrix& rho) {
    if (op.matrix.rows() != rho.rows()) throw DimensionMismatch("expectation: size mismatch");
    Complex acc = 0.0;
    for (int k = 0; k < op.matrix.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
    return acc;
}

Complex expectation(const Operator& op, const DensityMatrix& rho) { return expectation(op, rho.matrix()); }

double generator_norm_bound(const LindbladSystem& sys) {
    double b = 2.0 * induced_norm_bound(effective_hamiltonian(sys));
    for (const auto& l : sys.jumps) {
        double n = induced_norm_bound(l.dense());
        b += n * n;
    }
    return b;
}

std::size_t rk4_steps_for(const LindbladSystem& sys, double dt, const EvolveOptions& opt) {
    if (dt <= 0) return 0;
    double b = generator_norm_bound(sys);
    if (b == 0.0) return 1;
    double h_max = std::pow(120.0 * opt.local_tol, 0.2) / b;
    return static_cast<std::size_t>(std::ceil(dt / h_max));
}

std::vector<DensityMatrix> evolve(const LindbladSystem& sys, const DensityMatrix& rho0,
                                  std::span<const double> sample_times, const EvolveOptions& opt) {
    sys.validate();
    if (rho0.matrix().rows() != static_cast<Eigen::Index>(sys.space->total_dim()))
        throw DimensionMismatch("evolve: rho0 does not match system");
    for (std::size_t i = 0; i < sample_times.size(); ++i)
        if (sample_times[i] < 0 || (i > 0 && !(sample_times[i] > sample_times[i - 1])))
            throw std::invalid_argument("evolve: sample times must be non-negative and strictly increasing");

    const auto d = static_cast<Eigen::Index>(sys.space->total_dim());
    const bool use_propagator = sys.space->total_dim() <= opt.propagator_dim_limit;
    DenseMatrix super;
    SparseMatrix super_sparse;
    if (use_propagator) {
        super = superoperator(sys);
        super_sparse = super.sparseView();
    }

    struct Cached {
        double dt;
        DenseMatrix map;
    };
    std::map<std::size_t, Cached> cache;

    std::vector<DensityMatrix> out;
    out.reserve(sample_times.size());
    DenseMatrix rho = rho0.matrix();
    double t = 0.0;
    for (double ts : sample_times) {
        const double dt = ts - t;
        if (dt > 0) {
            const std::size_t steps = rk4_steps_for(sys, dt, opt);
            const double h = dt / static_cast<double>(steps);
            const double dd = static_cast<double>(d) * static_cast<double>(d);
            // Cost estimates: sparse RK4 matvecs vs building and powering the dense
            // step map (dense products run roughly 8x faster per flop).
            const bool power =
                use_propagator && 4.0 * static_cast<double>(steps) * static_cast<double>(super_sparse.nonZeros()) >
                                      (4.0 + 2.0 * std::log2(static_cast<double>(steps) + 1.0)) * dd * dd * dd / 8.0;
            if (use_propagator && !power) {
                Eigen::VectorXcd v = Eigen::Map<Eigen::VectorXcd>(rho.data(), d * d);
                for (std::size_t s = 0; s < steps; ++s) {
                    Eigen::VectorXcd k1 = super_sparse * v;
                    Eigen::VectorXcd k2 = super_sparse * (v + 0.5 * h * k1);
                    Eigen::VectorXcd k3 = super_sparse * (v + 0.5 * h * k2);
                    Eigen::VectorXcd k4 = super_sparse * (v + h * k3);
                    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                }
                rho = Eigen::Map<DenseMatrix>(v.data(), d, d);
            } else if (power) {
                auto it = cache.find(steps);
                if (it == cache.end() || std::abs(it->second.dt - dt) > 1e-12 * dt) {
                    DenseMatrix hs = h * super;
                    const DenseMatrix id = DenseMatrix::Identity(d * d, d * d);
                    // I + hS + (hS)^2/2 + (hS)^3/6 + (hS)^4/24: one RK4 step of a linear system.
                    DenseMatrix step = id + hs * (id + hs * (id + hs * (id + hs / 4.0) / 3.0) / 2.0);
                    it = cache.insert_or_assign(steps, Cached{dt, matrix_power(std::move(step), steps)}).first;
                }
                Eigen::Map<Eigen::VectorXcd> v(rho.data(), d * d);
                Eigen::VectorXcd next = it->second.map * v;
                rho = Eigen::Map<DenseMatrix>(next.data(), d, d);
            } else {
                for (std::size_t s = 0; s < steps; ++s) {
                    DenseMatrix k1 = lindblad_generator(sys, rho);
                    DenseMatrix k2 = lindblad_generator(sys, rho + 0.5 * h * k1);
                    DenseMatrix k3 = lindblad_generator(sys, rho + 0.5 * h * k2);
                    DenseMatrix k4 = lindblad_generator(sys, rho + h * k3);
                    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                }
            }
        }
        t = ts;
        DensityMatrix sample(sys.space, rho);
        sample.check_physical();
        out.push_back(std::move(sample));
    }
    return out;
}

double check_eom_identity(const LindbladSystem& sys, const DensityMatrix& rho, const Operator& lhs,
                          const Operator& rhs) {
    const auto d = static_cast<Eigen::Index>(sys.space->total_dim());
    if (rho.matrix().rows() != d || lhs.matrix.rows() != d || rhs.matrix.rows() != d)
        throw DimensionMismatch("check_eom_identity: operator sizes differ from the system");
    Complex dlhs = expectation(lhs, lindblad_generator(sys, rho.matrix()));
    Complex r = expectation(rhs, rho);
    return std::abs(dlhs - r) / std::max(1.0, std::abs(r));
}

}  // namespace superrad::oracle
