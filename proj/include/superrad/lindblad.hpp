#pragma once

// Exact master-equation propagation on small truncated Fock spaces.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "superrad/fock.hpp"

namespace superrad::oracle {

// Hamiltonian plus jump operators; every jump already includes its sqrt(rate).
struct LindbladSystem {
    SpacePtr space;
    Operator hamiltonian;
    std::vector<Operator> jumps;
    std::vector<std::string> jump_labels;

    // Throws std::invalid_argument if H is not Hermitian within 1e-12 or sizes differ.
    void validate() const;
};

struct PhysicalityReport {
    double trace_defect = 0.0;        // |tr rho - 1|
    double hermiticity_defect = 0.0;  // max |rho - rho^dag|
    double min_eigenvalue = 0.0;
};

class DensityMatrix {
public:
    DensityMatrix(SpacePtr space, DenseMatrix matrix);

    // Pure Fock state with the given occupations.
    static DensityMatrix fock_state(const SpacePtr& space, const std::vector<std::size_t>& occupations);
    // G G^dag / tr(G G^dag) for a seeded complex Gaussian G restricted to the
    // basis states kept by `sector` (a diagonal projector).
    static DensityMatrix random(const SpacePtr& space, const Operator& sector, std::uint64_t seed);

    const SpacePtr& space() const noexcept { return space_; }
    const DenseMatrix& matrix() const noexcept { return matrix_; }

    PhysicalityReport physicality() const;
    // Throws NonPhysicalState when trace or Hermiticity defects exceed 1e-8 or
    // the smallest eigenvalue is below -1e-8.
    void check_physical() const;

private:
    SpacePtr space_;
    DenseMatrix matrix_;
};

// L[rho] = -i[H, rho] + sum_k (L_k rho L_k^dag - 1/2 {L_k^dag L_k, rho}).
DenseMatrix lindblad_generator(const LindbladSystem& system, const DenseMatrix& rho);

// tr(O rho).
Complex expectation(const Operator& op, const DensityMatrix& rho);
Complex expectation(const Operator& op, const DenseMatrix& rho);

struct EvolveOptions {
    // Target RK4 local truncation error per step, estimated as (h B)^5 / 120
    // with B an upper bound on the generator norm.
    double local_tol = 1e-10;
    // Systems up to this dimension use the dense superoperator on the
    // vectorised density matrix, either stepping with matvecs or powering the
    // one-step RK4 map, whichever is cheaper per interval; larger ones step
    // on the sparse operators.
    std::size_t propagator_dim_limit = 40;
};

// Fixed-step RK4 integration of the master equation. Returns the state at
// every sample time (the first sample may equal 0 and returns rho0). Every
// returned state passes check_physical().
std::vector<DensityMatrix> evolve(const LindbladSystem& system, const DensityMatrix& rho0,
                                  std::span<const double> sample_times, const EvolveOptions& options = {});

// Upper bound on the norm of the Lindblad generator used for step selection.
double generator_norm_bound(const LindbladSystem& system);
// Number of RK4 steps used for an interval of length dt.
std::size_t rk4_steps_for(const LindbladSystem& system, double dt, const EvolveOptions& options = {});

// |tr(lhs L[rho]) - tr(rhs rho)| / max(1, |tr(rhs rho)|): zero when
// d<lhs>/dt = <rhs> holds exactly as an operator identity on rho.
double check_eom_identity(const LindbladSystem& system, const DensityMatrix& rho, const Operator& lhs_observable,
                          const Operator& rhs_expression);

}  // namespace superrad::oracle
