#pragma once

// Truncated tensor-product Fock spaces with mixed statistics. Basis states are
// ordered with the first mode most significant; fermionic operators carry a
// Jordan-Wigner parity string over all preceding fermionic modes.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace superrad::oracle {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr std::size_t kDefaultDimensionCap = 4096;

enum class Statistics { bose, fermi };

struct Mode {
    std::string label;
    Statistics statistics = Statistics::bose;
    std::size_t local_dim = 2;
};

class FockSpace {
public:
    // Throws CapExceeded if the product of local dimensions exceeds `cap`.
    explicit FockSpace(std::vector<Mode> modes, std::size_t cap = kDefaultDimensionCap);

    const std::vector<Mode>& modes() const noexcept { return modes_; }
    std::size_t total_dim() const noexcept { return total_dim_; }
    // Throws UnknownMode.
    std::size_t index_of(const std::string& label) const;
    std::size_t occupation(std::size_t basis_index, std::size_t mode) const;
    std::vector<std::size_t> occupations(std::size_t basis_index) const;
    std::size_t basis_index(const std::vector<std::size_t>& occupations) const;

private:
    std::vector<Mode> modes_;
    std::vector<std::size_t> strides_;
    std::size_t total_dim_ = 1;
};

using SpacePtr = std::shared_ptr<const FockSpace>;

struct Operator {
    SpacePtr space;
    SparseMatrix matrix;

    std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
    Operator adjoint() const;
    DenseMatrix dense() const { return DenseMatrix(matrix); }
};

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex s, const Operator& a);
Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

Operator identity(const SpacePtr& space);
Operator zero(const SpacePtr& space);

enum class ModeOp { destroy, create, number };

// Ladder or number operator of one mode. Throws UnknownMode.
Operator build_mode_op(const SpacePtr& space, const std::string& mode, ModeOp kind);

// Diagonal projector onto basis states whose occupations satisfy `keep`.
Operator sector_projector(const SpacePtr& space, const std::function<bool(const std::vector<std::size_t>&)>& keep);

double max_abs(const Operator& op);

}  // namespace superrad::oracle
