#include "superrad/fock.hpp"

#include <cmath>
#include <stdexcept>

#include "superrad/error.hpp"

namespace superrad::oracle {

namespace {

void require_same_space(const Operator& a, const Operator& b) {
    if (a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols())
        throw DimensionMismatch("operator dimensions differ");
}

Operator make(const SpacePtr& space, SparseMatrix m) {
    m.makeCompressed();
    return {space, std::move(m)};
}

}  // namespace

FockSpace::FockSpace(std::vector<Mode> modes, std::size_t cap) : modes_(std::move(modes)) {
    if (modes_.empty()) throw std::invalid_argument("FockSpace: no modes");
    for (const auto& m : modes_) {
        if (m.local_dim < 1) throw std::invalid_argument("FockSpace: local_dim must be >= 1");
        if (m.statistics == Statistics::fermi && m.local_dim != 2)
            throw std::invalid_argument("FockSpace: fermionic mode '" + m.label + "' must have local_dim 2");
        for (const auto& other : modes_)
            if (&other != &m && other.label == m.label)
                throw std::invalid_argument("FockSpace: duplicate mode '" + m.label + "'");
        if (total_dim_ * m.local_dim > cap)
            throw CapExceeded("FockSpace: dimension exceeds cap " + std::to_string(cap));
        total_dim_ *= m.local_dim;
    }
    strides_.assign(modes_.size(), 1);
    for (std::size_t i = modes_.size() - 1; i-- > 0;) strides_[i] = strides_[i + 1] * modes_[i + 1].local_dim;
}

std::size_t FockSpace::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
        if (modes_[i].label == label) return i;
    throw UnknownMode("no mode labelled '" + label + "'");
}

std::size_t FockSpace::occupation(std::size_t basis_index, std::size_t mode) const {
    return (basis_index / strides_[mode]) % modes_[mode].local_dim;
}

std::vector<std::size_t> FockSpace::occupations(std::size_t basis_index) const {
    std::vector<std::size_t> occ(modes_.size());
    for (std::size_t m = 0; m < modes_.size(); ++m) occ[m] = occupation(basis_index, m);
    return occ;
}

std::size_t FockSpace::basis_index(const std::vector<std::size_t>& occ) const {
    if (occ.size() != modes_.size()) throw DimensionMismatch("basis_index: wrong number of occupations");
    std::size_t idx = 0;
    for (std::size_t m = 0; m < modes_.size(); ++m) {
        if (occ[m] >= modes_[m].local_dim) throw std::out_of_range("basis_index: occupation beyond truncation");
        idx += occ[m] * strides_[m];
    }
    return idx;
}

Operator Operator::adjoint() const { return make(space, matrix.adjoint()); }

Operator operator+(const Operator& a, const Operator& b) {
    require_same_space(a, b);
    return make(a.space, a.matrix + b.matrix);
}

Operator operator-(const Operator& a, const Operator& b) {
    require_same_space(a, b);
    return make(a.space, a.matrix - b.matrix);
}

Operator operator*(const Operator& a, const Operator& b) {
    require_same_space(a, b);
    return make(a.space, (a.matrix * b.matrix).pruned());
}

Operator operator*(Complex s, const Operator& a) { return make(a.space, s * a.matrix); }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }
Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

Operator identity(const SpacePtr& space) {
    SparseMatrix m(space->total_dim(), space->total_dim());
    m.setIdentity();
    return make(space, std::move(m));
}

Operator zero(const SpacePtr& space) {
    return make(space, SparseMatrix(space->total_dim(), space->total_dim()));
}

Operator build_mode_op(const SpacePtr& space, const std::string& label, ModeOp kind) {
    const std::size_t mode = space->index_of(label);
    const auto& modes = space->modes();
    const bool fermi = modes[mode].statistics == Statistics::fermi;
    const std::size_t dim = space->total_dim();

    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(dim);
    for (std::size_t col = 0; col < dim; ++col) {
        auto occ = space->occupations(col);
        const std::size_t n = occ[mode];
        if (kind == ModeOp::number) {
            if (n != 0) trip.emplace_back(col, col, static_cast<double>(n));
            continue;
        }
        double sign = 1.0;
        if (fermi) {
            std::size_t parity = 0;
            for (std::size_t m = 0; m < mode; ++m)
                if (modes[m].statistics == Statistics::fermi) parity += occ[m];
            if (parity % 2) sign = -1.0;
        }
        if (kind == ModeOp::destroy) {
            if (n == 0) continue;
            occ[mode] = n - 1;
            trip.emplace_back(space->basis_index(occ), col, sign * std::sqrt(static_cast<double>(n)));
        } else {
            if (n + 1 >= modes[mode].local_dim) continue;
            occ[mode] = n + 1;
            trip.emplace_back(space->basis_index(occ), col, sign * std::sqrt(static_cast<double>(n + 1)));
        }
    }
    SparseMatrix m(dim, dim);
    m.setFromTriplets(trip.begin(), trip.end());
    return make(space, std::move(m));
}

Operator sector_projector(const SpacePtr& space, const std::function<bool(const std::vector<std::size_t>&)>& keep) {
    std::vector<Eigen::Triplet<Complex>> trip;
    for (std::size_t i = 0; i < space->total_dim(); ++i)
        if (keep(space->occupations(i))) trip.emplace_back(i, i, 1.0);
    SparseMatrix m(space->total_dim(), space->total_dim());
    m.setFromTriplets(trip.begin(), trip.end());
    return make(space, std::move(m));
}

double max_abs(const Operator& op) {
    double out = 0.0;
    for (int k = 0; k < op.matrix.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it) out = std::max(out, std::abs(it.value()));
    return out;
}

}  // namespace superrad::oracle
