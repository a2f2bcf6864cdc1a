#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "spinnet/network.hpp"

namespace spinnet {

using Complex = std::complex<double>;

// Basis of the k-flip sector on n sites: all k-subsets of {0..n-1} in
// colexicographic order. Rank/unrank use the combinatorial number system,
// so index_of needs no lookup table.
class SectorBasis {
public:
    SectorBasis(int n_sites, int k);

    int n_sites() const { return n_; }
    int k() const { return k_; }
    std::size_t size() const { return size_; }

    // Flip sites of basis state `idx`, ascending.
    std::span<const int> state(std::size_t idx) const {
        return {flat_.data() + idx * k_, static_cast<std::size_t>(k_)};
    }
    // Colex rank of a sorted flip set.
    std::size_t index_of(std::span<const int> flips) const;

    bool contains(std::span<const int> flips, int site) const;

private:
    std::size_t binom(int n, int r) const { return binom_[n][r]; }

    int n_, k_;
    std::size_t size_;
    std::vector<int> flat_;
    std::vector<std::vector<std::size_t>> binom_;
};

// Hermitian sparse operator on a sector basis.
class SparseOperator {
public:
    using Matrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

    explicit SparseOperator(Matrix m);

    std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
    const Matrix& matrix() const { return mat_; }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;

    double hermiticity_defect() const;  // max |H_ij - conj(H_ji)|
    double max_abs_entry() const;
    // Rigorous spectral interval from Gershgorin discs (real diagonal assumed).
    std::pair<double, double> gershgorin_interval() const;

    Eigen::MatrixXcd dense() const;  // guarded to dim <= 4096

private:
    Matrix mat_;
};

// Normalized complex amplitude vector over a sector basis.
struct StateVector {
    std::shared_ptr<const SectorBasis> basis;
    Eigen::VectorXcd amps;

    double norm() const { return amps.norm(); }
    void normalize();
};

std::shared_ptr<const SectorBasis> enumerate_sector(const SpinNetwork& net, int k);

// XXZ Hamiltonian restricted to the sector: hopping -J_perp/2
// across every transport bond, diagonal sum of -Jz s_i s_j and h_i s_i
// with s = +1 on flipped sites and -1 otherwise.
SparseOperator assemble_hamiltonian(const SpinNetwork& net, const SectorBasis& basis);

// <v|op|v>; the imaginary residue must vanish for Hermitian op.
double expectation(const SparseOperator& op, const StateVector& v);

Complex inner(const StateVector& a, const StateVector& b);

}  // namespace spinnet
