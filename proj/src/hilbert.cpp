#include "spinnet/hilbert.hpp"

#include <algorithm>
#include <cmath>

namespace spinnet {

SectorBasis::SectorBasis(int n_sites, int k) : n_(n_sites), k_(k) {
    if (k < 0 || k > n_sites) throw DimensionMismatch("flip count outside [0, n_sites]");

    binom_.assign(n_ + 1, std::vector<std::size_t>(k_ + 2, 0));
    for (int n = 0; n <= n_; ++n) {
        binom_[n][0] = 1;
        for (int r = 1; r <= std::min(n, k_ + 1); ++r)
            binom_[n][r] = (r == n) ? 1 : (n > r ? binom_[n - 1][r - 1] + binom_[n - 1][r] : 0);
    }
    size_ = binom_[n_][k_];

    // Enumerate in colex order: states sorted by largest flip, then the rest.
    flat_.reserve(size_ * std::max(k_, 1));
    std::vector<int> cur(k_);
    auto emit = [&](auto&& self, int pos, int limit) -> void {
        if (pos < 0) {
            flat_.insert(flat_.end(), cur.begin(), cur.end());
            return;
        }
        for (int s = pos; s < limit; ++s) {
            cur[pos] = s;
            self(self, pos - 1, s);
        }
    };
    if (k_ == 0) {
        // single empty configuration
    } else {
        emit(emit, k_ - 1, n_);
    }
}

std::size_t SectorBasis::index_of(std::span<const int> flips) const {
    if (static_cast<int>(flips.size()) != k_) throw DimensionMismatch("flip set size != k");
    std::size_t r = 0;
    for (int i = 0; i < k_; ++i) r += binom_[flips[i]][i + 1];
    return r;
}

bool SectorBasis::contains(std::span<const int> flips, int site) const {
    return std::binary_search(flips.begin(), flips.end(), site);
}

SparseOperator::SparseOperator(Matrix m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols()) throw DimensionMismatch("operator must be square");
    mat_.makeCompressed();
}

Eigen::VectorXcd SparseOperator::apply(const Eigen::VectorXcd& v) const {
    if (v.size() != mat_.rows()) throw DimensionMismatch("operator/vector size mismatch");
    return mat_ * v;
}

double SparseOperator::hermiticity_defect() const {
    Matrix d = Matrix(mat_.adjoint()) - mat_;
    double m = 0.0;
    for (int r = 0; r < d.outerSize(); ++r)
        for (Matrix::InnerIterator it(d, r); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

double SparseOperator::max_abs_entry() const {
    double m = 0.0;
    for (int r = 0; r < mat_.outerSize(); ++r)
        for (Matrix::InnerIterator it(mat_, r); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

std::pair<double, double> SparseOperator::gershgorin_interval() const {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (int r = 0; r < mat_.outerSize(); ++r) {
        double diag = 0.0, radius = 0.0;
        for (Matrix::InnerIterator it(mat_, r); it; ++it) {
            if (it.col() == r)
                diag = it.value().real();
            else
                radius += std::abs(it.value());
        }
        if (first) {
            lo = diag - radius;
            hi = diag + radius;
            first = false;
        } else {
            lo = std::min(lo, diag - radius);
            hi = std::max(hi, diag + radius);
        }
    }
    return {lo, hi};
}

Eigen::MatrixXcd SparseOperator::dense() const {
    if (dim() > 4096) throw DimensionMismatch("dense fallback limited to dim <= 4096");
    return Eigen::MatrixXcd(mat_);
}

void StateVector::normalize() {
    double n = amps.norm();
    if (n == 0.0) throw Error("cannot normalize a zero state");
    amps /= n;
}

std::shared_ptr<const SectorBasis> enumerate_sector(const SpinNetwork& net, int k) {
    return std::make_shared<SectorBasis>(net.n_sites(), k);
}

SparseOperator assemble_hamiltonian(const SpinNetwork& net, const SectorBasis& basis) {
    if (basis.n_sites() != net.n_sites())
        throw DimensionMismatch("basis site count does not match network");

    const int k = basis.k();
    const std::size_t dim = basis.size();

    // Vacuum diagonal: all s = -1.
    const double e_vac = net.vacuum_energy();

    // Ising bonds and field sites are sparse in every network we build.
    std::vector<Bond> ising;
    for (const auto& b : net.bonds())
        if (b.Jz != 0.0) ising.push_back(b);

    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(dim * (k * 2 + 1));

    std::vector<int> scratch(std::max(k, 1));
    for (std::size_t idx = 0; idx < dim; ++idx) {
        auto flips = basis.state(idx);

        double diag = e_vac;
        for (int m : flips) diag += 2.0 * net.fields()[m];
        for (const auto& b : ising) {
            const bool fi = basis.contains(flips, b.i);
            const bool fj = basis.contains(flips, b.j);
            if (fi != fj) diag += 2.0 * b.Jz;  // s_i s_j flipped from +1 to -1
        }
        trips.emplace_back(idx, idx, Complex(diag, 0.0));

        for (int a = 0; a < k; ++a) {
            const int f = flips[a];
            for (const auto& [x, Jp] : net.hop_neighbors(f)) {
                if (basis.contains(flips, x)) continue;  // hard-core blocked
                std::copy(flips.begin(), flips.end(), scratch.begin());
                scratch[a] = x;
                std::sort(scratch.begin(), scratch.begin() + k);
                const std::size_t jdx = basis.index_of({scratch.data(), std::size_t(k)});
                trips.emplace_back(idx, jdx, Complex(-0.5 * Jp, 0.0));
            }
        }
    }

    SparseOperator::Matrix m(dim, dim);
    m.setFromTriplets(trips.begin(), trips.end());
    return SparseOperator(std::move(m));
}

double expectation(const SparseOperator& op, const StateVector& v) {
    if (static_cast<std::size_t>(v.amps.size()) != op.dim())
        throw DimensionMismatch("state/operator size mismatch");
    const Complex val = v.amps.dot(op.apply(v.amps));
    return val.real();
}

Complex inner(const StateVector& a, const StateVector& b) {
    if (a.amps.size() != b.amps.size()) throw DimensionMismatch("state size mismatch");
    return a.amps.dot(b.amps);
}

}  // namespace spinnet
