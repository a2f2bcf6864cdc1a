#include "spinnet/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace spinnet {

namespace {

std::atomic<double> g_peak_norm_drift{0.0};

void update_peak_drift(double drift) {
    double cur = g_peak_norm_drift.load();
    while (drift > cur && !g_peak_norm_drift.compare_exchange_weak(cur, drift)) {
    }
}

std::vector<int> sorted_union(const std::vector<int>& frozen, int extra) {
    std::vector<int> cfg(frozen);
    cfg.push_back(extra);
    std::sort(cfg.begin(), cfg.end());
    return cfg;
}

}  // namespace

StateVector make_packet(std::shared_ptr<const SectorBasis> basis, const PacketSpec& spec,
                        const std::vector<int>& frozen_flips, PacketBuildInfo* info) {
    if (!(spec.alpha > 0.0 && spec.alpha < 2.0))
        throw Error("packet inverse width must lie in (0, 2)");
    if (spec.support.empty()) throw Error("packet support is empty");
    if (basis->k() != 1 + static_cast<int>(frozen_flips.size()))
        throw DimensionMismatch("packet sector must hold 1 mobile flip + frozen flips");

    std::vector<int> frozen(frozen_flips);
    std::sort(frozen.begin(), frozen.end());
    for (int s : spec.support)
        if (std::binary_search(frozen.begin(), frozen.end(), s))
            throw Error("packet support overlaps a frozen flip");

    const double a2 = spec.alpha * spec.alpha;
    auto envelope = [&](double m) { return std::exp(-0.5 * a2 * (m - spec.center) * (m - spec.center)); };

    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(basis->size());
    const int len = static_cast<int>(spec.support.size());
    double in_weight = 0.0;
    for (int m = 0; m < len; ++m) {
        const double env = envelope(m);
        const Complex amp = env * std::exp(Complex(0.0, spec.momentum * m));
        amps[basis->index_of(sorted_union(frozen, spec.support[m]))] = amp;
        in_weight += env * env;
    }

    // Envelope weight falling outside the support ends.
    double tail = 0.0;
    for (int m = -1; m >= -len; --m) {
        const double w = envelope(m) * envelope(m);
        tail += w;
        if (w < 1e-30) break;
    }
    for (int m = len; m < 2 * len; ++m) {
        const double w = envelope(m) * envelope(m);
        tail += w;
        if (w < 1e-30) break;
    }
    if (info) {
        info->tail_weight = tail / (tail + in_weight);
        info->truncated = info->tail_weight > 1e-8;
    }

    StateVector v{std::move(basis), std::move(amps)};
    v.normalize();
    return v;
}

RegionProjector::RegionProjector(std::shared_ptr<const SectorBasis> basis,
                                 const std::function<bool(std::span<const int>)>& predicate)
    : basis_(std::move(basis)) {
    mask_.resize(basis_->size());
    for (std::size_t i = 0; i < basis_->size(); ++i) mask_[i] = predicate(basis_->state(i)) ? 1 : 0;
}

double region_probability(const StateVector& v, const RegionProjector& p) {
    if (v.basis->size() != p.basis()->size() ||
        static_cast<std::size_t>(v.amps.size()) != p.mask().size())
        throw DimensionMismatch("state/projector basis mismatch");
    double prob = 0.0;
    for (std::size_t i = 0; i < p.mask().size(); ++i)
        if (p.mask()[i]) prob += std::norm(v.amps[i]);
    return prob;
}

std::pair<StateVector, double> project_and_renormalize(const StateVector& v,
                                                       const RegionProjector& p) {
    const double prob = region_probability(v, p);
    if (prob <= 0.0) throw Error("projection has zero probability");
    StateVector out{v.basis, v.amps};
    for (std::size_t i = 0; i < p.mask().size(); ++i)
        if (!p.mask()[i]) out.amps[i] = Complex(0.0, 0.0);
    out.amps /= std::sqrt(prob);
    return {std::move(out), prob};
}

Propagator::Propagator(std::shared_ptr<const SparseOperator> H, PropMethod method, double tolerance)
    : H_(std::move(H)), method_(method), tol_(tolerance) {
    std::tie(spec_lo_, spec_hi_) = H_->gershgorin_interval();
    if (method_ == PropMethod::Auto)
        method_ = H_->dim() <= 512 ? PropMethod::DenseExpm : PropMethod::Chebyshev;
}

StateVector Propagator::evolve(const StateVector& v, double t) const {
    if (static_cast<std::size_t>(v.amps.size()) != H_->dim())
        throw DimensionMismatch("state dimension does not match Hamiltonian");
    if (t < 0.0) throw Error("negative evolution time");
    stats_ = EvolveStats{};

    const double norm_in = v.amps.norm();
    Eigen::VectorXcd out;
    switch (method_) {
        case PropMethod::Chebyshev: out = evolve_chebyshev(v.amps, t); break;
        case PropMethod::Krylov: out = evolve_krylov(v.amps, t); break;
        case PropMethod::DenseExpm: out = evolve_dense(v.amps, t); break;
        default: throw Error("unresolved propagator method");
    }
    stats_.norm_drift = std::abs(out.norm() - norm_in);
    update_peak_drift(stats_.norm_drift);
    if (stats_.norm_drift > 1e-8)
        throw ConvergenceError("propagator norm drift " + std::to_string(stats_.norm_drift));
    return {v.basis, std::move(out)};
}

double Propagator::peak_norm_drift() { return g_peak_norm_drift.load(); }

void Propagator::reset_peak_norm_drift() { g_peak_norm_drift.store(0.0); }

Eigen::VectorXcd Propagator::evolve_chebyshev(const Eigen::VectorXcd& v, double t) const {
    const double center = 0.5 * (spec_hi_ + spec_lo_);
    double radius = 0.5 * (spec_hi_ - spec_lo_);
    radius = radius * 1.0005 + 1e-12;  // keep the rescaled spectrum strictly inside [-1, 1]

    constexpr int kOrderCap = 3200;
    Eigen::VectorXcd cur = v;
    double remaining = t;
    while (remaining > 0.0) {
        const double tau = std::min(remaining, kOrderCap / radius);
        const double x = radius * tau;
        const int kmax = static_cast<int>(x + 12.0 * std::cbrt(x + 1.0) + 30.0);
        const auto bessel = bessel_j_array(x, kmax);

        int k_eff = kmax;
        while (k_eff > 1 && std::abs(bessel[k_eff]) < 5e-17) --k_eff;

        auto apply_scaled = [&](const Eigen::VectorXcd& w) {
            ++stats_.matvecs;
            Eigen::VectorXcd r = H_->apply(w);
            r -= center * w;
            r /= radius;
            return r;
        };
        if (stats_.matvecs + k_eff > kMatvecBudget)
            throw ConvergenceError("matrix-vector product budget exceeded");

        Eigen::VectorXcd phi0 = cur;
        Eigen::VectorXcd phi1 = apply_scaled(phi0);
        const Complex mi(0.0, -1.0);  // (-i)^k cycles with k
        Eigen::VectorXcd acc = bessel[0] * phi0 + 2.0 * mi * bessel[1] * phi1;
        Complex ik = mi;
        for (int k = 2; k <= k_eff; ++k) {
            Eigen::VectorXcd phi2 = 2.0 * apply_scaled(phi1) - phi0;
            ik *= mi;
            acc += 2.0 * ik * bessel[k] * phi2;
            phi0.swap(phi1);
            phi1.swap(phi2);
        }
        acc *= std::exp(Complex(0.0, -center * tau));
        cur.swap(acc);
        remaining -= tau;
        ++stats_.chunks;
    }
    return cur;
}

Eigen::VectorXcd Propagator::evolve_krylov(const Eigen::VectorXcd& v, double t) const {
    const std::size_t dim = H_->dim();
    const int m = static_cast<int>(std::min<std::size_t>(48, dim));
    if (t == 0.0) return v;

    Eigen::VectorXcd cur = v;
    double remaining = t;
    while (remaining > 1e-14 * t) {
        const double beta0 = cur.norm();
        if (beta0 == 0.0) return cur;

        Eigen::MatrixXcd V(dim, m + 1);
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
        V.col(0) = cur / beta0;
        int m_eff = m;
        bool breakdown = false;
        for (int j = 0; j < m; ++j) {
            ++stats_.matvecs;
            Eigen::VectorXcd w = H_->apply(V.col(j));
            if (j > 0) w -= beta[j - 1] * V.col(j - 1);
            alpha[j] = w.dot(V.col(j)).real();
            w -= alpha[j] * V.col(j);
            // full reorthogonalization keeps the subspace clean at tight tolerances
            for (int i = 0; i <= j; ++i) w -= V.col(i).dot(w) * V.col(i);
            beta[j] = w.norm();
            if (beta[j] < 1e-13 * (1.0 + std::abs(alpha[j]))) {
                m_eff = j + 1;
                breakdown = true;
                break;
            }
            V.col(j + 1) = w / beta[j];
        }
        if (stats_.matvecs > kMatvecBudget)
            throw ConvergenceError("matrix-vector product budget exceeded");

        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m_eff, m_eff);
        for (int j = 0; j < m_eff; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < m_eff) T(j, j + 1) = T(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const Eigen::MatrixXd& Q = es.eigenvectors();
        const Eigen::VectorXd& lam = es.eigenvalues();
        const Eigen::VectorXd q1 = Q.row(0).transpose();

        double dt = remaining;
        Eigen::VectorXcd u;
        for (int tries = 0;; ++tries) {
            Eigen::VectorXcd phase(m_eff);
            for (int i = 0; i < m_eff; ++i) phase[i] = std::exp(Complex(0.0, -lam[i] * dt)) * q1[i];
            u = Q.cast<Complex>() * phase;
            if (breakdown) break;
            const double err = beta[m_eff - 1] * std::abs(u[m_eff - 1]) * dt;
            if (err < 0.1 * tol_ * dt / t) break;
            if (tries > 60 || dt < 1e-9 * t)
                throw ConvergenceError("Krylov step size collapsed before reaching tolerance");
            dt *= 0.6;
        }
        cur = beta0 * (V.leftCols(m_eff) * u);
        remaining -= dt;
        ++stats_.chunks;
    }
    return cur;
}

Eigen::VectorXcd Propagator::evolve_dense(const Eigen::VectorXcd& v, double t) const {
    if (!eig_) eig_.emplace(H_->dense());
    const auto& es = *eig_;
    Eigen::VectorXcd coef = es.eigenvectors().adjoint() * v;
    for (int i = 0; i < coef.size(); ++i)
        coef[i] *= std::exp(Complex(0.0, -es.eigenvalues()[i] * t));
    return es.eigenvectors() * coef;
}

StateVector evolve(const Propagator& prop, const StateVector& v, double t) {
    return prop.evolve(v, t);
}

Eigen::VectorXd site_occupation(const StateVector& v) {
    Eigen::VectorXd occ = Eigen::VectorXd::Zero(v.basis->n_sites());
    for (std::size_t i = 0; i < v.basis->size(); ++i) {
        const double w = std::norm(v.amps[i]);
        if (w == 0.0) continue;
        for (int s : v.basis->state(i)) occ[s] += w;
    }
    return occ;
}

double mean_momentum_on_path(const StateVector& v, const std::vector<int>& path) {
    const auto& basis = *v.basis;
    Complex corr(0.0, 0.0);
    std::vector<int> scratch(basis.k());
    for (std::size_t idx = 0; idx < basis.size(); ++idx) {
        if (v.amps[idx] == Complex(0.0, 0.0)) continue;
        auto flips = basis.state(idx);
        for (std::size_t m = 0; m + 1 < path.size(); ++m) {
            const int a = path[m], b = path[m + 1];
            if (!basis.contains(flips, a) || basis.contains(flips, b)) continue;
            std::copy(flips.begin(), flips.end(), scratch.begin());
            *std::find(scratch.begin(), scratch.end(), a) = b;
            std::sort(scratch.begin(), scratch.end());
            corr += std::conj(v.amps[idx]) * v.amps[basis.index_of(scratch)];
        }
    }
    return std::arg(corr);
}

namespace {
std::pair<double, double> path_moments(const StateVector& v, const std::vector<int>& path) {
    const Eigen::VectorXd occ = site_occupation(v);
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t m = 0; m < path.size(); ++m) {
        const double p = occ[path[m]];
        w += p;
        m1 += p * m;
        m2 += p * m * m;
    }
    if (w <= 0.0) throw Error("no weight on the requested path");
    m1 /= w;
    m2 /= w;
    return {m1, std::sqrt(std::max(0.0, m2 - m1 * m1))};
}
}  // namespace

double packet_center_on_path(const StateVector& v, const std::vector<int>& path) {
    return path_moments(v, path).first;
}

double packet_width_on_path(const StateVector& v, const std::vector<int>& path) {
    return path_moments(v, path).second;
}

std::vector<double> bessel_j_array(double x, int kmax) {
    std::vector<double> out(kmax + 1, 0.0);
    if (x < 0.0) throw Error("bessel_j_array requires x >= 0");
    if (x < 1e-12) {
        out[0] = 1.0;
        if (kmax >= 1) out[1] = 0.5 * x;
        return out;
    }
    const int top = std::max(kmax, static_cast<int>(x)) +
                    50 + static_cast<int>(2.0 * std::sqrt(std::max<double>(kmax, x)));
    double jp = 0.0, j = 1e-300;
    double sum = 0.0;  // J0 + 2*sum_{even k>=2} Jk, accumulated on the fly
    for (int k = top; k >= 1; --k) {
        double jm = (2.0 * k / x) * j - jp;
        jp = j;
        j = jm;
        if (k - 1 <= kmax) out[k - 1] = j;
        if ((k - 1) % 2 == 0 && k - 1 >= 2) sum += 2.0 * j;
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            jp *= 1e-250;
            sum *= 1e-250;
            for (auto& o : out) o *= 1e-250;
        }
    }
    sum += j;  // j now holds J_0
    for (auto& o : out) o /= sum;
    return out;
}

}  // namespace spinnet
