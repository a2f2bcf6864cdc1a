#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "spinnet/hilbert.hpp"

namespace spinnet {

// Gaussian single-flip wave packet on an ordered path of sites:
// amplitude exp(-alpha^2/2 (m - center)^2 + i momentum m) at path
// coordinate m, normalized numerically to unit norm.
struct PacketSpec {
    double alpha = 4.0 / 15.0;  // inverse width
    double center = 0.0;        // N_c, in path coordinates along `support`
    double momentum = 1.5707963267948966;  // k0, radians per site
    std::vector<int> support;   // ordered site ids forming a path
};

struct PacketBuildInfo {
    double tail_weight = 0.0;  // estimated norm fraction cut off by the support ends
    bool truncated = false;    // tail_weight > 1e-8
};

// Packet state in the (1 + |frozen_flips|)-flip sector; frozen flips (e.g.
// DD register configurations) ride along unchanged in every component.
StateVector make_packet(std::shared_ptr<const SectorBasis> basis, const PacketSpec& spec,
                        const std::vector<int>& frozen_flips,
                        PacketBuildInfo* info = nullptr);

// Diagonal projector over basis configurations.
class RegionProjector {
public:
    RegionProjector(std::shared_ptr<const SectorBasis> basis,
                    const std::function<bool(std::span<const int>)>& predicate);

    const std::shared_ptr<const SectorBasis>& basis() const { return basis_; }
    const std::vector<char>& mask() const { return mask_; }

private:
    std::shared_ptr<const SectorBasis> basis_;
    std::vector<char> mask_;
};

double region_probability(const StateVector& v, const RegionProjector& p);

// Post-selection: (Pv / ||Pv||, ||Pv||^2).
std::pair<StateVector, double> project_and_renormalize(const StateVector& v,
                                                       const RegionProjector& p);

enum class PropMethod { Auto, Chebyshev, Krylov, DenseExpm };

struct EvolveStats {
    long matvecs = 0;
    double norm_drift = 0.0;
    int chunks = 0;
};

// e^{-iHt} engine. Chebyshev expansion with Gershgorin rescaling by default,
// Lanczos/Krylov stepping and exact dense eigendecomposition as alternatives.
class Propagator {
public:
    explicit Propagator(std::shared_ptr<const SparseOperator> H,
                        PropMethod method = PropMethod::Auto, double tolerance = 1e-10);

    StateVector evolve(const StateVector& v, double t) const;
    const EvolveStats& last_stats() const { return stats_; }
    PropMethod resolved_method() const { return method_; }

    // Largest norm drift seen by any evolve call in this process.
    static double peak_norm_drift();
    static void reset_peak_norm_drift();

    static constexpr long kMatvecBudget = 1'000'000;

private:
    Eigen::VectorXcd evolve_chebyshev(const Eigen::VectorXcd& v, double t) const;
    Eigen::VectorXcd evolve_krylov(const Eigen::VectorXcd& v, double t) const;
    Eigen::VectorXcd evolve_dense(const Eigen::VectorXcd& v, double t) const;

    std::shared_ptr<const SparseOperator> H_;
    PropMethod method_;
    double tol_;
    double spec_lo_ = 0.0, spec_hi_ = 0.0;
    mutable EvolveStats stats_;
    mutable std::optional<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>> eig_;
};

StateVector evolve(const Propagator& prop, const StateVector& v, double t);

// Site-occupation marginal: probability that site i carries a flip.
Eigen::VectorXd site_occupation(const StateVector& v);

// Mean momentum of the packet restricted to an ordered path, estimated from
// the average nearest-neighbour phase gradient.
double mean_momentum_on_path(const StateVector& v, const std::vector<int>& path);

// Root-mean-square width of the flip position distribution on a path.
double packet_width_on_path(const StateVector& v, const std::vector<int>& path);
double packet_center_on_path(const StateVector& v, const std::vector<int>& path);

// J_k(x) for k = 0..kmax by Miller downward recurrence.
std::vector<double> bessel_j_array(double x, int kmax);

}  // namespace spinnet
