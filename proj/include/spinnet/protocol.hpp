#pragma once

#include <optional>
#include <string>

#include "spinnet/scattering.hpp"
#include "spinnet/splitter.hpp"

namespace spinnet {

// 4x4 Hermitian, positive, unit-trace matrix over a two-qubit basis.
struct TwoQubitDensity {
    Eigen::Matrix4cd rho;

    double trace_defect() const { return std::abs(rho.trace().real() - 1.0); }
    double min_eigenvalue() const;
    void validate() const;  // throws on non-physical matrices
};

// Post-scattering DD/packet density matrix in the basis
// {|1,Vac>, |1,phi_R>, |0,Vac>, |0,phi_R>}: a^2 and b^2 populations with
// a*b coherences on the middle block.
TwoQubitDensity entangling_density(double a, double b);

// Wootters concurrence via the spin-flipped-matrix eigenvalue formula;
// handles mixed states from traced-out dynamics.
double concurrence(const TwoQubitDensity& rho);

enum class ProtocolKind { GHZ, W };

struct ProtocolConfig {
    ProtocolKind kind = ProtocolKind::GHZ;
    int n = 1;  // DD qubit count (GHZ >= 1, W >= 2)

    // Splitter couplings. GHZ uses both Y nodes; W uses symmetric 1xn nodes.
    double alpha = M_SQRT1_2, beta = M_SQRT1_2;
    double alpha_out = M_SQRT1_2, beta_out = M_SQRT1_2;

    double dd_h = 10.0, dd_Jz = 10.0;
    // Optional per-DD overrides (size n when used). The closed-form engines
    // require uniform parameters unless t_override is supplied.
    std::vector<double> dd_h_each, dd_Jz_each;
    double packet_alpha = 4.0 / 15.0;

    // Closed-form transmission amplitude; when absent the engine measures it
    // with a scattering run at (dd_h, dd_Jz).
    std::optional<Complex> t_override;

    // Full-dynamics geometry. arm_len is the DD arm; in the GHZ geometry the
    // free arm is built n sites shorter so the effective paths stay balanced
    // (each DD passage advances the envelope one site).
    int lead_len = 36;
    int arm_len = 36;
    int out_len = 48;
};

struct BranchAmplitude {
    std::string branch;    // "out", "arm_A_back", ...
    std::string register_state;
    Complex amp{0.0, 0.0};
    double prob = 0.0;
};

struct ProtocolOutcome {
    double success_probability = 0.0;
    Eigen::MatrixXcd post_state;  // 2^n x 2^n register density matrix
    double fidelity_to_target = 0.0;
    std::vector<BranchAmplitude> ledger;
    Complex t_used{0.0, 0.0};
    std::string notes;
};

ProtocolOutcome run_ghz_closed_form(const ProtocolConfig& cfg);
ProtocolOutcome run_w_closed_form(const ProtocolConfig& cfg);

// Full many-body oracle: builds the interferometer, evolves the packet
// through both splitters, post-selects on the output lead and traces out the
// motional degrees of freedom. Refuses n > 3.
ProtocolOutcome run_protocol_full_dynamics(const ProtocolConfig& cfg);

// P_GHZ = 2 / |1 + t^-n|^2 at the optimal couplings.
double ghz_success_probability(Complex t, int n);
// Optimal (alpha, beta) for real t in (0, 1].
std::pair<double, double> ghz_optimal_couplings(double t, int n);
// Success probability along the unit-fidelity manifold, parametrized by
// alpha^2; used to confirm the optimum by grid search.
double ghz_constrained_probability(double t, int n, double alpha_sq);

double w_success_probability(Complex t, int n);  // |t|^2 / n

struct CurveRow {
    double T = 0.0;
    int n = 0;
    double p_ghz = 0.0;
    double p_w = 0.0;
};
// Success-probability table over transmission coefficients and register sizes,
// with the real positive convention t = sqrt(T).
std::vector<CurveRow> probability_curves(const std::vector<double>& T_values, int n_min,
                                         int n_max);

// Register basis order: bit l set means DD l is in |1> (flip at site d).
Eigen::VectorXcd ghz_target(int n);
Eigen::VectorXcd w_target(int n);

}  // namespace spinnet
