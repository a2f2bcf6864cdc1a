#pragma once

#include <string>

#include "spinnet/dynamics.hpp"

namespace spinnet {

// Unitary map from incoming to outgoing packet envelopes at a splitter node.
// Port 0 is the lead, ports 1..n the arms; column = input port, row = output.
class NodeScatteringMatrix {
public:
    explicit NodeScatteringMatrix(Eigen::MatrixXcd m);

    int n_ports() const { return static_cast<int>(mat_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return mat_; }
    Complex entry(int out_port, int in_port) const { return mat_(out_port, in_port); }

    double unitarity_defect() const;  // max |(M^dag M - I)_ij|
    Eigen::VectorXcd scatter(const Eigen::VectorXcd& incoming) const;

private:
    Eigen::MatrixXcd mat_;
};

// Y node: lead -> (alpha, beta) split without reflection; arm inputs return
// through the combination rules alpha|in> + beta|in> -> lead and
// beta|in> - alpha|in> -> same-arm pair.
NodeScatteringMatrix y_node_matrix(double alpha, double beta);

// Symmetric 1xn node: lead -> 1/sqrt(n) on every arm; arm l ->
// 1/sqrt(n) lead - 1/n on every arm + full return on arm l.
NodeScatteringMatrix one_to_n_node_matrix(int n);

// Mode transformation splitting a 1xn star network into one chain of length
// l_a + l_b plus n-1 decoupled chains of length l_b.
struct ChainDecomposition {
    Eigen::MatrixXcd basis_change;   // U, rows are the new modes
    Eigen::MatrixXcd transformed;    // U H U^dag
    std::vector<int> block_sizes;    // l_a + l_b, then n-1 times l_b
    std::vector<Eigen::MatrixXcd> chain_blocks;
    double off_block_max = 0.0;
    double basis_unitarity_defect = 0.0;
    double max_commutator = 0.0;     // over embedded sub-Hamiltonian pairs
};
ChainDecomposition decompose_one_to_n(const SpinNetwork& net);

struct PortReading {
    std::string label;
    double predicted_prob = 0.0;
    double measured_prob = 0.0;
    Complex predicted_amp{0.0, 0.0};
    Complex measured_amp{0.0, 0.0};  // global phase aligned to the dominant port
};

struct NodeVerification {
    int input_port = 0;
    std::vector<PortReading> ports;
    double max_prob_deviation = 0.0;
    double max_amp_deviation = 0.0;  // after global phase alignment
    std::string notes;
};

// Launch a packet toward the node of a single-splitter star network and
// compare per-port outgoing probabilities and relative phases against the
// node matrix. The packet's support must be one of the port regions.
NodeVerification verify_node_matrix_dynamically(const SpinNetwork& net,
                                                const NodeScatteringMatrix& matrix,
                                                const PacketSpec& packet);

// All-ports verification sweep; `alpha` is the packet inverse width.
std::vector<NodeVerification> verify_splitter(const SpinNetwork& net,
                                              const NodeScatteringMatrix& matrix, double alpha);

// Port regions of a star network in matrix order: lead, then arms by id.
std::vector<std::string> splitter_port_labels(const SpinNetwork& net);

}  // namespace spinnet
