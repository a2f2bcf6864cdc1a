#include "spinnet/splitter.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace spinnet {

NodeScatteringMatrix::NodeScatteringMatrix(Eigen::MatrixXcd m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() < 2)
        throw DimensionMismatch("node matrix must be square, >= 2 ports");
    Eigen::MatrixXcd defect =
        mat_.adjoint() * mat_ - Eigen::MatrixXcd::Identity(mat_.rows(), mat_.cols());
    if (defect.cwiseAbs().maxCoeff() > 1e-10)
        throw Error("node matrix is not unitary");
}

double NodeScatteringMatrix::unitarity_defect() const {
    Eigen::MatrixXcd defect =
        mat_.adjoint() * mat_ - Eigen::MatrixXcd::Identity(mat_.rows(), mat_.cols());
    return defect.cwiseAbs().maxCoeff();
}

Eigen::VectorXcd NodeScatteringMatrix::scatter(const Eigen::VectorXcd& incoming) const {
    if (incoming.size() != mat_.cols()) throw DimensionMismatch("port count mismatch");
    return mat_ * incoming;
}

NodeScatteringMatrix y_node_matrix(double alpha, double beta) {
    if (std::abs(alpha * alpha + beta * beta - 1.0) > 1e-12)
        throw Error("Y node requires alpha^2 + beta^2 = 1");
    Eigen::MatrixXcd m(3, 3);
    // columns: input at lead, arm_alpha, arm_beta; rows in the same order
    m << 0.0, alpha, beta,
         alpha, beta * beta, -alpha * beta,
         beta, -alpha * beta, alpha * alpha;
    return NodeScatteringMatrix(std::move(m));
}

NodeScatteringMatrix one_to_n_node_matrix(int n) {
    if (n < 2) throw Error("1xn node requires n >= 2");
    const double rn = 1.0 / std::sqrt(double(n));
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    for (int l = 1; l <= n; ++l) {
        m(l, 0) = rn;  // lead in -> arm l
        m(0, l) = rn;  // arm l in -> lead
        for (int j = 1; j <= n; ++j) m(j, l) = (j == l ? 1.0 : 0.0) - 1.0 / double(n);
    }
    return NodeScatteringMatrix(std::move(m));
}

namespace {

struct StarLayout {
    int node = 0;
    std::vector<std::string> labels;               // port labels, lead first
    std::vector<std::vector<int>> port_sites;      // site lists, path order as stored
    std::vector<std::vector<double>> node_dist;    // distance from node per site
};

StarLayout star_layout(const SpinNetwork& net) {
    if (net.has_region("out")) throw InvalidTopology("expected a single-node star network");
    StarLayout lay;
    const auto& lead = net.region("lead");
    lay.node = lead.back();
    lay.labels.push_back("lead");
    lay.port_sites.push_back(lead);
    std::vector<std::pair<int, std::string>> arms;  // ordered by first site id
    for (const auto& [name, sites] : net.regions())
        if (name.rfind("arm_", 0) == 0) arms.emplace_back(sites.front(), name);
    std::sort(arms.begin(), arms.end());
    for (const auto& [first, name] : arms) {
        lay.labels.push_back(name);
        lay.port_sites.push_back(net.region(name));
    }
    for (std::size_t p = 0; p < lay.port_sites.size(); ++p) {
        const auto& sites = lay.port_sites[p];
        std::vector<double> dist(sites.size());
        for (std::size_t m = 0; m < sites.size(); ++m)
            dist[m] = (p == 0) ? double(sites.size() - 1 - m) : double(m + 1);
        lay.node_dist.push_back(std::move(dist));
    }
    return lay;
}

// Node-distance gauge packet: envelope around `center` (graph distance from
// the node), phase exp(i k * sign * distance); sign -1 moves toward the node.
Eigen::VectorXcd gauge_packet(const StarLayout& lay, int port, double alpha, double center,
                              double sign, int n_sites) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_sites);
    const auto& sites = lay.port_sites[port];
    for (std::size_t m = 0; m < sites.size(); ++m) {
        const double g = lay.node_dist[port][m];
        const double env = std::exp(-0.5 * alpha * alpha * (g - center) * (g - center));
        v[sites[m]] = env * std::exp(Complex(0.0, sign * M_PI / 2 * g));
    }
    v.normalize();
    return v;
}

}  // namespace

std::vector<std::string> splitter_port_labels(const SpinNetwork& net) {
    return star_layout(net).labels;
}

ChainDecomposition decompose_one_to_n(const SpinNetwork& net) {
    if (!net.dd_qubits().empty())
        throw InvalidTopology("decomposition applies to bare splitter networks");
    const StarLayout lay = star_layout(net);
    const int n = static_cast<int>(lay.port_sites.size()) - 1;
    if (n < 2) throw InvalidTopology("1xn decomposition requires n >= 2 arms");
    const int la = static_cast<int>(lay.port_sites[0].size());
    const int lb = static_cast<int>(lay.port_sites[1].size());
    for (int a = 1; a <= n; ++a)
        if (static_cast<int>(lay.port_sites[a].size()) != lb)
            throw InvalidTopology("1xn decomposition requires uniform arm lengths");

    const int ns = net.n_sites();
    const double rn = 1.0 / std::sqrt(double(n));

    Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(ns, ns);
    int row = 0;
    for (int i = 0; i < la; ++i) U(row++, lay.port_sites[0][i]) = 1.0;  // c_i = a_i
    for (int i = 0; i < lb; ++i) {
        for (int j = 1; j <= n; ++j) U(row, lay.port_sites[j][i]) = rn;  // c_{la+i}
        ++row;
    }
    for (int l = 1; l <= n - 1; ++l)
        for (int i = 0; i < lb; ++i) {
            for (int j = 1; j <= n; ++j)
                U(row, lay.port_sites[j][i]) =
                    rn * std::exp(Complex(0.0, -2.0 * M_PI * l * j / double(n)));
            ++row;
        }

    // Single-particle Hamiltonian: the k = 1 sector in site order.
    const auto basis = enumerate_sector(net, 1);
    const Eigen::MatrixXcd H = assemble_hamiltonian(net, *basis).dense();

    ChainDecomposition dec;
    dec.basis_change = U;
    dec.transformed = U * H * U.adjoint();
    dec.basis_unitarity_defect =
        (U.adjoint() * U - Eigen::MatrixXcd::Identity(ns, ns)).cwiseAbs().maxCoeff();

    dec.block_sizes.push_back(la + lb);
    for (int l = 1; l <= n - 1; ++l) dec.block_sizes.push_back(lb);

    int off = 0;
    std::vector<std::pair<int, int>> spans;
    for (int sz : dec.block_sizes) {
        spans.emplace_back(off, sz);
        dec.chain_blocks.push_back(dec.transformed.block(off, off, sz, sz));
        off += sz;
    }
    for (int r = 0; r < ns; ++r)
        for (int c = 0; c < ns; ++c) {
            bool same_block = false;
            for (auto [o, sz] : spans)
                if (r >= o && r < o + sz && c >= o && c < o + sz) same_block = true;
            if (!same_block)
                dec.off_block_max = std::max(dec.off_block_max, std::abs(dec.transformed(r, c)));
        }

    // Embedded sub-Hamiltonians commute pairwise.
    std::vector<Eigen::MatrixXcd> embedded;
    for (std::size_t b = 0; b < spans.size(); ++b) {
        Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(ns, ns);
        e.block(spans[b].first, spans[b].first, spans[b].second, spans[b].second) =
            dec.chain_blocks[b];
        embedded.push_back(std::move(e));
    }
    for (std::size_t a = 0; a < embedded.size(); ++a)
        for (std::size_t b = a + 1; b < embedded.size(); ++b) {
            const double c =
                (embedded[a] * embedded[b] - embedded[b] * embedded[a]).cwiseAbs().maxCoeff();
            dec.max_commutator = std::max(dec.max_commutator, c);
        }
    return dec;
}

NodeVerification verify_node_matrix_dynamically(const SpinNetwork& net,
                                                const NodeScatteringMatrix& matrix,
                                                const PacketSpec& packet) {
    const StarLayout lay = star_layout(net);
    const int n_ports = static_cast<int>(lay.port_sites.size());
    if (matrix.n_ports() != n_ports)
        throw DimensionMismatch("node matrix port count does not match network");
    if (packet.alpha > 0.3 + 1e-12)
        throw ConfigError("verification packets must be momentum-narrow (alpha <= 0.3)");

    int in_port = -1;
    for (int p = 0; p < n_ports; ++p)
        if (lay.port_sites[p] == packet.support) in_port = p;
    if (in_port < 0) throw ConfigError("packet support is not a splitter port");

    // Incident envelope center in node-distance gauge.
    const double g0 = (in_port == 0) ? lay.node_dist[0][static_cast<int>(packet.center)]
                                     : packet.center + 1.0;

    const auto basis = enumerate_sector(net, 1);
    auto H = std::make_shared<const SparseOperator>(assemble_hamiltonian(net, *basis));

    StateVector psi{basis, gauge_packet(lay, in_port, packet.alpha, g0, -1.0, net.n_sites())};

    // Outgoing packets sit at distance T - g0 from the node; leave room for
    // full envelopes inside every port.
    int min_len = INT_MAX;
    for (const auto& sites : lay.port_sites) min_len = std::min<int>(min_len, sites.size());
    const double spread = 4.0 / packet.alpha;
    const double g_out = std::min<double>(min_len - spread - 1.0, g0);
    if (g_out < spread)
        throw ConfigError("splitter ports too short to separate outgoing packets");
    const double T = g0 + g_out;

    const Propagator prop(H);
    psi = prop.evolve(psi, T);

    NodeVerification rep;
    rep.input_port = in_port;

    Eigen::VectorXcd measured(n_ports), predicted = matrix.matrix().col(in_port);
    for (int p = 0; p < n_ports; ++p) {
        const Eigen::VectorXcd ref = gauge_packet(lay, p, packet.alpha, g_out, +1.0, net.n_sites());
        measured[p] = ref.dot(psi.amps);
    }

    // Align the global propagation phase on the lead port (pure c-mode, free
    // of the arm-return reflection phase); fall back to the dominant port.
    int pivot = 0;
    if (std::abs(predicted[0]) < 0.05) predicted.cwiseAbs().maxCoeff(&pivot);
    Complex phase(1.0, 0.0);
    if (std::abs(measured[pivot]) > 1e-12)
        phase = (predicted[pivot] / std::abs(predicted[pivot])) /
                (measured[pivot] / std::abs(measured[pivot]));

    for (int p = 0; p < n_ports; ++p) {
        PortReading pr;
        pr.label = lay.labels[p];
        pr.predicted_amp = predicted[p];
        pr.measured_amp = measured[p] * phase;
        pr.predicted_prob = std::norm(predicted[p]);
        RegionProjector proj(basis, [&](std::span<const int> flips) {
            return std::binary_search(lay.port_sites[p].begin(), lay.port_sites[p].end(),
                                      flips.front());
        });
        pr.measured_prob = region_probability(psi, proj);
        rep.max_prob_deviation =
            std::max(rep.max_prob_deviation, std::abs(pr.measured_prob - pr.predicted_prob));
        rep.max_amp_deviation =
            std::max(rep.max_amp_deviation, std::abs(std::abs(pr.measured_amp) -
                                                     std::abs(pr.predicted_amp)));
        rep.ports.push_back(std::move(pr));
    }

    // Arm-to-arm returns acquire the node reflection phase the algebraic rows
    // leave implicit; flag when the measured sign disagrees.
    if (in_port != 0) {
        for (int p = 1; p < n_ports; ++p) {
            const Complex pa = rep.ports[p].predicted_amp, ma = rep.ports[p].measured_amp;
            if (std::abs(pa) > 0.05 && std::abs(ma) > 0.05 &&
                std::real(pa * std::conj(ma)) < 0.0) {
                rep.notes = "arm return amplitudes carry a node reflection sign relative to "
                            "the algebraic rows";
                break;
            }
        }
    }
    return rep;
}

std::vector<NodeVerification> verify_splitter(const SpinNetwork& net,
                                              const NodeScatteringMatrix& matrix, double alpha) {
    const StarLayout lay = star_layout(net);
    std::vector<NodeVerification> out;
    for (std::size_t p = 0; p < lay.port_sites.size(); ++p) {
        PacketSpec spec;
        spec.alpha = alpha;
        spec.support = lay.port_sites[p];
        const int len = static_cast<int>(spec.support.size());
        spec.center = (p == 0) ? len - 1 - std::min(len / 2, 30) : std::min(len / 2, 30) - 1;
        spec.momentum = (p == 0) ? M_PI / 2 : -M_PI / 2;
        out.push_back(verify_node_matrix_dynamically(net, matrix, spec));
    }
    return out;
}

}  // namespace spinnet
