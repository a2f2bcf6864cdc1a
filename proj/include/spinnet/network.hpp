#pragma once

#include <map>
#include <string>
#include <vector>

#include "spinnet/errors.hpp"

namespace spinnet {

// One exchange link of the network. J_perp is the XY coupling (single-flip
// hopping element -J_perp/2), Jz the Ising coupling entering the diagonal
// as -Jz * s_i * s_j with s = +1 (flipped) / -1 (unflipped).
struct Bond {
    int i = 0;
    int j = 0;
    double J_perp = 0.0;
    double Jz = 0.0;
};

// Double-dot qubit: two adjacent spins (d, d+1) coupled purely by Ising
// interaction -Jz and sitting in a local field +h each. A single flip
// confined on (d, d+1) encodes |0> (flip at d+1) or |1> (flip at d).
struct DDQubitSpec {
    int d = 0;
    int d_plus_1 = 0;
    double Jz = 0.0;
    double h = 0.0;
};

enum class SplitterKind { Y, OneToN };

// Placement of a DD qubit inside a splitter arm. `offset` counts sites from
// the node end of the arm; the qubit occupies arm sites offset and offset+1.
struct DDPlacement {
    int arm = 0;
    int offset = 0;
    double Jz = 10.0;
    double h = 10.0;
};

// Geometry of a beam-splitter network. With out_lead_len == 0 this is a
// single-node star (one lead fanning into open-ended arms); otherwise the
// arms reconnect through a second node into an output lead (the two-splitter
// interferometer geometry used by the entangling protocols).
struct SplitterSpec {
    SplitterKind kind = SplitterKind::Y;
    double alpha = 0.0, beta = 0.0;       // Y node couplings, alpha^2+beta^2 = 1
    int n_arms = 2;                       // OneToN fan-out
    int lead_len = 0;                     // input lead, includes the node site
    std::vector<int> arm_lens;            // sites per arm (between the nodes)
    std::vector<std::string> arm_labels;  // defaults: A,B,... or 1..n
    int out_lead_len = 0;                 // includes the output node site
    double alpha_out = 0.0, beta_out = 0.0;  // right Y node; OneToN reuses 1/sqrt(n)
    double J_perp = 1.0;
};

// Immutable weighted spin graph: sites, bonds, local fields and the tagged
// DD qubit pairs. Regions are named, path-ordered site lists (leads/arms)
// used for packet supports and measurement projectors.
class SpinNetwork {
public:
    SpinNetwork(int n_sites, std::vector<Bond> bonds, std::vector<double> fields,
                std::vector<DDQubitSpec> dd_qubits,
                std::map<std::string, std::vector<int>> regions);

    int n_sites() const { return n_sites_; }
    const std::vector<Bond>& bonds() const { return bonds_; }
    const std::vector<double>& fields() const { return fields_; }
    const std::vector<DDQubitSpec>& dd_qubits() const { return dd_qubits_; }
    const std::map<std::string, std::vector<int>>& regions() const { return regions_; }

    const std::vector<int>& region(const std::string& name) const;
    bool has_region(const std::string& name) const { return regions_.count(name) > 0; }

    // XY-coupled neighbours of `site` as (neighbour, J_perp) pairs;
    // bonds with J_perp == 0 (DD internal links) are not listed.
    const std::vector<std::pair<int, double>>& hop_neighbors(int site) const {
        return adjacency_[site];
    }

    // Sum of -Jz over all Ising bonds plus -h over all field sites: the
    // diagonal energy of the all-down vacuum.
    double vacuum_energy() const;

private:
    void validate() const;

    int n_sites_;
    std::vector<Bond> bonds_;
    std::vector<double> fields_;
    std::vector<DDQubitSpec> dd_qubits_;
    std::map<std::string, std::vector<int>> regions_;
    std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

// Uniform open chain: sites 0..length-1, XY bonds J_perp, no Ising terms,
// no fields. Region "chain" holds the full path order.
SpinNetwork build_chain(int length, double J_perp);

// Replace the transport bond (position, position+1) by a pure Ising link of
// strength Jz and put local fields h on both sites, registering the pair as
// a DD qubit. Pure: returns a new network.
SpinNetwork embed_dd_qubit(const SpinNetwork& net, int position, double Jz, double h);

// Star or two-node interferometer per `spec`, with DD qubits embedded into
// arms at the requested placements. Regions: "lead", "arm_<label>", and
// "out" when an output lead is present.
SpinNetwork build_splitter_network(const SplitterSpec& spec,
                                   const std::vector<DDPlacement>& dd_placements);

}  // namespace spinnet
