#include "spinnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace spinnet {

SpinNetwork::SpinNetwork(int n_sites, std::vector<Bond> bonds, std::vector<double> fields,
                         std::vector<DDQubitSpec> dd_qubits,
                         std::map<std::string, std::vector<int>> regions)
    : n_sites_(n_sites),
      bonds_(std::move(bonds)),
      fields_(std::move(fields)),
      dd_qubits_(std::move(dd_qubits)),
      regions_(std::move(regions)) {
    // Normalize bond orientation to i < j.
    for (auto& b : bonds_) {
        if (b.i > b.j) std::swap(b.i, b.j);
    }
    validate();
    adjacency_.assign(n_sites_, {});
    for (const auto& b : bonds_) {
        if (b.J_perp != 0.0) {
            adjacency_[b.i].emplace_back(b.j, b.J_perp);
            adjacency_[b.j].emplace_back(b.i, b.J_perp);
        }
    }
    for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
}

const std::vector<int>& SpinNetwork::region(const std::string& name) const {
    auto it = regions_.find(name);
    if (it == regions_.end()) throw InvalidTopology("unknown region: " + name);
    return it->second;
}

double SpinNetwork::vacuum_energy() const {
    double e = 0.0;
    for (const auto& b : bonds_) e -= b.Jz;  // s_i s_j = +1 for all-down
    for (double h : fields_) e -= h;
    return e;
}

void SpinNetwork::validate() const {
    if (n_sites_ < 2) throw InvalidTopology("network needs at least 2 sites");
    if (static_cast<int>(fields_.size()) != n_sites_)
        throw InvalidTopology("field table size does not match site count");

    std::set<std::pair<int, int>> seen;
    for (const auto& b : bonds_) {
        if (b.i < 0 || b.j >= n_sites_) throw InvalidTopology("bond site out of range");
        if (b.i == b.j) throw InvalidTopology("self-loop bond");
        if (!seen.insert({b.i, b.j}).second) throw InvalidTopology("duplicate bond");
        if (!std::isfinite(b.J_perp) || !std::isfinite(b.Jz))
            throw InvalidTopology("non-finite bond coupling");
        if (b.J_perp == 0.0 && b.Jz == 0.0) throw InvalidTopology("null bond");
    }
    for (double h : fields_)
        if (!std::isfinite(h)) throw InvalidTopology("non-finite local field");

    // Connectivity over all bonds (transport or Ising).
    std::vector<char> visited(n_sites_, 0);
    std::vector<std::vector<int>> adj(n_sites_);
    for (const auto& b : bonds_) {
        adj[b.i].push_back(b.j);
        adj[b.j].push_back(b.i);
    }
    std::queue<int> q;
    q.push(0);
    visited[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : adj[u])
            if (!visited[v]) {
                visited[v] = 1;
                ++reached;
                q.push(v);
            }
    }
    if (reached != n_sites_) throw InvalidTopology("network graph is disconnected");

    std::set<int> dd_sites;
    for (const auto& dd : dd_qubits_) {
        if (dd.Jz <= 0.0 || dd.h <= 0.0)
            throw InvalidTopology("DD qubit requires Jz > 0 and h > 0");
        if (dd.d_plus_1 != dd.d + 1) throw InvalidTopology("DD qubit sites must be adjacent ids");
        if (!dd_sites.insert(dd.d).second || !dd_sites.insert(dd.d_plus_1).second)
            throw InvalidTopology("overlapping DD qubits");
        auto it = std::find_if(bonds_.begin(), bonds_.end(), [&](const Bond& b) {
            return b.i == dd.d && b.j == dd.d_plus_1;
        });
        if (it == bonds_.end()) throw InvalidTopology("DD qubit sites are not bonded");
        if (it->J_perp != 0.0) throw InvalidTopology("DD internal bond must be pure Ising");
        if (it->Jz != dd.Jz) throw InvalidTopology("DD bond Ising strength mismatch");
        if (fields_[dd.d] != dd.h || fields_[dd.d_plus_1] != dd.h)
            throw InvalidTopology("DD sites must carry the qubit field h");
    }
}

SpinNetwork build_chain(int length, double J_perp) {
    if (length < 2) throw InvalidTopology("chain length must be >= 2");
    if (J_perp == 0.0) throw InvalidTopology("chain coupling must be nonzero");
    std::vector<Bond> bonds;
    bonds.reserve(length - 1);
    for (int i = 0; i + 1 < length; ++i) bonds.push_back({i, i + 1, J_perp, 0.0});
    std::vector<int> all(length);
    for (int i = 0; i < length; ++i) all[i] = i;
    return SpinNetwork(length, std::move(bonds), std::vector<double>(length, 0.0), {},
                       {{"chain", all}});
}

SpinNetwork embed_dd_qubit(const SpinNetwork& net, int position, double Jz, double h) {
    const int d = position, dp = position + 1;
    if (d < 0 || dp >= net.n_sites()) throw InvalidTopology("DD position out of range");
    for (const auto& dd : net.dd_qubits())
        if (dd.d == d || dd.d == dp || dd.d_plus_1 == d || dd.d_plus_1 == dp)
            throw InvalidTopology("DD qubit overlaps an existing one");

    auto bonds = net.bonds();
    auto it = std::find_if(bonds.begin(), bonds.end(),
                           [&](const Bond& b) { return b.i == d && b.j == dp; });
    if (it == bonds.end()) throw InvalidTopology("DD position sites are not bonded");
    it->J_perp = 0.0;
    it->Jz = Jz;

    auto fields = net.fields();
    fields[d] += h;
    fields[dp] += h;

    auto dds = net.dd_qubits();
    dds.push_back({d, dp, Jz, h});
    return SpinNetwork(net.n_sites(), std::move(bonds), std::move(fields), std::move(dds),
                       net.regions());
}

SpinNetwork build_splitter_network(const SplitterSpec& spec,
                                   const std::vector<DDPlacement>& dd_placements) {
    const double J = spec.J_perp;
    if (J == 0.0) throw InvalidTopology("splitter coupling must be nonzero");
    if (spec.lead_len < 2) throw InvalidTopology("lead must have at least 2 sites");

    int n_arms;
    std::vector<double> node_couplings;  // bond J_perp from node to each arm
    if (spec.kind == SplitterKind::Y) {
        n_arms = 2;
        if (std::abs(spec.alpha * spec.alpha + spec.beta * spec.beta - 1.0) > 1e-12)
            throw InvalidTopology("Y splitter requires alpha^2 + beta^2 = 1");
        node_couplings = {spec.alpha * J, spec.beta * J};
    } else {
        n_arms = spec.n_arms;
        if (n_arms < 2) throw InvalidTopology("1xn splitter requires n >= 2");
        node_couplings.assign(n_arms, J / std::sqrt(double(n_arms)));
    }
    if (static_cast<int>(spec.arm_lens.size()) != n_arms)
        throw InvalidTopology("arm length list does not match arm count");
    for (int len : spec.arm_lens)
        if (len < 2) throw InvalidTopology("arm must have at least 2 sites");

    std::vector<std::string> labels = spec.arm_labels;
    if (labels.empty()) {
        static const char* abc = "ABCDEFGH";
        for (int a = 0; a < n_arms; ++a)
            labels.push_back(spec.kind == SplitterKind::Y ? std::string(1, abc[a])
                                                          : std::to_string(a + 1));
    }

    std::vector<Bond> bonds;
    std::map<std::string, std::vector<int>> regions;

    std::vector<int> lead(spec.lead_len);
    for (int i = 0; i < spec.lead_len; ++i) lead[i] = i;
    for (int i = 0; i + 1 < spec.lead_len; ++i) bonds.push_back({i, i + 1, J, 0.0});
    regions["lead"] = lead;
    const int node = spec.lead_len - 1;

    int next = spec.lead_len;
    std::vector<std::vector<int>> arm_sites(n_arms);
    for (int a = 0; a < n_arms; ++a) {
        for (int i = 0; i < spec.arm_lens[a]; ++i) arm_sites[a].push_back(next++);
        bonds.push_back({node, arm_sites[a].front(), node_couplings[a], 0.0});
        for (size_t i = 0; i + 1 < arm_sites[a].size(); ++i)
            bonds.push_back({arm_sites[a][i], arm_sites[a][i + 1], J, 0.0});
        regions["arm_" + labels[a]] = arm_sites[a];
    }

    if (spec.out_lead_len > 0) {
        if (spec.out_lead_len < 2) throw InvalidTopology("output lead must have at least 2 sites");
        std::vector<double> out_couplings;
        if (spec.kind == SplitterKind::Y) {
            if (std::abs(spec.alpha_out * spec.alpha_out + spec.beta_out * spec.beta_out - 1.0) >
                1e-12)
                throw InvalidTopology("output Y node requires alpha'^2 + beta'^2 = 1");
            out_couplings = {spec.alpha_out * J, spec.beta_out * J};
        } else {
            out_couplings.assign(n_arms, J / std::sqrt(double(n_arms)));
        }
        std::vector<int> out(spec.out_lead_len);
        for (int i = 0; i < spec.out_lead_len; ++i) out[i] = next + i;
        const int out_node = out.front();
        for (int a = 0; a < n_arms; ++a)
            bonds.push_back({arm_sites[a].back(), out_node, out_couplings[a], 0.0});
        for (int i = 0; i + 1 < spec.out_lead_len; ++i) bonds.push_back({out[i], out[i + 1], J, 0.0});
        regions["out"] = out;
        next += spec.out_lead_len;
    }

    const int n_sites = next;
    SpinNetwork net(n_sites, std::move(bonds), std::vector<double>(n_sites, 0.0), {},
                    std::move(regions));

    for (const auto& p : dd_placements) {
        if (p.arm < 0 || p.arm >= n_arms) throw InvalidTopology("DD placement outside arms");
        const auto& sites = arm_sites[p.arm];
        if (p.offset < 0 || p.offset + 1 >= static_cast<int>(sites.size()))
            throw InvalidTopology("DD placement outside arm range");
        // Arm site ids are consecutive, so sites[offset], sites[offset+1] are adjacent ids.
        net = embed_dd_qubit(net, sites[p.offset], p.Jz, p.h);
    }
    return net;
}

}  // namespace spinnet
