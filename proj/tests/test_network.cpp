#include <cmath>

#include "doctest.h"

#include "spinnet/network.hpp"

using namespace spinnet;

TEST_CASE("minimal chain") {
    const auto net = build_chain(2, 1.0);
    REQUIRE(net.n_sites() == 2);
    REQUIRE(net.bonds().size() == 1);
    CHECK(net.bonds()[0].i == 0);
    CHECK(net.bonds()[0].j == 1);
    CHECK(net.bonds()[0].J_perp == 1.0);
    CHECK(net.bonds()[0].Jz == 0.0);
}

TEST_CASE("long chain construction") {
    const auto net = build_chain(100, 1.0);
    CHECK(net.bonds().size() == 99);
    for (double h : net.fields()) CHECK(h == 0.0);
    CHECK(net.region("chain").size() == 100);
    // bond symmetry: normalized orientation, no duplicates
    for (const auto& b : net.bonds()) CHECK(b.i < b.j);
}

TEST_CASE("negated coupling keeps the topology") {
    const auto plus = build_chain(100, 1.0);
    const auto minus = build_chain(100, -1.0);
    REQUIRE(plus.bonds().size() == minus.bonds().size());
    for (std::size_t i = 0; i < plus.bonds().size(); ++i) {
        CHECK(plus.bonds()[i].i == minus.bonds()[i].i);
        CHECK(plus.bonds()[i].j == minus.bonds()[i].j);
        CHECK(plus.bonds()[i].J_perp == -minus.bonds()[i].J_perp);
    }
}

TEST_CASE("chain input validation") {
    CHECK_THROWS_AS(build_chain(1, 1.0), InvalidTopology);
    CHECK_THROWS_AS(build_chain(10, 0.0), InvalidTopology);
}

TEST_CASE("embedding a DD qubit rewires one bond") {
    auto net = embed_dd_qubit(build_chain(4, 1.0), 1, 10.0, 10.0);
    REQUIRE(net.dd_qubits().size() == 1);
    CHECK(net.dd_qubits()[0].d == 1);
    CHECK(net.dd_qubits()[0].d_plus_1 == 2);

    int xy_bonds = 0, ising_bonds = 0;
    for (const auto& b : net.bonds()) {
        if (b.J_perp != 0.0) ++xy_bonds;
        if (b.Jz != 0.0) {
            ++ising_bonds;
            CHECK(b.i == 1);
            CHECK(b.j == 2);
            CHECK(b.J_perp == 0.0);
            CHECK(b.Jz == 10.0);
        }
    }
    CHECK(xy_bonds == 2);
    CHECK(ising_bonds == 1);
    CHECK(net.fields()[0] == 0.0);
    CHECK(net.fields()[1] == 10.0);
    CHECK(net.fields()[2] == 10.0);
    CHECK(net.fields()[3] == 0.0);
}

TEST_CASE("DD embedding for the long-chain geometry") {
    const auto net = embed_dd_qubit(build_chain(100, 1.0), 50, 10.0, 10.0);
    int fielded = 0;
    for (double h : net.fields())
        if (h != 0.0) ++fielded;
    CHECK(fielded == 2);
    CHECK(net.fields()[50] == 10.0);
    CHECK(net.fields()[51] == 10.0);
}

TEST_CASE("overlapping DD qubits are rejected") {
    const auto net = embed_dd_qubit(build_chain(6, 1.0), 1, 10.0, 10.0);
    CHECK_THROWS_AS(embed_dd_qubit(net, 1, 10.0, 10.0), InvalidTopology);
    CHECK_THROWS_AS(embed_dd_qubit(net, 2, 10.0, 10.0), InvalidTopology);
    CHECK_THROWS_AS(embed_dd_qubit(net, 0, 10.0, 10.0), InvalidTopology);
    CHECK_NOTHROW(embed_dd_qubit(net, 3, 10.0, 10.0));
}

TEST_CASE("DD parameter validation") {
    CHECK_THROWS_AS(embed_dd_qubit(build_chain(6, 1.0), 1, -1.0, 10.0), InvalidTopology);
    CHECK_THROWS_AS(embed_dd_qubit(build_chain(6, 1.0), 1, 10.0, 0.0), InvalidTopology);
    CHECK_THROWS_AS(embed_dd_qubit(build_chain(6, 1.0), 5, 10.0, 10.0), InvalidTopology);
}

TEST_CASE("balanced Y splitter with a DD in arm A") {
    SplitterSpec spec;
    spec.kind = SplitterKind::Y;
    spec.alpha = spec.beta = M_SQRT1_2;
    spec.lead_len = 10;
    spec.arm_lens = {12, 12};
    spec.out_lead_len = 10;
    spec.alpha_out = spec.beta_out = M_SQRT1_2;
    const auto net = build_splitter_network(spec, {{0, 5, 10.0, 10.0}});

    CHECK(net.n_sites() == 10 + 12 + 12 + 10);
    CHECK(net.region("lead").size() == 10);
    CHECK(net.region("arm_A").size() == 12);
    CHECK(net.region("arm_B").size() == 12);
    CHECK(net.region("out").size() == 10);
    REQUIRE(net.dd_qubits().size() == 1);

    const int node = net.region("lead").back();
    int node_bonds = 0;
    for (const auto& b : net.bonds())
        if (b.i == node && b.j != node - 1) {
            ++node_bonds;
            CHECK(b.J_perp == doctest::Approx(M_SQRT1_2).epsilon(1e-12));
        }
    CHECK(node_bonds == 2);
}

TEST_CASE("1x3 splitter has equal node couplings") {
    SplitterSpec spec;
    spec.kind = SplitterKind::OneToN;
    spec.n_arms = 3;
    spec.lead_len = 8;
    spec.arm_lens = {10, 10, 10};
    const auto net = build_splitter_network(spec, {{0, 4, 8.0, 8.0}, {1, 4, 8.0, 8.0},
                                                   {2, 4, 8.0, 8.0}});
    CHECK(net.dd_qubits().size() == 3);
    const int node = net.region("lead").back();
    std::vector<double> couplings;
    for (const auto& b : net.bonds())
        if ((b.i == node || b.j == node) && std::abs(b.J_perp) > 0 && b.j != node)
            couplings.push_back(b.J_perp);
    REQUIRE(couplings.size() == 3);
    for (double c : couplings) CHECK(c == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("pythagorean Y couplings") {
    SplitterSpec spec;
    spec.kind = SplitterKind::Y;
    spec.alpha = 0.6;
    spec.beta = 0.8;
    spec.lead_len = 6;
    spec.arm_lens = {6, 6};
    const auto net = build_splitter_network(spec, {});
    const int node = net.region("lead").back();
    double ca = 0, cb = 0;
    for (const auto& b : net.bonds())
        if (b.i == node && b.j != node - 1) {
            if (b.j == net.region("arm_A").front()) ca = b.J_perp;
            if (b.j == net.region("arm_B").front()) cb = b.J_perp;
        }
    CHECK(ca == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(cb == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(ca * ca + cb * cb == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("splitter validation") {
    SplitterSpec spec;
    spec.kind = SplitterKind::Y;
    spec.alpha = 0.7;
    spec.beta = 0.8;  // not normalized
    spec.lead_len = 6;
    spec.arm_lens = {6, 6};
    CHECK_THROWS_AS(build_splitter_network(spec, {}), InvalidTopology);

    spec.alpha = 0.6;
    CHECK_THROWS_AS(build_splitter_network(spec, {{2, 2, 10.0, 10.0}}), InvalidTopology);
    CHECK_THROWS_AS(build_splitter_network(spec, {{0, 5, 10.0, 10.0}}), InvalidTopology);

    SplitterSpec one;
    one.kind = SplitterKind::OneToN;
    one.n_arms = 1;
    one.lead_len = 6;
    one.arm_lens = {6};
    CHECK_THROWS_AS(build_splitter_network(one, {}), InvalidTopology);
}

TEST_CASE("networks stay connected") {
    // hand-built disconnected graph must be rejected
    std::vector<Bond> bonds = {{0, 1, 1.0, 0.0}, {2, 3, 1.0, 0.0}};
    CHECK_THROWS_AS(SpinNetwork(4, bonds, std::vector<double>(4, 0.0), {}, {}), InvalidTopology);
}
