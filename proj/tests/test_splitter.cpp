#include <cmath>

#include "doctest.h"

#include "spinnet/splitter.hpp"

using namespace spinnet;

TEST_CASE("Y node rows follow the splitter algebra") {
    const auto m = y_node_matrix(M_SQRT1_2, M_SQRT1_2);
    CHECK(m.unitarity_defect() < 1e-12);

    // lead input splits evenly over the arms
    CHECK(std::abs(m.entry(0, 0)) < 1e-15);
    CHECK(m.entry(1, 0).real() == doctest::Approx(M_SQRT1_2).epsilon(1e-14));
    CHECK(m.entry(2, 0).real() == doctest::Approx(M_SQRT1_2).epsilon(1e-14));

    const auto m68 = y_node_matrix(0.6, 0.8);
    CHECK(m68.unitarity_defect() < 1e-12);
    // arm_alpha input: (lead, arm_alpha, arm_beta) = (0.6, 0.64, -0.48)
    CHECK(m68.entry(0, 1).real() == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(m68.entry(1, 1).real() == doctest::Approx(0.64).epsilon(1e-14));
    CHECK(m68.entry(2, 1).real() == doctest::Approx(-0.48).epsilon(1e-14));
    CHECK(std::norm(m68.entry(0, 1)) + std::norm(m68.entry(1, 1)) + std::norm(m68.entry(2, 1)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // arm_beta input row
    CHECK(m68.entry(0, 2).real() == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(m68.entry(1, 2).real() == doctest::Approx(-0.48).epsilon(1e-14));
    CHECK(m68.entry(2, 2).real() == doctest::Approx(0.36).epsilon(1e-14));
}

TEST_CASE("destructive arm combination never reaches the lead") {
    for (auto [a, b] : {std::pair{M_SQRT1_2, M_SQRT1_2}, std::pair{0.6, 0.8}}) {
        const auto m = y_node_matrix(a, b);
        Eigen::Vector3cd in(0.0, b, -a);
        const Eigen::VectorXcd out = m.scatter(in);
        CHECK(std::abs(out[0]) < 1e-14);
        CHECK(std::abs(out[1] - in[1]) < 1e-14);
        CHECK(std::abs(out[2] - in[2]) < 1e-14);
    }
}

TEST_CASE("unnormalized couplings are rejected") {
    CHECK_THROWS_AS(y_node_matrix(0.7, 0.8), Error);
}

TEST_CASE("composing the split and return rules reproduces the assembled matrix") {
    const double a = 0.6, b = 0.8;
    // Inputs along (lead), (a,b) arm combination, (b,-a) combination map to
    // (a,b) arms, lead, and themselves; solve for the matrix.
    Eigen::Matrix3cd basis_in, image;
    basis_in << 1, 0, 0,
                0, a, b,
                0, b, -a;
    image << 0, 1, 0,
             a, 0, b,
             b, 0, -a;
    const Eigen::Matrix3cd composed = image * basis_in.inverse();
    CHECK((composed - y_node_matrix(a, b).matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("1xn node matrix") {
    SUBCASE("n = 2 reduces to the balanced Y node") {
        const auto y = y_node_matrix(M_SQRT1_2, M_SQRT1_2);
        const auto t = one_to_n_node_matrix(2);
        CHECK((y.matrix() - t.matrix()).cwiseAbs().maxCoeff() < 1e-15);
    }

    SUBCASE("n = 3 arm input row") {
        const auto m = one_to_n_node_matrix(3);
        CHECK(m.unitarity_defect() < 1e-12);
        CHECK(m.entry(0, 1).real() == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
        CHECK(m.entry(1, 1).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
        CHECK(m.entry(2, 1).real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
        CHECK(m.entry(3, 1).real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
        double sq = 0.0;
        for (int p = 0; p < 4; ++p) sq += std::norm(m.entry(p, 1));
        CHECK(sq == doctest::Approx(1.0).epsilon(1e-14));
    }

    SUBCASE("symmetric arm input recombines into the lead") {
        for (int n : {2, 3, 4, 5}) {
            const auto m = one_to_n_node_matrix(n);
            Eigen::VectorXcd in = Eigen::VectorXcd::Zero(n + 1);
            for (int l = 1; l <= n; ++l) in[l] = 1.0 / std::sqrt(double(n));
            const Eigen::VectorXcd out = m.scatter(in);
            CHECK(std::abs(out[0] - 1.0) < 1e-14);
            for (int l = 1; l <= n; ++l) CHECK(std::abs(out[l]) < 1e-14);
        }
    }

    SUBCASE("n < 2 is rejected") { CHECK_THROWS_AS(one_to_n_node_matrix(1), Error); }
}

TEST_CASE("1xn star decomposes into independent chains") {
    for (int n : {2, 3, 4}) {
        SplitterSpec spec;
        spec.kind = SplitterKind::OneToN;
        spec.n_arms = n;
        spec.lead_len = 12;
        spec.arm_lens.assign(n, 8);
        const auto dec = decompose_one_to_n(build_splitter_network(spec, {}));

        REQUIRE(dec.block_sizes.size() == static_cast<std::size_t>(n));
        CHECK(dec.block_sizes[0] == 20);
        for (int l = 1; l < n; ++l) CHECK(dec.block_sizes[l] == 8);
        CHECK(dec.off_block_max < 1e-12);
        CHECK(dec.max_commutator < 1e-12);
        CHECK(dec.basis_unitarity_defect < 1e-13);

        // the c-chain block is a uniform chain with hopping -J/2
        const auto& c = dec.chain_blocks[0];
        for (int i = 0; i + 1 < c.rows(); ++i)
            CHECK(std::abs(c(i, i + 1) - Complex(-0.5, 0.0)) < 1e-12);
    }
}

TEST_CASE("non-uniform arms cannot be decomposed") {
    SplitterSpec spec;
    spec.kind = SplitterKind::OneToN;
    spec.n_arms = 2;
    spec.lead_len = 8;
    spec.arm_lens = {8, 9};
    CHECK_THROWS_AS(decompose_one_to_n(build_splitter_network(spec, {})), InvalidTopology);
}

TEST_CASE("balanced Y splits a packet evenly without reflection") {
    SplitterSpec spec;
    spec.kind = SplitterKind::Y;
    spec.alpha = spec.beta = M_SQRT1_2;
    spec.lead_len = 70;
    spec.arm_lens = {70, 70};
    const auto net = build_splitter_network(spec, {});
    const auto m = y_node_matrix(M_SQRT1_2, M_SQRT1_2);

    PacketSpec packet;
    packet.alpha = 4.0 / 15.0;
    packet.support = net.region("lead");
    packet.center = 39.0;  // 30 sites before the node
    packet.momentum = M_PI / 2;
    const auto rep = verify_node_matrix_dynamically(net, m, packet);

    REQUIRE(rep.ports.size() == 3);
    CHECK(rep.ports[1].measured_prob == doctest::Approx(0.5).epsilon(0.02));
    CHECK(rep.ports[2].measured_prob == doctest::Approx(0.5).epsilon(0.02));
    CHECK(rep.ports[0].measured_prob < 0.01);  // no reflection
    CHECK(rep.max_prob_deviation < 0.02);
}

TEST_CASE("asymmetric Y arm input matches the matrix row") {
    SplitterSpec spec;
    spec.kind = SplitterKind::Y;
    spec.alpha = 0.6;
    spec.beta = 0.8;
    spec.lead_len = 70;
    spec.arm_lens = {70, 70};
    const auto net = build_splitter_network(spec, {});

    PacketSpec packet;
    packet.alpha = 4.0 / 15.0;
    packet.support = net.region("arm_A");
    packet.center = 29.0;  // 30 sites from the node, moving inward
    packet.momentum = -M_PI / 2;
    const auto rep = verify_node_matrix_dynamically(net, y_node_matrix(0.6, 0.8), packet);

    CHECK(rep.ports[0].measured_prob == doctest::Approx(0.36).epsilon(0.02));
    CHECK(rep.ports[1].measured_prob == doctest::Approx(0.4096).epsilon(0.02));
    CHECK(rep.ports[2].measured_prob == doctest::Approx(0.2304).epsilon(0.02));
    CHECK(rep.max_prob_deviation < 0.02);
    // the same-arm return carries the node reflection sign
    CHECK(rep.ports[1].measured_amp.real() < 0.0);
    CHECK_FALSE(rep.notes.empty());
}

TEST_CASE("1x3 lead input splits into thirds") {
    SplitterSpec spec;
    spec.kind = SplitterKind::OneToN;
    spec.n_arms = 3;
    spec.lead_len = 70;
    spec.arm_lens = {70, 70, 70};
    const auto net = build_splitter_network(spec, {});

    PacketSpec packet;
    packet.alpha = 4.0 / 15.0;
    packet.support = net.region("lead");
    packet.center = 39.0;
    packet.momentum = M_PI / 2;
    const auto rep = verify_node_matrix_dynamically(net, one_to_n_node_matrix(3), packet);

    for (int arm = 1; arm <= 3; ++arm)
        CHECK(rep.ports[arm].measured_prob == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    CHECK(rep.ports[0].measured_prob < 0.01);
}

TEST_CASE("wide-band packets are rejected for verification") {
    SplitterSpec spec;
    spec.kind = SplitterKind::Y;
    spec.alpha = spec.beta = M_SQRT1_2;
    spec.lead_len = 40;
    spec.arm_lens = {40, 40};
    const auto net = build_splitter_network(spec, {});
    PacketSpec packet;
    packet.alpha = 0.8;
    packet.support = net.region("lead");
    packet.center = 20.0;
    packet.momentum = M_PI / 2;
    CHECK_THROWS_AS(verify_node_matrix_dynamically(net, y_node_matrix(M_SQRT1_2, M_SQRT1_2), packet),
                    ConfigError);
}
