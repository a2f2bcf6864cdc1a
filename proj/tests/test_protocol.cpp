#include <cmath>
#include <random>

#include "doctest.h"

#include "spinnet/protocol.hpp"

using namespace spinnet;

TEST_CASE("concurrence of the post-scattering density matrix") {
    CHECK(concurrence(entangling_density(M_SQRT1_2, M_SQRT1_2)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(concurrence(entangling_density(1.0, 0.0)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(concurrence(entangling_density(0.6, 0.8)) == doctest::Approx(0.96).epsilon(1e-12));
}

TEST_CASE("concurrence equals 2|ab| across a coupling sweep") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> angle(0.05, M_PI / 2 - 0.05);
    for (int i = 0; i < 50; ++i) {
        const double th = angle(rng);
        const double a = std::cos(th), b = std::sin(th);
        CHECK(std::abs(concurrence(entangling_density(a, b)) - 2.0 * std::abs(a * b)) < 1e-10);
    }
}

TEST_CASE("density matrix validation") {
    TwoQubitDensity bad;
    bad.rho = Eigen::Matrix4cd::Zero();
    bad.rho(0, 0) = 1.2;  // trace != 1
    CHECK_THROWS_AS(concurrence(bad), Error);

    bad.rho(0, 0) = 1.5;
    bad.rho(1, 1) = -0.5;  // negative eigenvalue
    CHECK_THROWS_AS(concurrence(bad), Error);

    CHECK_NOTHROW(entangling_density(0.6, 0.8).validate());
    CHECK_THROWS_AS(entangling_density(0.7, 0.8), Error);
}

TEST_CASE("GHZ closed form") {
    ProtocolConfig cfg;
    cfg.kind = ProtocolKind::GHZ;

    SUBCASE("ideal resonance gives probability one half") {
        for (int n : {1, 2, 5}) {
            cfg.n = n;
            cfg.t_override = Complex(1.0, 0.0);
            const auto out = run_ghz_closed_form(cfg);
            CHECK(out.success_probability == doctest::Approx(0.5).epsilon(1e-15));
            CHECK(out.fidelity_to_target == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    SUBCASE("near-resonant optimum reproduces the success formula") {
        cfg.n = 2;
        const double t = 0.9;
        cfg.t_override = Complex(t, 0.0);
        auto [a, b] = ghz_optimal_couplings(t, 2);
        cfg.alpha = cfg.alpha_out = a;
        cfg.beta = cfg.beta_out = b;
        const auto out = run_ghz_closed_form(cfg);
        const double expected = 2.0 / std::pow(1.0 + std::pow(t, -2.0), 2.0);
        CHECK(expected == doctest::Approx(0.400539).epsilon(1e-5));
        CHECK(out.success_probability == doctest::Approx(expected).epsilon(1e-12));
        CHECK(out.fidelity_to_target == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(ghz_success_probability(Complex(t, 0.0), 2) ==
              doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("single-branch limit is a product state") {
        cfg.n = 3;
        cfg.t_override = Complex(1.0, 0.0);
        cfg.alpha = 1.0;
        cfg.beta = 0.0;
        const auto out = run_ghz_closed_form(cfg);
        CHECK(out.fidelity_to_target == doctest::Approx(0.5).epsilon(1e-12));
        // post state is |1>^n
        CHECK(std::abs(out.post_state(7, 7).real() - 1.0) < 1e-12);
    }

    SUBCASE("vanishing transmission is rejected") {
        cfg.n = 2;
        cfg.t_override = Complex(0.0, 0.0);
        CHECK_THROWS_AS(run_ghz_closed_form(cfg), ConfigError);
    }

    SUBCASE("branch ledger closes") {
        cfg.n = 2;
        for (Complex t : {Complex(1.0, 0.0), Complex(0.9, 0.0), Complex(0.6, 0.35)}) {
            cfg.t_override = t;
            cfg.alpha = cfg.alpha_out = 0.7;
            cfg.beta = cfg.beta_out = std::sqrt(1.0 - 0.49);
            const auto out = run_ghz_closed_form(cfg);
            double total = 0.0;
            for (const auto& b : out.ledger) total += b.prob;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("GHZ optimality by grid search") {
    for (double t : {0.8, 0.9}) {
        for (int n : {1, 2, 3}) {
            const double u_star = 1.0 / (1.0 + std::pow(t, n));
            double best_u = 0.0, best_p = -1.0;
            for (double u = 0.002; u < 0.999; u += 0.002) {
                const double p = ghz_constrained_probability(t, n, u);
                if (p > best_p) {
                    best_p = p;
                    best_u = u;
                }
            }
            CHECK(std::abs(best_u - u_star) <= 0.002 + 1e-12);
            CHECK(best_p <= ghz_success_probability(Complex(t, 0.0), n) + 1e-9);
            CHECK(ghz_constrained_probability(t, n, u_star) ==
                  doctest::Approx(ghz_success_probability(Complex(t, 0.0), n)).epsilon(1e-12));
        }
    }
}

TEST_CASE("probability monotonicity in the register size") {
    for (double t : {1.0, 0.95, 0.9, 0.8}) {
        double prev_ghz = 1.0, prev_w = 1.0;
        for (int n = 2; n <= 8; ++n) {
            const double pg = ghz_success_probability(Complex(t, 0.0), n);
            const double pw = w_success_probability(Complex(t, 0.0), n);
            CHECK(pg <= prev_ghz + 1e-12);
            CHECK(pw < prev_w);
            prev_ghz = pg;
            prev_w = pw;
        }
    }
}

TEST_CASE("W closed form") {
    ProtocolConfig cfg;
    cfg.kind = ProtocolKind::W;

    SUBCASE("ideal two-arm case") {
        cfg.n = 2;
        cfg.t_override = Complex(1.0, 0.0);
        const auto out = run_w_closed_form(cfg);
        CHECK(out.success_probability == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(out.fidelity_to_target == doctest::Approx(1.0).epsilon(1e-12));
        // state (|10> + |01>)/sqrt(2): register patterns 0b01 and 0b10
        CHECK(std::abs(out.post_state(1, 1).real() - 0.5) < 1e-12);
        CHECK(std::abs(out.post_state(2, 2).real() - 0.5) < 1e-12);
        CHECK(std::abs(out.post_state(1, 2).real() - 0.5) < 1e-12);
    }

    SUBCASE("success probability |t|^2 / n") {
        cfg.n = 3;
        cfg.t_override = Complex(0.9, 0.0);  // |t|^2 = 0.81
        const auto out = run_w_closed_form(cfg);
        CHECK(out.success_probability == doctest::Approx(0.27).epsilon(1e-12));
        CHECK(out.fidelity_to_target == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("ledger closes for any |t| <= 1") {
        for (int n : {2, 3, 5}) {
            cfg.n = n;
            cfg.t_override = Complex(0.8, 0.3);
            const auto out = run_w_closed_form(cfg);
            double total = 0.0;
            for (const auto& b : out.ledger) total += b.prob;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    SUBCASE("n = 1 is undefined") {
        cfg.n = 1;
        CHECK_THROWS_AS(run_w_closed_form(cfg), ConfigError);
    }

    SUBCASE("asymmetric splitters are out of scope") {
        cfg.n = 2;
        cfg.alpha = 0.6;
        cfg.beta = 0.8;
        CHECK_THROWS_AS(run_w_closed_form(cfg), ConfigError);
    }
}

TEST_CASE("probability curves") {
    const auto rows = probability_curves({1.0, 0.9}, 2, 6);
    REQUIRE(rows.size() == 10);
    for (const auto& r : rows) {
        CHECK(r.p_ghz >= 0.0);
        CHECK(r.p_ghz <= 1.0);
        CHECK(r.p_w >= 0.0);
        CHECK(r.p_w <= 1.0);
        if (r.T == 1.0) {
            CHECK(r.p_ghz == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(r.p_w == doctest::Approx(1.0 / r.n).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(probability_curves({0.0}, 2, 4), ConfigError);
    CHECK_THROWS_AS(probability_curves({0.5}, 1, 4), ConfigError);
}

TEST_CASE("full dynamics: single-qubit GHZ operation at resonance") {
    ProtocolConfig cfg;
    cfg.kind = ProtocolKind::GHZ;
    cfg.n = 1;
    const auto out = run_protocol_full_dynamics(cfg);

    CHECK(std::abs(out.success_probability - 0.5) <= 0.03);
    CHECK(out.fidelity_to_target >= 0.97);

    double total = 0.0;
    for (const auto& b : out.ledger) total += b.prob;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("per-DD parameter lists") {
    ProtocolConfig cfg;
    cfg.kind = ProtocolKind::GHZ;
    cfg.n = 2;
    cfg.dd_h_each = {10.0, 9.0};
    cfg.dd_Jz_each = {10.0, 10.0};

    // closed form needs a single t unless the caller supplies one
    CHECK_THROWS_AS(run_ghz_closed_form(cfg), ConfigError);
    cfg.t_override = Complex(0.9, 0.0);
    CHECK_NOTHROW(run_ghz_closed_form(cfg));

    cfg.dd_h_each = {10.0};  // wrong length
    CHECK_THROWS_AS(run_ghz_closed_form(cfg), ConfigError);
    CHECK_THROWS_AS(run_protocol_full_dynamics(cfg), ConfigError);
}

TEST_CASE("dynamics engine refuses oversized registers") {
    ProtocolConfig cfg;
    cfg.kind = ProtocolKind::GHZ;
    cfg.n = 4;
    CHECK_THROWS_WITH_AS(run_protocol_full_dynamics(cfg),
                         doctest::Contains("sector k = n + 1"), ConfigError);
}

TEST_CASE("entangling scattering builds the expected coherence") {
    // A DD in |0> hit by the packet branch of a (packet, vacuum)
    // superposition: the amplitudes assemble the two-branch density matrix.
    const ScanGeometry geom{160, 79, 39.0, 4.0 / 15.0, 0.0};
    const auto net = scan_network(geom, 10.0, 10.0);
    const auto dd = net.dd_qubits().front();
    const double T = scan_time(geom);

    const double a = 0.6, b = 0.8;
    const auto amps = scatter_off_dd(net, scan_packet(geom, net), 0, T);

    // vacuum branch: the register flip alone, same convention corrections
    const auto basis1 = enumerate_sector(net, 1);
    StateVector reg0{basis1, Eigen::VectorXcd::Zero(basis1->size())};
    reg0.amps[dd.d_plus_1] = 1.0;
    const Propagator prop1(std::make_shared<const SparseOperator>(
        assemble_hamiltonian(net, *basis1)));
    const auto reg_t = prop1.evolve(reg0, T);
    // remove the dressed-baseline phase the same way scatter_off_dd does
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        assemble_hamiltonian(net, *basis1).dense());
    int best = 0;
    double best_w = -1.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (std::norm(es.eigenvectors()(dd.d_plus_1, i)) > best_w) {
            best_w = std::norm(es.eigenvectors()(dd.d_plus_1, i));
            best = i;
        }
    const Complex vac_amp = reg_t.amps[dd.d_plus_1] *
                            std::exp(Complex(0.0, es.eigenvalues()[best] * T));

    // basis {|1,Vac>, |1,phi_R>, |0,Vac>, |0,phi_R>}
    Eigen::Vector4cd psi(0.0, a * amps.t, b * vac_amp, a * amps.r);
    psi /= psi.norm();
    TwoQubitDensity rho;
    rho.rho = psi * psi.adjoint();
    CHECK(concurrence(rho) == doctest::Approx(2.0 * a * b).epsilon(0.02));

    // z-polarized incident packet: no entanglement survives at resonance
    Eigen::Vector4cd pure(0.0, amps.t, 0.0, amps.r);
    pure /= pure.norm();
    TwoQubitDensity rho_pure;
    rho_pure.rho = pure * pure.adjoint();
    CHECK(concurrence(rho_pure) < 0.02);
}
