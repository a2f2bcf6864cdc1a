// Command-line surface: build networks, run transmission scans and
// entanglement protocols, emit CSV tables and JSON summaries.
//
// Exit codes: 0 success, 1 numerical failure, 2 config error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>

#include "CLI11.hpp"

#include "spinnet/io.hpp"
#include "spinnet/parallel.hpp"

using namespace spinnet;
using io::json;

namespace {

int default_workers() {
    if (const char* env = std::getenv("SPINNET_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

std::vector<double> linspace(double lo, double hi, int steps) {
    if (steps < 1) throw ConfigError("grid needs at least one step");
    std::vector<double> v(steps);
    for (int i = 0; i < steps; ++i)
        v[i] = steps == 1 ? lo : lo + (hi - lo) * double(i) / double(steps - 1);
    return v;
}

// File values fill in options the command line left untouched; every key must
// name a known option of the subcommand.
void apply_config_file(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    for (const auto& [key, value] : j.items()) {
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw ConfigError("unknown config key: " + key);
        if (opt->count() > 0) continue;  // explicit flags win
        if (value.is_array())
            for (const auto& item : value) opt->add_result(item.dump());
        else if (value.is_string())
            opt->add_result(value.get<std::string>());
        else
            opt->add_result(value.dump());
        opt->run_callback();
    }
}

struct ScanArgs {
    double h_min = 0.0, h_max = 20.0;
    int h_steps = 41;
    double jz_min = 0.0, jz_max = 20.0;
    int jz_steps = 41;
    double alpha = 4.0 / 15.0;
    int chain_len = 240, dd_pos = 119;
    double center = 69.0, t_final = 0.0;
    int workers = default_workers();
    std::string out = "transmission.csv";
    std::string summary = "transmission_summary.json";
};

int run_scan(const ScanArgs& a) {
    ScanGeometry geom;
    geom.chain_len = a.chain_len;
    geom.dd_pos = a.dd_pos;
    geom.packet_center = a.center;
    geom.packet_alpha = a.alpha;
    geom.t_final = a.t_final;

    const auto surf = transmission_scan(linspace(a.h_min, a.h_max, a.h_steps),
                                        linspace(a.jz_min, a.jz_max, a.jz_steps), geom, a.workers);
    io::write_file(a.out, io::surface_csv(surf));
    const json summary = io::surface_summary(surf);
    io::write_file(a.summary, summary.dump(2) + "\n");

    const double frac =
        double(summary.at("failures").get<std::size_t>()) / double(surf.points.size());
    std::cout << "scan complete: " << surf.points.size() << " points, "
              << summary.at("failures").get<std::size_t>() << " failures -> " << a.out << "\n";
    return frac > 0.05 ? 1 : 0;
}

struct ProtocolArgs {
    std::string kind = "ghz";
    int n = 1;
    std::string engine = "closed-form";
    double alpha = M_SQRT1_2, beta = M_SQRT1_2, alpha_out = M_SQRT1_2, beta_out = M_SQRT1_2;
    double h = 10.0, jz = 10.0;
    double packet_alpha = 4.0 / 15.0;
    double t_re = std::numeric_limits<double>::quiet_NaN();
    double t_im = 0.0;
    int lead_len = 36, arm_len = 36, out_len = 48;
    std::string out = "protocol_summary.json";
};

int run_protocol(const ProtocolArgs& a) {
    ProtocolConfig cfg;
    if (a.kind == "ghz")
        cfg.kind = ProtocolKind::GHZ;
    else if (a.kind == "w")
        cfg.kind = ProtocolKind::W;
    else
        throw ConfigError("kind must be ghz or w");
    cfg.n = a.n;
    cfg.alpha = a.alpha;
    cfg.beta = a.beta;
    cfg.alpha_out = a.alpha_out;
    cfg.beta_out = a.beta_out;
    cfg.dd_h = a.h;
    cfg.dd_Jz = a.jz;
    cfg.packet_alpha = a.packet_alpha;
    cfg.lead_len = a.lead_len;
    cfg.arm_len = a.arm_len;
    cfg.out_len = a.out_len;
    if (!std::isnan(a.t_re)) cfg.t_override = Complex(a.t_re, a.t_im);

    json result;
    result["kind"] = a.kind;
    result["n"] = a.n;
    result["engine"] = a.engine;
    auto closed = [&] {
        return cfg.kind == ProtocolKind::GHZ ? run_ghz_closed_form(cfg) : run_w_closed_form(cfg);
    };
    if (a.engine == "closed-form") {
        result["closed_form"] = io::outcome_json(closed());
    } else if (a.engine == "dynamics") {
        result["dynamics"] = io::outcome_json(run_protocol_full_dynamics(cfg));
    } else if (a.engine == "both") {
        const auto oc = closed();
        const auto od = run_protocol_full_dynamics(cfg);
        result["closed_form"] = io::outcome_json(oc);
        result["dynamics"] = io::outcome_json(od);
        result["consistency"] = {
            {"delta_p", std::abs(oc.success_probability - od.success_probability)},
            {"delta_fidelity", std::abs(oc.fidelity_to_target - od.fidelity_to_target)}};
    } else {
        throw ConfigError("engine must be closed-form, dynamics or both");
    }
    io::write_file(a.out, result.dump(2) + "\n");
    std::cout << result.dump(2) << "\n";
    return 0;
}

struct CurveArgs {
    std::vector<double> T = {1.0, 0.9, 0.8, 0.7};
    int n_min = 2, n_max = 8;
    std::string out = "curves.csv";
};

int run_curves(const CurveArgs& a) {
    io::write_file(a.out, io::curves_csv(probability_curves(a.T, a.n_min, a.n_max)));
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

struct VerifyArgs {
    double y_alpha = M_SQRT1_2, y_beta = M_SQRT1_2;
    double packet_alpha = 4.0 / 15.0;
    int lead_len = 80, arm_len = 80;
    std::string out;
};

int run_verify(const VerifyArgs& a) {
    std::ostringstream report;
    bool all_pass = true;
    auto check = [&](const std::string& name, bool ok, double value) {
        report << (ok ? "PASS  " : "FAIL  ") << name << "  (max deviation "
               << io::format_number(value) << ")\n";
        all_pass = all_pass && ok;
    };

    // Algebraic identities.
    try {
        const auto y = y_node_matrix(a.y_alpha, a.y_beta);
        check("y-node unitarity (" + io::format_number(a.y_alpha) + "," +
                  io::format_number(a.y_beta) + ")",
              y.unitarity_defect() < 1e-12, y.unitarity_defect());
    } catch (const std::exception& e) {
        report << "FAIL  y-node construction: " << e.what() << "\n";
        all_pass = false;
    }
    for (int n = 2; n <= 5; ++n) {
        const auto m = one_to_n_node_matrix(n);
        check("1x" + std::to_string(n) + " node unitarity", m.unitarity_defect() < 1e-12,
              m.unitarity_defect());
    }
    {
        const auto y = y_node_matrix(M_SQRT1_2, M_SQRT1_2);
        const auto t = one_to_n_node_matrix(2);
        const double dev = (y.matrix() - t.matrix()).cwiseAbs().maxCoeff();
        check("1x2 reduces to the balanced Y node", dev < 1e-14, dev);
    }

    // Block decomposition of 1xn stars.
    for (int n = 2; n <= 5; ++n) {
        SplitterSpec spec;
        spec.kind = SplitterKind::OneToN;
        spec.n_arms = n;
        spec.lead_len = 24;
        spec.arm_lens.assign(n, 16);
        const auto dec = decompose_one_to_n(build_splitter_network(spec, {}));
        check("1x" + std::to_string(n) + " decomposition off-block residue",
              dec.off_block_max < 1e-12, dec.off_block_max);
        check("1x" + std::to_string(n) + " sub-Hamiltonian commutators",
              dec.max_commutator < 1e-12, dec.max_commutator);
        check("1x" + std::to_string(n) + " basis-change unitarity",
              dec.basis_unitarity_defect < 1e-13, dec.basis_unitarity_defect);
    }

    // Dynamical port checks.
    auto dyn_check = [&](const std::string& name, const SplitterSpec& spec,
                         const NodeScatteringMatrix& m) {
        const auto net = build_splitter_network(spec, {});
        const auto reports = verify_splitter(net, m, a.packet_alpha);
        double dev = 0.0;
        for (const auto& r : reports) {
            dev = std::max(dev, r.max_prob_deviation);
            report << io::verification_table(r);
        }
        check(name + " dynamical port probabilities", dev < 0.02, dev);
    };
    {
        SplitterSpec spec;
        spec.kind = SplitterKind::Y;
        spec.alpha = M_SQRT1_2;
        spec.beta = M_SQRT1_2;
        spec.lead_len = a.lead_len;
        spec.arm_lens = {a.arm_len, a.arm_len};
        dyn_check("Y(1/sqrt2,1/sqrt2)", spec, y_node_matrix(M_SQRT1_2, M_SQRT1_2));

        spec.alpha = 0.6;
        spec.beta = 0.8;
        dyn_check("Y(0.6,0.8)", spec, y_node_matrix(0.6, 0.8));
    }
    {
        SplitterSpec spec;
        spec.kind = SplitterKind::OneToN;
        spec.n_arms = 3;
        spec.lead_len = a.lead_len;
        spec.arm_lens.assign(3, a.arm_len);
        dyn_check("1x3", spec, one_to_n_node_matrix(3));
    }

    const std::string text = report.str();
    std::cout << text;
    if (!a.out.empty()) io::write_file(a.out, text);
    return all_pass ? 0 : 1;
}

struct EvolveArgs {
    std::string network;  // JSON network file; otherwise a chain is built
    int length = 200;
    int dd_pos = -1;
    double h = 10.0, jz = 10.0;
    double alpha = 4.0 / 15.0;
    double center = 50.0;
    double momentum = M_PI / 2;
    double time = 80.0;
    int frames = 9;
    std::string support_region;
    std::string out = "trajectory.csv";
    std::string emit_network;
};

int run_evolve(const EvolveArgs& a) {
    SpinNetwork net = [&] {
        if (!a.network.empty()) {
            std::ifstream in(a.network);
            if (!in) throw ConfigError("cannot open network file: " + a.network);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw ConfigError(std::string("network parse error: ") + e.what());
            }
            return io::network_from_json(j);
        }
        SpinNetwork chain = build_chain(a.length, 1.0);
        if (a.dd_pos >= 0) chain = embed_dd_qubit(chain, a.dd_pos, a.jz, a.h);
        return chain;
    }();
    if (!a.emit_network.empty())
        io::write_file(a.emit_network, io::network_json(net).dump(2) + "\n");

    std::string region_name = a.support_region;
    if (region_name.empty()) region_name = net.has_region("chain") ? "chain" : "lead";
    std::vector<int> support = net.region(region_name);
    // keep the support clear of register sites
    std::vector<int> frozen;
    for (const auto& dd : net.dd_qubits()) frozen.push_back(dd.d_plus_1);
    std::erase_if(support, [&](int s) {
        for (const auto& dd : net.dd_qubits())
            if (s == dd.d || s == dd.d_plus_1) return true;
        return false;
    });

    auto basis = enumerate_sector(net, 1 + static_cast<int>(frozen.size()));
    PacketSpec spec{a.alpha, a.center, a.momentum, support};
    StateVector psi = make_packet(basis, spec, frozen);
    const Propagator prop(std::make_shared<const SparseOperator>(
        assemble_hamiltonian(net, *basis)));

    std::ostringstream os;
    os << "# times in 1/J_perp; prob = flip occupation per site\n";
    os << "t,site,prob\n";
    const int frames = std::max(1, a.frames);
    const double dt = a.time / frames;
    double t = 0.0;
    for (int f = 0; f <= frames; ++f) {
        const Eigen::VectorXd occ = site_occupation(psi);
        for (int s = 0; s < net.n_sites(); ++s)
            os << io::format_number(t) << ',' << s << ',' << io::format_number(occ[s]) << "\n";
        if (f < frames) {
            psi = prop.evolve(psi, dt);
            t += dt;
        }
    }
    io::write_file(a.out, os.str());
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-network wave-packet scattering and entanglement protocols"};
    app.require_subcommand(1);

    ScanArgs scan;
    ProtocolArgs proto;
    CurveArgs curves;
    VerifyArgs verify;
    EvolveArgs evolve;
    std::string config_path;

    auto* s_scan = app.add_subcommand("scan-transmission", "map T(h, Jz) for a packet/DD collision");
    s_scan->add_option("--config", config_path, "JSON config file");
    s_scan->add_option("--h-min", scan.h_min);
    s_scan->add_option("--h-max", scan.h_max);
    s_scan->add_option("--h-steps", scan.h_steps);
    s_scan->add_option("--jz-min", scan.jz_min);
    s_scan->add_option("--jz-max", scan.jz_max);
    s_scan->add_option("--jz-steps", scan.jz_steps);
    s_scan->add_option("--alpha", scan.alpha, "packet inverse width");
    s_scan->add_option("--chain-len", scan.chain_len);
    s_scan->add_option("--dd-pos", scan.dd_pos);
    s_scan->add_option("--center", scan.center, "initial packet center");
    s_scan->add_option("--t-final", scan.t_final, "0 = derive from geometry");
    s_scan->add_option("--workers", scan.workers);
    s_scan->add_option("--out", scan.out);
    s_scan->add_option("--summary", scan.summary);

    auto* s_proto = app.add_subcommand("run-protocol", "GHZ / W generation protocols");
    s_proto->add_option("--config", config_path);
    s_proto->add_option("--kind", proto.kind, "ghz | w");
    s_proto->add_option("--n", proto.n, "DD qubit count");
    s_proto->add_option("--engine", proto.engine, "closed-form | dynamics | both");
    s_proto->add_option("--alpha", proto.alpha);
    s_proto->add_option("--beta", proto.beta);
    s_proto->add_option("--alpha-out", proto.alpha_out);
    s_proto->add_option("--beta-out", proto.beta_out);
    s_proto->add_option("--dd-h", proto.h);
    s_proto->add_option("--dd-jz", proto.jz);
    s_proto->add_option("--packet-alpha", proto.packet_alpha);
    s_proto->add_option("--t-re", proto.t_re, "closed-form t override (real part)");
    s_proto->add_option("--t-im", proto.t_im);
    s_proto->add_option("--lead-len", proto.lead_len);
    s_proto->add_option("--arm-len", proto.arm_len);
    s_proto->add_option("--out-len", proto.out_len);
    s_proto->add_option("--out", proto.out, "summary JSON path");

    auto* s_curves = app.add_subcommand("curves", "P_GHZ / P_W tables over T and n");
    s_curves->add_option("--config", config_path);
    s_curves->add_option("--T", curves.T, "transmission coefficients");
    s_curves->add_option("--n-min", curves.n_min);
    s_curves->add_option("--n-max", curves.n_max);
    s_curves->add_option("--out", curves.out);

    auto* s_verify = app.add_subcommand("verify", "splitter algebra and dynamics checks");
    s_verify->add_option("--config", config_path);
    s_verify->add_option("--y-alpha", verify.y_alpha);
    s_verify->add_option("--y-beta", verify.y_beta);
    s_verify->add_option("--packet-alpha", verify.packet_alpha);
    s_verify->add_option("--lead-len", verify.lead_len);
    s_verify->add_option("--arm-len", verify.arm_len);
    s_verify->add_option("--out", verify.out, "report file");

    auto* s_evolve = app.add_subcommand("evolve", "trajectory dump for a packet");
    s_evolve->add_option("--config", config_path);
    s_evolve->add_option("--network", evolve.network, "network JSON file");
    s_evolve->add_option("--length", evolve.length);
    s_evolve->add_option("--dd-pos", evolve.dd_pos, "embed a DD at this site (-1: none)");
    s_evolve->add_option("--dd-h", evolve.h);
    s_evolve->add_option("--dd-jz", evolve.jz);
    s_evolve->add_option("--alpha", evolve.alpha);
    s_evolve->add_option("--center", evolve.center);
    s_evolve->add_option("--momentum", evolve.momentum);
    s_evolve->add_option("--time", evolve.time);
    s_evolve->add_option("--frames", evolve.frames);
    s_evolve->add_option("--support-region", evolve.support_region);
    s_evolve->add_option("--out", evolve.out);
    s_evolve->add_option("--emit-network", evolve.emit_network);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!config_path.empty()) apply_config_file(sub, config_path);
        if (sub == s_scan) return run_scan(scan);
        if (sub == s_proto) return run_protocol(proto);
        if (sub == s_curves) return run_curves(curves);
        if (sub == s_verify) return run_verify(verify);
        if (sub == s_evolve) return run_evolve(evolve);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidTopology& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
