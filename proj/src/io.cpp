#include "spinnet/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace spinnet::io {

std::string format_number(double x) {
    char buf[48];
    if (x == 0.0) return "0";
    if (std::abs(x) < 1e-4)
        std::snprintf(buf, sizeof(buf), "%.12e", x);
    else
        std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string surface_csv(const TransmissionSurface& surf) {
    std::ostringstream os;
    os << "# energies in units of J_perp, times in 1/J_perp; packet alpha = "
       << format_number(surf.packet_alpha) << "\n";
    os << "h,Jz,T,re_t,im_t,r_sq,leakage,ok\n";
    for (const auto& pt : surf.points) {
        os << format_number(pt.h) << ',' << format_number(pt.Jz);
        if (pt.ok) {
            os << ',' << format_number(pt.amps.T_joint) << ',' << format_number(pt.amps.t.real())
               << ',' << format_number(pt.amps.t.imag()) << ','
               << format_number(std::norm(pt.amps.r)) << ',' << format_number(pt.amps.leakage)
               << ",1\n";
        } else {
            os << ",,,,,,0\n";
        }
    }
    return os.str();
}

json surface_summary(const TransmissionSurface& surf) {
    json j;
    j["units"] = "energies in J_perp";
    j["packet_alpha"] = surf.packet_alpha;
    std::size_t failures = 0;
    for (const auto& pt : surf.points)
        if (!pt.ok) ++failures;
    j["points"] = surf.points.size();
    j["failures"] = failures;

    json table = json::array();
    for (std::size_t ij = 0; ij < surf.jz_values.size(); ++ij) {
        double best_t = -1.0, best_h = 0.0;
        for (std::size_t ih = 0; ih < surf.h_values.size(); ++ih) {
            const auto& pt = surf.at(ih, ij);
            if (pt.ok && pt.amps.T_joint > best_t) {
                best_t = pt.amps.T_joint;
                best_h = pt.h;
            }
        }
        if (best_t >= 0.0)
            table.push_back({{"Jz", surf.jz_values[ij]}, {"argmax_h", best_h}, {"T", best_t}});
    }
    j["resonance_line"] = table;
    return j;
}

std::string curves_csv(const std::vector<CurveRow>& rows) {
    std::ostringstream os;
    os << "# probabilities dimensionless; t = sqrt(T) taken real positive\n";
    os << "T,n,P_GHZ,P_W\n";
    for (const auto& r : rows)
        os << format_number(r.T) << ',' << r.n << ',' << format_number(r.p_ghz) << ','
           << format_number(r.p_w) << "\n";
    return os.str();
}

json outcome_json(const ProtocolOutcome& outcome) {
    json j;
    j["success_probability"] = outcome.success_probability;
    j["fidelity_to_target"] = outcome.fidelity_to_target;
    j["t_used"] = {{"re", outcome.t_used.real()}, {"im", outcome.t_used.imag()}};
    j["t_convention"] =
        "overlap with the freely propagated reference advanced one site per DD passage";
    j["notes"] = outcome.notes;
    json ledger = json::array();
    double total = 0.0;
    for (const auto& b : outcome.ledger) {
        ledger.push_back({{"branch", b.branch},
                          {"register", b.register_state},
                          {"re_amp", b.amp.real()},
                          {"im_amp", b.amp.imag()},
                          {"prob", b.prob}});
        total += b.prob;
    }
    j["ledger"] = ledger;
    j["ledger_total"] = total;
    return j;
}

json verification_json(const NodeVerification& rep) {
    json j;
    j["input_port"] = rep.input_port;
    j["max_prob_deviation"] = rep.max_prob_deviation;
    j["max_amp_deviation"] = rep.max_amp_deviation;
    j["notes"] = rep.notes;
    json ports = json::array();
    for (const auto& p : rep.ports)
        ports.push_back({{"port", p.label},
                         {"predicted_prob", p.predicted_prob},
                         {"measured_prob", p.measured_prob},
                         {"predicted_re", p.predicted_amp.real()},
                         {"predicted_im", p.predicted_amp.imag()},
                         {"measured_re", p.measured_amp.real()},
                         {"measured_im", p.measured_amp.imag()}});
    j["ports"] = ports;
    return j;
}

std::string verification_table(const NodeVerification& rep) {
    std::ostringstream os;
    os << "input port " << rep.input_port << "\n";
    os << "port          P(pred)     P(meas)     amp(pred)            amp(meas)\n";
    char line[160];
    for (const auto& p : rep.ports) {
        std::snprintf(line, sizeof(line), "%-12s  %.6f    %.6f    %+.4f%+.4fi    %+.4f%+.4fi\n",
                      p.label.c_str(), p.predicted_prob, p.measured_prob, p.predicted_amp.real(),
                      p.predicted_amp.imag(), p.measured_amp.real(), p.measured_amp.imag());
        os << line;
    }
    if (!rep.notes.empty()) os << "note: " << rep.notes << "\n";
    return os.str();
}

json network_json(const SpinNetwork& net) {
    json j;
    j["n_sites"] = net.n_sites();
    json bonds = json::array();
    for (const auto& b : net.bonds()) bonds.push_back({b.i, b.j, b.J_perp, b.Jz});
    j["bonds"] = bonds;
    json fields = json::array();
    for (int s = 0; s < net.n_sites(); ++s)
        if (net.fields()[s] != 0.0) fields.push_back({s, net.fields()[s]});
    j["fields"] = fields;
    json dds = json::array();
    for (const auto& dd : net.dd_qubits())
        dds.push_back({{"d", dd.d}, {"Jz", dd.Jz}, {"h", dd.h}});
    j["dd_qubits"] = dds;
    json regions;
    for (const auto& [name, sites] : net.regions()) regions[name] = sites;
    j["regions"] = regions;
    return j;
}

SpinNetwork network_from_json(const json& j) {
    try {
        const int n = j.at("n_sites").get<int>();
        std::vector<Bond> bonds;
        for (const auto& b : j.at("bonds"))
            bonds.push_back({b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<double>(),
                             b.at(3).get<double>()});
        std::vector<double> fields(n, 0.0);
        if (j.contains("fields"))
            for (const auto& f : j.at("fields")) fields.at(f.at(0).get<int>()) = f.at(1).get<double>();
        std::vector<DDQubitSpec> dds;
        if (j.contains("dd_qubits"))
            for (const auto& d : j.at("dd_qubits")) {
                const int site = d.at("d").get<int>();
                dds.push_back({site, site + 1, d.at("Jz").get<double>(), d.at("h").get<double>()});
            }
        std::map<std::string, std::vector<int>> regions;
        if (j.contains("regions"))
            for (const auto& [name, sites] : j.at("regions").items())
                regions[name] = sites.get<std::vector<int>>();
        return SpinNetwork(n, std::move(bonds), std::move(fields), std::move(dds),
                           std::move(regions));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed network file: ") + e.what());
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << content;
}

}  // namespace spinnet::io
