#pragma once

#include <string>

#include "spinnet/dynamics.hpp"

namespace spinnet {

// Result of a single packet/DD collision. t and r are complex overlap
// amplitudes against reference packets: the transmitted reference is the
// freely propagated packet advanced by one lattice site (the resonant
// forward shift), the reflected one its mirror image about the blocked site
// d. Both carry the dressed channel baseline correction so that their
// phases are propagation-relative. T_joint / R_joint are the projector
// probabilities of (mobile right of DD, DD switched) and (mobile left,
// DD kept); leakage is the norm fraction the two references do not capture.
struct ScatteringAmplitudes {
    Complex t{0.0, 0.0};
    Complex r{0.0, 0.0};
    Complex cross_t{0.0, 0.0};  // transmitted without switching the register
    Complex cross_r{0.0, 0.0};  // reflected with a switched register
    double T_joint = 0.0;
    double R_joint = 0.0;
    double leakage = 0.0;     // 1 - |t|^2 - |r|^2
    double unassigned = 0.0;  // 1 - T_joint - R_joint
    double t_final = 0.0;
    std::string shift_convention;
};

struct ScanPoint {
    double h = 0.0;
    double Jz = 0.0;
    ScatteringAmplitudes amps;
    bool ok = false;
    std::string error;
};

// T(h, Jz) surface on a rectangular grid, in units of J_perp.
struct TransmissionSurface {
    std::vector<double> h_values;
    std::vector<double> jz_values;
    std::vector<ScanPoint> points;  // row-major over (h, jz)
    double packet_alpha = 0.0;

    const ScanPoint& at(std::size_t ih, std::size_t ij) const {
        return points[ih * jz_values.size() + ij];
    }
};

// Geometry used by scans and switch-fidelity runs: a uniform chain with one
// DD embedded, packet incident from the left.
struct ScanGeometry {
    int chain_len = 240;
    int dd_pos = 119;           // DD occupies sites (dd_pos, dd_pos + 1)
    double packet_center = 69.0;
    double packet_alpha = 4.0 / 15.0;
    double t_final = 0.0;       // <= 0: derived from the transit distance
};

// Scatter a packet off the single DD qubit of `net`. dd_state selects the
// initial register state. Throws SeparationError if the mobile flip still
// overlaps the DD neighbourhood at t_final.
ScatteringAmplitudes scatter_off_dd(const SpinNetwork& net, const PacketSpec& packet,
                                    int dd_state, double t_final);

// Probability that the DD ends in |1> jointly with transmission (the switch
// and the transmission are the same event in the confinement regime).
double dd_switch_fidelity(const SpinNetwork& net, const PacketSpec& packet, double t_final);

// Full T(h, Jz) map; per-point failures are recorded and the scan continues.
TransmissionSurface transmission_scan(const std::vector<double>& h_values,
                                      const std::vector<double>& jz_values,
                                      const ScanGeometry& geom, int workers = 1);

// Helper shared by scans and the acceptance suite.
SpinNetwork scan_network(const ScanGeometry& geom, double h, double Jz);
PacketSpec scan_packet(const ScanGeometry& geom, const SpinNetwork& net);
double scan_time(const ScanGeometry& geom);

}  // namespace spinnet
