#pragma once

#include <string>

#include "spinnet/protocol.hpp"

#include "json.hpp"

namespace spinnet::io {

using json = nlohmann::ordered_json;

// CSV number format: '.' decimal separator, scientific for |x| < 1e-4.
std::string format_number(double x);

// h, Jz, T, Re t, Im t, |r|^2, leakage rows; units stated in the header.
std::string surface_csv(const TransmissionSurface& surf);
// Per-Jz argmax table of the resonance line.
json surface_summary(const TransmissionSurface& surf);

std::string curves_csv(const std::vector<CurveRow>& rows);

json outcome_json(const ProtocolOutcome& outcome);
json verification_json(const NodeVerification& rep);
std::string verification_table(const NodeVerification& rep);

json network_json(const SpinNetwork& net);
SpinNetwork network_from_json(const json& j);

void write_file(const std::string& path, const std::string& content);

}  // namespace spinnet::io
