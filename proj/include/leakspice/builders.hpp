#pragma once

// Programmatic circuit builders: CMOS inverter and a representative
// 20-transistor class-AB unity-gain buffer.

#include <stdexcept>

#include "leakspice/netlist.hpp"

namespace leakspice {

inline DeviceInstance make_mosfet(std::string name, std::string d, std::string g,
                                  std::string s, std::string b, std::string model,
                                  double w, double l) {
    DeviceInstance dev;
    dev.name = std::move(name);
    dev.kind = DeviceKind::Mosfet;
    dev.nodes = {std::move(d), std::move(g), std::move(s), std::move(b)};
    dev.model = std::move(model);
    dev.w = w;
    dev.l = l;
    return dev;
}

inline DeviceInstance make_two_terminal(DeviceKind kind, std::string name,
                                        std::string n1, std::string n2,
                                        double value) {
    DeviceInstance dev;
    dev.name = std::move(name);
    dev.kind = kind;
    dev.nodes = {std::move(n1), std::move(n2)};
    dev.value = value;
    return dev;
}

inline void require_valid(const Netlist& nl, const char* what) {
    auto diags = validate(nl);
    if (!diags.empty())
        throw std::logic_error(std::string(what) + ": " + diags.front().message);
}

// Vdd supply, Vin source, PMOS pull-up, NMOS pull-down driving node "out".
inline Netlist build_inverter(const MosModelCard& model_n,
                              const MosModelCard& model_p, double vdd = 3.3,
                              double w_n = 1e-6, double l_n = 100e-9,
                              double w_p = 2e-6, double l_p = 100e-9,
                              double vin = 0.0) {
    if (!(vdd > 0.0)) throw std::domain_error("build_inverter: vdd must be > 0");
    Netlist nl;
    nl.title = "cmos inverter";
    nl.models.emplace(model_n.name, model_n);
    nl.models.emplace(model_p.name, model_p);
    nl.devices.push_back(
        make_two_terminal(DeviceKind::VSource, "vdd", "vdd", "0", vdd));
    nl.devices.push_back(
        make_two_terminal(DeviceKind::VSource, "vin", "in", "0", vin));
    nl.devices.push_back(
        make_mosfet("mp1", "out", "in", "vdd", "vdd", model_p.name, w_p, l_p));
    nl.devices.push_back(
        make_mosfet("mn1", "out", "in", "0", "0", model_n.name, w_n, l_n));
    require_valid(nl, "build_inverter");
    return nl;
}

// Representative class-AB unity-gain buffer: NMOS input pair (inverting input
// tied to the output), wide-swing PMOS mirror load, cascoded bias chains and
// a cascoded push-pull output branch. 9 PMOS (pq1-pq9), 11 NMOS (nq1-nq11),
// identical sizing throughout, bias set by a single current source ib.
// The exact interconnect is this project's stand-in; device count, naming,
// supply and bias current are the fixed contract.
inline Netlist build_class_ab_buffer(const MosModelCard& model_n,
                                     const MosModelCard& model_p,
                                     double vdd = 3.3, double ib = 10e-6,
                                     double w = 10e-6, double l = 1e-6,
                                     double c_load = 1e-12) {
    if (!(vdd > 0.0)) throw std::domain_error("build_class_ab_buffer: vdd must be > 0");
    if (!(ib > 0.0)) throw std::domain_error("build_class_ab_buffer: ib must be > 0");
    Netlist nl;
    nl.title = "class-ab super buffer";
    nl.models.emplace(model_n.name, model_n);
    nl.models.emplace(model_p.name, model_p);
    const std::string mn = model_n.name, mp = model_p.name;
    auto M = [&](std::string name, std::string d, std::string g, std::string s,
                 std::string b, const std::string& model) {
        nl.devices.push_back(make_mosfet(std::move(name), std::move(d),
                                         std::move(g), std::move(s),
                                         std::move(b), model, w, l));
    };
    nl.devices.push_back(
        make_two_terminal(DeviceKind::VSource, "vdd", "vdd", "0", vdd));
    nl.devices.push_back(
        make_two_terminal(DeviceKind::VSource, "vin", "in", "0", vdd / 2.0));
    // bias reference: ib pulls through the pq2 diode; its return is the
    // true ground rail so gating the footer cannot strand the source
    nl.devices.push_back(
        make_two_terminal(DeviceKind::ISource, "ib", "pb1", "0", ib));
    // pq1/nq1 buffer the input as an inverter; long channels keep the
    // half-rail shoot-through in the tens of microamps
    nl.devices.push_back(make_mosfet("pq1", "xinv", "in", "vdd", "vdd", mp,
                                     w / 10.0, l * 10.0));
    nl.devices.push_back(make_mosfet("nq1", "xinv", "in", "0", "0", mn,
                                     w / 10.0, l * 10.0));
    // PMOS bias diode plus mirror into the NMOS ladder
    M("pq2", "pb1", "pb1", "vdd", "vdd", mp);
    M("pq3", "nb2", "pb1", "vdd", "vdd", mp);
    M("nq2", "nb2", "nb2", "nb1", "0", mn);
    M("nq3", "nb1", "nb1", "0", "0", mn);
    // PMOS cascode bias pb2 (two-stack diode, cascoded NMOS sink)
    M("pq4", "pb2a", "pb2", "vdd", "vdd", mp);
    M("pq5", "pb2", "pb2", "pb2a", "vdd", mp);
    M("nq4", "pb2s", "nb1", "0", "0", mn);
    M("nq5", "pb2", "nb2", "pb2s", "0", mn);
    // cascoded tail for the input pair
    M("nq6", "tces", "nb1", "0", "0", mn);
    M("nq7", "tail", "nb2", "tces", "0", mn);
    // input pair; the feedback gate sits on the mirror's diode side so the
    // unity-gain loop is negative
    M("nq8", "n1", "out", "tail", "0", mn);
    M("nq9", "n2", "in", "tail", "0", mn);
    // PMOS mirror load (wide-swing diode on the reference side)
    M("pq6", "m1", "n1", "vdd", "vdd", mp);
    M("pq7", "n1", "pb2", "m1", "vdd", mp);
    M("pq8", "n2", "n1", "vdd", "vdd", mp);
    // output branch: PMOS common-source against a cascoded NMOS sink
    M("pq9", "out", "n2", "vdd", "vdd", mp);
    M("nq10", "osc", "nb1", "0", "0", mn);
    M("nq11", "out", "nb2", "osc", "0", mn);
    nl.devices.push_back(
        make_two_terminal(DeviceKind::Capacitor, "cl", "out", "0", c_load));
    require_valid(nl, "build_class_ab_buffer");
    return nl;
}

}  // namespace leakspice
