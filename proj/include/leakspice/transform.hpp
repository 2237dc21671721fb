#pragma once

// Transistor-gating (sleep transistor) netlist transform: splits a supply
// or ground rail with a series sleep device plus a gate-control source.

#include <stdexcept>
#include <string>

#include "leakspice/builders.hpp"

namespace leakspice {

enum class GateStyle { Footer, Header };
enum class SleepState { Active, Standby };

struct GateOptions {
    GateStyle style = GateStyle::Footer;
    std::string sleep_model;       // must name a model card in the netlist
    double w = 0.0;                // 0 -> 10x widest rail device
    double l = 0.0;                // 0 -> minimum L in the netlist
    SleepState state = SleepState::Standby;
    bool allow_regate = false;     // default: second transform is an error
};

struct TransformError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Positive node and value of the strongest DC voltage source.
inline const DeviceInstance* find_supply(const Netlist& nl) {
    const DeviceInstance* best = nullptr;
    for (const auto& d : nl.devices) {
        if (d.kind != DeviceKind::VSource || d.has_pwl()) continue;
        if (!best || d.value > best->value) best = &d;
    }
    return best;
}

}  // namespace detail

inline Netlist power_gate_transform(const Netlist& input, const GateOptions& opt) {
    Netlist nl = input;  // original stays untouched

    const bool footer = opt.style == GateStyle::Footer;
    const std::string virt = footer ? "vgnd" : "vvdd";
    if (!opt.allow_regate) {
        if (nl.find_device("msleep"))
            throw TransformError("netlist is already gated");
        for (const auto& n : nl.node_names())
            if (n == virt) throw TransformError("netlist is already gated");
    }

    auto model_it = nl.models.find(to_lower(opt.sleep_model));
    if (model_it == nl.models.end())
        throw TransformError("unknown sleep model '" + opt.sleep_model + "'");
    const MosModelCard& sleep_card = model_it->second;
    if (footer && sleep_card.polarity != Polarity::Nmos)
        throw TransformError("footer sleep transistor must be NMOS");
    if (!footer && sleep_card.polarity != Polarity::Pmos)
        throw TransformError("header sleep transistor must be PMOS");

    const DeviceInstance* supply = detail::find_supply(nl);
    if (!supply)
        throw TransformError("no DC supply source found");
    const double vdd = supply->value;
    const std::string rail = footer ? "0" : supply->nodes[0];

    // Rewire rail-connected passives and MOSFETs through the virtual rail;
    // sources keep their true-rail reference.
    double w_max = 0.0, l_min = 0.0;
    bool rewired = false;
    for (auto& d : nl.devices) {
        if (d.kind == DeviceKind::VSource || d.kind == DeviceKind::ISource)
            continue;
        bool on_rail = false;
        for (auto& n : d.nodes) {
            if (n == rail) {
                n = virt;
                on_rail = true;
            }
        }
        if (on_rail) {
            rewired = true;
            if (d.kind == DeviceKind::Mosfet) w_max = std::max(w_max, d.w);
        }
        if (d.kind == DeviceKind::Mosfet)
            l_min = l_min == 0.0 ? d.l : std::min(l_min, d.l);
    }
    if (!rewired)
        throw TransformError("no devices found on the " +
                             std::string(footer ? "ground" : "supply") + " rail");

    double w = opt.w > 0.0 ? opt.w : (w_max > 0.0 ? 10.0 * w_max : 1e-6);
    double l = opt.l > 0.0 ? opt.l : (l_min > 0.0 ? l_min : 1e-6);

    if (footer) {
        nl.devices.push_back(make_mosfet("msleep", virt, "slpctl", "0", "0",
                                         sleep_card.name, w, l));
    } else {
        nl.devices.push_back(make_mosfet("msleep", virt, "slpctl", rail, rail,
                                         sleep_card.name, w, l));
    }
    // Gate drive: ON in ACTIVE, OFF in STANDBY.
    const bool active = opt.state == SleepState::Active;
    const double ctl = footer ? (active ? vdd : 0.0) : (active ? 0.0 : vdd);
    nl.devices.push_back(
        make_two_terminal(DeviceKind::VSource, "vslp", "slpctl", "0", ctl));

    auto diags = validate(nl);
    if (!diags.empty())
        throw TransformError("gated netlist invalid: " + diags.front().message);
    return nl;
}

}  // namespace leakspice
