#pragma once

// Static leakage reporting over all digital input states, and before/after
// evaluation of the transistor-gating transform.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "leakspice/engine.hpp"
#include "leakspice/transform.hpp"

namespace leakspice {

struct LeakageState {
    std::map<std::string, double> input_assignment;  // source -> V
    double supply_current = 0.0;                     // A
    double static_power = 0.0;                       // W
    std::map<std::string, double> per_device;        // A drawn from supply rail
};

struct LeakageReport {
    std::vector<LeakageState> states;
    double temp_k = 300.0;
    size_t worst_state = 0;
    double mean_power = 0.0;
};

struct GatingComparison {
    LeakageReport baseline;
    LeakageReport gated_active;
    LeakageReport gated_standby;
    double standby_reduction_factor = 0.0;  // baseline / standby
    double active_penalty_factor = 0.0;     // active / baseline
};

// alpha * C * Vdd^2 * f
inline double dynamic_power_estimate(double c_load, double vdd, double freq,
                                     double activity) {
    if (c_load < 0.0 || vdd < 0.0 || freq < 0.0 || activity < 0.0 ||
        activity > 1.0)
        throw std::domain_error("dynamic_power_estimate: parameter out of range");
    return activity * c_load * vdd * vdd * freq;
}

inline double static_vs_dynamic_share(const LeakageReport& leakage,
                                      double dynamic_w) {
    if (dynamic_w < 0.0)
        throw std::domain_error("static_vs_dynamic_share: dynamic power < 0");
    double total = leakage.mean_power + dynamic_w;
    if (total == 0.0)
        throw std::domain_error("static_vs_dynamic_share: both powers are zero");
    return leakage.mean_power / total;
}

namespace detail {

// Current flowing from `node` into device `dev` at the solved point.
inline double current_into_device(const Netlist& nl, const DeviceInstance& dev,
                                  const std::string& node,
                                  const OperatingPoint& op, double temp_k) {
    auto v = [&](const std::string& n) -> double {
        if (n == "0") return 0.0;
        auto it = op.node_voltages.find(n);
        return it == op.node_voltages.end() ? 0.0 : it->second;
    };
    double total = 0.0;
    switch (dev.kind) {
        case DeviceKind::Resistor: {
            if (dev.nodes[0] == node) total += (v(node) - v(dev.nodes[1])) / dev.value;
            if (dev.nodes[1] == node) total += (v(node) - v(dev.nodes[0])) / dev.value;
            break;
        }
        case DeviceKind::Capacitor:
            break;  // open at DC
        case DeviceKind::Mosfet: {
            const MosModelCard& card = nl.models.at(dev.model);
            double vd = v(dev.nodes[0]), vg = v(dev.nodes[1]), vs = v(dev.nodes[2]),
                   vb = v(dev.nodes[3]);
            DeviceEval ev = ids_unified(card, dev.w, dev.l, {vg - vs, vd - vs, temp_k});
            double sgn = card.polarity == Polarity::Nmos ? 1.0 : -1.0;
            double jd = 0.0, js = 0.0;
            if (card.is_junction > 0.0) {
                double vt = thermal_voltage(temp_k);
                jd = sgn * junction_eval(card.is_junction, sgn * (vd - vb), vt).i;
                js = sgn * junction_eval(card.is_junction, sgn * (vs - vb), vt).i;
            }
            if (dev.nodes[0] == node) total += ev.ids + jd;   // drain
            if (dev.nodes[2] == node) total += -ev.ids + js;  // source
            if (dev.nodes[3] == node) total += -(jd + js);    // body
            break;  // gate carries no DC current
        }
        default:
            break;  // sources handled separately
    }
    return total;
}

}  // namespace detail

// Solves DC at every 2^n digital input state (inputs driven to 0 or Vdd)
// and records supply current, static power and the per-device breakdown of
// current drawn from the supply rail.
inline LeakageReport leakage_report(const Netlist& input,
                                    const std::vector<std::string>& input_sources,
                                    double temp_k = 300.0) {
    if (input_sources.size() > 10)
        throw std::domain_error("leakage_report: at most 10 input sources");
    Netlist nl = input;
    std::vector<DeviceInstance*> inputs;
    for (const auto& name : input_sources) {
        DeviceInstance* d = nl.find_device(to_lower(name));
        if (!d || d->kind != DeviceKind::VSource)
            throw std::domain_error("leakage_report: unknown input source '" +
                                    name + "'");
        inputs.push_back(d);
    }
    // supplies: DC voltage sources that are not inputs
    std::vector<const DeviceInstance*> supplies;
    double vdd = 0.0;
    for (const auto& d : nl.devices) {
        if (d.kind != DeviceKind::VSource || d.has_pwl()) continue;
        bool is_input = false;
        for (const auto* in : inputs) is_input |= (in->name == d.name);
        if (!is_input && d.value != 0.0) {
            supplies.push_back(&d);
            vdd = std::max(vdd, d.value);
        }
    }

    LeakageReport report;
    report.temp_k = temp_k;
    const size_t n_states = size_t{1} << input_sources.size();
    for (size_t s = 0; s < n_states; ++s) {
        LeakageState state;
        for (size_t i = 0; i < inputs.size(); ++i) {
            double level = ((s >> i) & 1u) ? vdd : 0.0;
            inputs[i]->value = level;
            state.input_assignment[inputs[i]->name] = level;
        }
        OperatingPoint op;
        try {
            op = dc_operating_point(nl, temp_k);
        } catch (const SolveError& e) {
            throw SolveError("leakage state " + std::to_string(s) + ": " +
                                 e.what(),
                             e.best_residual);
        }
        for (const auto* sup : supplies) {
            double delivered = op.source_currents.at(sup->name);
            state.supply_current += delivered;
            state.static_power += sup->value * delivered;
            const std::string& rail = sup->nodes[0];
            for (const auto& d : nl.devices) {
                if (d.kind == DeviceKind::VSource || d.kind == DeviceKind::ISource)
                    continue;
                bool touches = false;
                for (const auto& n : d.nodes) touches |= (n == rail);
                if (!touches) continue;
                state.per_device[d.name] +=
                    detail::current_into_device(nl, d, rail, op, temp_k);
            }
        }
        report.states.push_back(std::move(state));
    }
    for (size_t s = 0; s < report.states.size(); ++s) {
        report.mean_power += report.states[s].static_power;
        if (report.states[s].static_power >
            report.states[report.worst_state].static_power)
            report.worst_state = s;
    }
    report.mean_power /= (double)report.states.size();
    return report;
}

inline GatingComparison compare_gating(const Netlist& nl, GateOptions options,
                                       const std::vector<std::string>& input_sources,
                                       double temp_k = 300.0) {
    GatingComparison cmp;
    cmp.baseline = leakage_report(nl, input_sources, temp_k);
    options.state = SleepState::Active;
    cmp.gated_active =
        leakage_report(power_gate_transform(nl, options), input_sources, temp_k);
    options.state = SleepState::Standby;
    cmp.gated_standby =
        leakage_report(power_gate_transform(nl, options), input_sources, temp_k);
    cmp.standby_reduction_factor =
        cmp.baseline.mean_power / cmp.gated_standby.mean_power;
    cmp.active_penalty_factor =
        cmp.gated_active.mean_power / cmp.baseline.mean_power;
    return cmp;
}

}  // namespace leakspice
