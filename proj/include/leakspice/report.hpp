#pragma once

// CSV and JSON emission of solver and leakage reports, with provenance
// comment lines / metadata (tool version, netlist hash, temperature).

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "leakspice/engine.hpp"
#include "leakspice/power.hpp"

namespace leakspice {

inline constexpr const char* tool_version = "leakspice 0.1.0";

struct ReportMeta {
    std::string netlist_hash;  // fnv1a of the canonical netlist text
    double temp_k = 300.0;
};

inline std::string fnv1a_hex(const std::string& text) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

inline ReportMeta make_meta(const Netlist& nl, double temp_k) {
    return {fnv1a_hex(serialize(nl)), temp_k};
}

// 9 significant digits, scientific
inline std::string format_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void csv_preamble(std::ostream& os, const ReportMeta& meta) {
    os << "# tool: " << tool_version << "\n";
    os << "# netlist: fnv1a:" << meta.netlist_hash << "\n";
    os << "# temp_k: " << format_sci(meta.temp_k) << "\n";
}

inline nlohmann::ordered_json json_meta(const ReportMeta& meta) {
    nlohmann::ordered_json j;
    j["tool"] = tool_version;
    j["netlist_hash"] = "fnv1a:" + meta.netlist_hash;
    j["temp_k"] = meta.temp_k;
    return j;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const OperatingPoint& op,
                      const ReportMeta& meta) {
    detail::csv_preamble(os, meta);
    os << "# iterations: " << op.iterations << "\n";
    os << "# converged: " << (op.converged ? "yes" : "no") << "\n";
    os << "name,value\n";
    for (const auto& [node, v] : op.node_voltages)
        os << detail::csv_field("v(" + node + ")") << "," << format_sci(v) << "\n";
    for (const auto& [src, i] : op.source_currents)
        os << detail::csv_field("i(" + src + ")") << "," << format_sci(i) << "\n";
}

inline void write_csv(std::ostream& os, const Waveform& wf,
                      const ReportMeta& meta) {
    detail::csv_preamble(os, meta);
    os << detail::csv_field(wf.abscissa_name);
    for (const auto& c : wf.columns) os << "," << detail::csv_field(c);
    os << "\n";
    for (size_t r = 0; r < wf.rows.size(); ++r) {
        os << format_sci(wf.abscissa[r]);
        for (double v : wf.rows[r]) os << "," << format_sci(v);
        os << "\n";
    }
}

inline void write_csv(std::ostream& os, const LeakageReport& rep,
                      const ReportMeta& meta) {
    detail::csv_preamble(os, meta);
    os << "# worst_state: " << rep.worst_state << "\n";
    os << "# mean_power_w: " << format_sci(rep.mean_power) << "\n";
    os << "state,inputs,supply_current_a,static_power_w\n";
    for (size_t s = 0; s < rep.states.size(); ++s) {
        const auto& st = rep.states[s];
        std::string inputs;
        for (const auto& [name, v] : st.input_assignment) {
            if (!inputs.empty()) inputs += ";";
            inputs += name + "=" + format_spice_number(v);
        }
        os << s << "," << detail::csv_field(inputs) << ","
           << format_sci(st.supply_current) << ","
           << format_sci(st.static_power) << "\n";
    }
}

inline void write_csv(std::ostream& os, const GatingComparison& cmp,
                      const ReportMeta& meta) {
    detail::csv_preamble(os, meta);
    os << "# standby_reduction_factor: "
       << format_sci(cmp.standby_reduction_factor) << "\n";
    os << "# active_penalty_factor: " << format_sci(cmp.active_penalty_factor)
       << "\n";
    os << "report,state,supply_current_a,static_power_w\n";
    auto rows = [&](const char* label, const LeakageReport& rep) {
        for (size_t s = 0; s < rep.states.size(); ++s)
            os << label << "," << s << ","
               << format_sci(rep.states[s].supply_current) << ","
               << format_sci(rep.states[s].static_power) << "\n";
    };
    rows("baseline", cmp.baseline);
    rows("gated_active", cmp.gated_active);
    rows("gated_standby", cmp.gated_standby);
}

inline nlohmann::ordered_json to_json(const OperatingPoint& op,
                                      const ReportMeta& meta) {
    nlohmann::ordered_json j;
    j["metadata"] = detail::json_meta(meta);
    j["node_voltages"] = nlohmann::ordered_json::object();
    for (const auto& [node, v] : op.node_voltages) j["node_voltages"][node] = v;
    j["source_currents"] = nlohmann::ordered_json::object();
    for (const auto& [src, i] : op.source_currents) j["source_currents"][src] = i;
    j["iterations"] = op.iterations;
    j["residual_norm"] = op.residual_norm;
    j["converged"] = op.converged;
    return j;
}

inline nlohmann::ordered_json to_json(const Waveform& wf,
                                      const ReportMeta& meta) {
    nlohmann::ordered_json j;
    j["metadata"] = detail::json_meta(meta);
    j["abscissa_name"] = wf.abscissa_name;
    j["columns"] = wf.columns;
    j["abscissa"] = wf.abscissa;
    j["rows"] = wf.rows;
    return j;
}

inline nlohmann::ordered_json to_json(const LeakageReport& rep,
                                      const ReportMeta& meta) {
    nlohmann::ordered_json j;
    j["metadata"] = detail::json_meta(meta);
    j["temp_k"] = rep.temp_k;
    j["states"] = nlohmann::ordered_json::array();
    for (const auto& st : rep.states) {
        nlohmann::ordered_json s;
        s["inputs"] = nlohmann::ordered_json::object();
        for (const auto& [name, v] : st.input_assignment) s["inputs"][name] = v;
        s["supply_current_a"] = st.supply_current;
        s["static_power_w"] = st.static_power;
        s["per_device_a"] = nlohmann::ordered_json::object();
        for (const auto& [name, i] : st.per_device) s["per_device_a"][name] = i;
        j["states"].push_back(std::move(s));
    }
    j["worst_state"] = rep.worst_state;
    j["mean_power_w"] = rep.mean_power;
    return j;
}

inline nlohmann::ordered_json to_json(const GatingComparison& cmp,
                                      const ReportMeta& meta) {
    nlohmann::ordered_json j;
    j["metadata"] = detail::json_meta(meta);
    j["baseline"] = to_json(cmp.baseline, meta);
    j["gated_active"] = to_json(cmp.gated_active, meta);
    j["gated_standby"] = to_json(cmp.gated_standby, meta);
    j["standby_reduction_factor"] = cmp.standby_reduction_factor;
    j["active_penalty_factor"] = cmp.active_penalty_factor;
    return j;
}

}  // namespace leakspice
