#pragma once

/// SPICE-subset netlist: domain types, total parser (never throws on bad
// input, collects diagnostics), canonical serializer, validation.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "leakspice/devmodel.hpp"

namespace leakspice {

enum class DeviceKind { Mosfet, Resistor, Capacitor, VSource, ISource };

struct PwlPoint {
    double t = 0.0;
    double v = 0.0;
    friend bool operator==(const PwlPoint&, const PwlPoint&) = default;
};

struct DeviceInstance {
    std::string name;  // lowercase, first letter encodes kind
    DeviceKind kind = DeviceKind::Resistor;
    std::vector<std::string> nodes;  // MOSFET: d g s b; otherwise n+ n-
    std::string model;               // MOSFET only
    double w = 0.0, l = 0.0;         // MOSFET only, meters
    double value = 0.0;              // ohms / farads / DC volts / DC amps
    std::vector<PwlPoint> pwl;       // sources only, overrides value if set
    int src_line = 0;                // 0 for built netlists

    bool has_pwl() const { return !pwl.empty(); }
    friend bool operator==(const DeviceInstance& a, const DeviceInstance& b) {
        return a.name == b.name && a.kind == b.kind && a.nodes == b.nodes &&
               a.model == b.model && a.w == b.w && a.l == b.l &&
               a.value == b.value && a.pwl == b.pwl;
    }
};

struct AnalysisDirective {
    enum class Kind { Op, DcSweep, Tran };
    Kind kind = Kind::Op;
    double temp_k = 300.0;
    std::string source;  // DcSweep
    double start = 0.0, stop = 0.0, step = 0.0;  // DcSweep
    double dt = 0.0, tstop = 0.0;                // Tran
    friend bool operator==(const AnalysisDirective&,
                           const AnalysisDirective&) = default;
};

struct Diagnostic {
    int line = 0;
    int col = 0;
    std::string message;
};

inline bool operator==(const MosModelCard& a, const MosModelCard& b) {
    return a.name == b.name && a.polarity == b.polarity && a.vth0 == b.vth0 &&
           a.eta == b.eta && a.eta_derived == b.eta_derived && a.tox == b.tox &&
           a.wdm == b.wdm && a.u0cox == b.u0cox && a.kp == b.kp &&
           a.lambda == b.lambda && a.sigma_dibl == b.sigma_dibl &&
           a.is_junction == b.is_junction;
}

struct Netlist {
    std::string title;
    std::vector<DeviceInstance> devices;
    std::map<std::string, MosModelCard> models;  // keyed by lowercase name
    std::vector<AnalysisDirective> directives;

    std::vector<std::string> node_names() const {
        std::set<std::string> s;
        for (const auto& d : devices)
            for (const auto& n : d.nodes) s.insert(n);
        return {s.begin(), s.end()};
    }
    const DeviceInstance* find_device(std::string_view name) const {
        for (const auto& d : devices)
            if (d.name == name) return &d;
        return nullptr;
    }
    DeviceInstance* find_device(std::string_view name) {
        for (auto& d : devices)
            if (d.name == name) return &d;
        return nullptr;
    }
    friend bool operator==(const Netlist&, const Netlist&) = default;
};

struct ParseResult {
    std::optional<Netlist> netlist;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return netlist.has_value(); }
};

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Engineering-suffix number: 1k, 45n, 3meg, 1e-6, ...
inline std::optional<double> parse_spice_number(std::string_view tok) {
    if (tok.empty()) return std::nullopt;
    std::string s = to_lower(tok);
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) return std::nullopt;
    std::string_view suffix(end);
    if (suffix.empty()) return v;
    if (suffix == "meg") return v * 1e6;
    if (suffix.size() == 1) {
        switch (suffix[0]) {
            case 'f': return v * 1e-15;
            case 'p': return v * 1e-12;
            case 'n': return v * 1e-9;
            case 'u': return v * 1e-6;
            case 'm': return v * 1e-3;
            case 'k': return v * 1e3;
            case 'g': return v * 1e9;
            default: break;
        }
    }
    return std::nullopt;
}

inline std::string format_spice_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Structural checks shared by the parser and the builders.
inline std::vector<Diagnostic> validate(const Netlist& nl) {
    std::vector<Diagnostic> diags;
    auto err = [&](int line, const std::string& msg) {
        diags.push_back({line, 0, msg});
    };
    std::set<std::string> names;
    bool has_ground = false;
    for (const auto& d : nl.devices) {
        if (!names.insert(d.name).second)
            err(d.src_line, "duplicate device name '" + d.name + "'");
        for (const auto& n : d.nodes)
            if (n == "0") has_ground = true;
        switch (d.kind) {
            case DeviceKind::Mosfet:
                if (nl.models.find(d.model) == nl.models.end())
                    err(d.src_line, "unknown model '" + d.model + "'");
                if (!(d.w > 0.0) || !(d.l > 0.0))
                    err(d.src_line, "device '" + d.name + "': W and L must be > 0");
                break;
            case DeviceKind::Resistor:
                if (!(d.value > 0.0))
                    err(d.src_line, "device '" + d.name + "': resistance must be > 0");
                break;
            case DeviceKind::Capacitor:
                if (!(d.value > 0.0))
                    err(d.src_line, "device '" + d.name + "': capacitance must be > 0");
                break;
            default:
                break;
        }
    }
    if (!nl.devices.empty() && !has_ground)
        err(0, "no ground node '0' in netlist");
    for (const auto& [key, card] : nl.models) {
        try {
            card.validate();
        } catch (const std::exception& e) {
            err(0, e.what());
        }
        if (card.eta_derived) {
            double want = body_coefficient(card.tox, card.wdm);
            if (card.eta != want)
                err(0, "model " + key + ": derived eta mismatch");
        }
    }
    for (const auto& dir : nl.directives) {
        using K = AnalysisDirective::Kind;
        if (!(dir.temp_k > 0.0)) err(0, "directive: temp must be > 0 K");
        if (dir.kind == K::DcSweep) {
            if (!(dir.step > 0.0) || dir.start > dir.stop)
                err(0, ".dc: need step > 0 and start <= stop");
            bool found = false;
            for (const auto& d : nl.devices)
                if (d.name == dir.source &&
                    (d.kind == DeviceKind::VSource || d.kind == DeviceKind::ISource))
                    found = true;
            if (!found) err(0, ".dc: unknown source '" + dir.source + "'");
        } else if (dir.kind == K::Tran) {
            if (!(dir.dt > 0.0) || dir.tstop < dir.dt)
                err(0, ".tran: need dt > 0 and tstop >= dt");
        }
    }
    return diags;
}

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> toks;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace((unsigned char)line[i])) ++i;
        size_t j = i;
        while (j < line.size() && !std::isspace((unsigned char)line[j])) ++j;
        if (j > i) toks.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return toks;
}

struct LineParser {
    Netlist nl;
    std::vector<Diagnostic> diags;

    void error(int line, const std::string& msg) {
        diags.push_back({line, 0, msg});
    }

    std::optional<double> num(const std::string& tok, int line,
                              const std::string& what) {
        auto v = parse_spice_number(tok);
        if (!v) error(line, "bad " + what + " value '" + tok + "'");
        return v;
    }

    void parse_device(const std::vector<std::string>& t, int line,
                      const std::string& raw_rest) {
        DeviceInstance d;
        d.name = to_lower(t[0]);
        d.src_line = line;
        char c = d.name[0];
        if (c == 'm' || c == 'n' || c == 'p') {
            if (t.size() < 8) {
                error(line, "MOSFET line needs: Mname d g s b model W= L=");
                return;
            }
            d.kind = DeviceKind::Mosfet;
            for (int i = 1; i <= 4; ++i) d.nodes.push_back(to_lower(t[i]));
            d.model = to_lower(t[5]);
            for (size_t i = 6; i < t.size(); ++i) {
                std::string kv = to_lower(t[i]);
                auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    error(line, "expected key=value, got '" + t[i] + "'");
                    continue;
                }
                std::string key = kv.substr(0, eq);
                auto v = num(kv.substr(eq + 1), line, key);
                if (!v) continue;
                if (key == "w") d.w = *v;
                else if (key == "l") d.l = *v;
                else error(line, "unknown MOSFET parameter '" + key + "'");
            }
        } else if (c == 'r' || c == 'c') {
            if (t.size() != 4) {
                error(line, "two-terminal line needs: name n1 n2 value");
                return;
            }
            d.kind = c == 'r' ? DeviceKind::Resistor : DeviceKind::Capacitor;
            d.nodes = {to_lower(t[1]), to_lower(t[2])};
            auto v = num(t[3], line, c == 'r' ? "resistance" : "capacitance");
            if (!v) return;
            d.value = *v;
        } else if (c == 'v' || c == 'i') {
            if (t.size() < 4) {
                error(line, "source line needs: name n+ n- value|PWL(...)");
                return;
            }
            d.kind = c == 'v' ? DeviceKind::VSource : DeviceKind::ISource;
            d.nodes = {to_lower(t[1]), to_lower(t[2])};
            // everything after the nodes, re-joined so PWL(...) may contain spaces
            std::string rest = to_lower(raw_rest);
            if (rest.rfind("pwl", 0) == 0) {
                auto open = rest.find('(');
                auto close = rest.rfind(')');
                if (open == std::string::npos || close == std::string::npos ||
                    close < open) {
                    error(line, "malformed PWL specification");
                    return;
                }
                auto vals = split_ws(rest.substr(open + 1, close - open - 1));
                if (vals.size() < 2 || vals.size() % 2 != 0) {
                    error(line, "PWL needs an even number of t/v values");
                    return;
                }
                double prev_t = -1.0;
                for (size_t i = 0; i < vals.size(); i += 2) {
                    auto tv = num(vals[i], line, "PWL time");
                    auto vv = num(vals[i + 1], line, "PWL value");
                    if (!tv || !vv) return;
                    if (*tv <= prev_t) {
                        error(line, "PWL times must be strictly increasing");
                        return;
                    }
                    prev_t = *tv;
                    d.pwl.push_back({*tv, *vv});
                }
                d.value = d.pwl.front().v;
            } else {
                if (t.size() != 4) {
                    error(line, "source line needs a single DC value");
                    return;
                }
                auto v = num(t[3], line, "source");
                if (!v) return;
                d.value = *v;
            }
        } else {
            error(line, "unknown device type '" + std::string(1, c) + "'");
            return;
        }
        nl.devices.push_back(std::move(d));
    }

    void parse_model(const std::vector<std::string>& t, int line) {
        if (t.size() < 3) {
            error(line, ".model needs: .model name NMOS|PMOS key=val ...");
            return;
        }
        MosModelCard card;
        card.name = to_lower(t[1]);
        std::string type = to_lower(t[2]);
        if (type == "nmos") card.polarity = Polarity::Nmos;
        else if (type == "pmos") card.polarity = Polarity::Pmos;
        else {
            error(line, "model type must be NMOS or PMOS, got '" + t[2] + "'");
            return;
        }
        for (size_t i = 3; i < t.size(); ++i) {
            std::string kv = to_lower(t[i]);
            auto eq = kv.find('=');
            if (eq == std::string::npos) {
                error(line, "expected key=value, got '" + t[i] + "'");
                continue;
            }
            std::string key = kv.substr(0, eq);
            std::string val = kv.substr(eq + 1);
            if (key == "eta" && val == "derived") {
                card.eta_derived = true;
                continue;
            }
            auto v = num(val, line, key);
            if (!v) continue;
            if (key == "vth0") card.vth0 = *v;
            else if (key == "eta") card.eta = *v;
            else if (key == "tox") card.tox = *v;
            else if (key == "wdm") card.wdm = *v;
            else if (key == "u0cox") card.u0cox = *v;
            else if (key == "kp") card.kp = *v;
            else if (key == "lambda") card.lambda = *v;
            else if (key == "sigma") card.sigma_dibl = *v;
            else if (key == "is") card.is_junction = *v;
            else error(line, "unknown model parameter '" + key + "'");
        }
        if (card.eta_derived) {
            if (card.tox > 0.0 && card.wdm > 0.0)
                card.eta = body_coefficient(card.tox, card.wdm);
            else
                error(line, "eta=derived needs tox > 0 and wdm > 0");
        }
        if (nl.models.count(card.name))
            error(line, "duplicate model '" + card.name + "'");
        else
            nl.models.emplace(card.name, std::move(card));
    }

    // returns false once .end is seen
    bool parse_directive(const std::vector<std::string>& t, int line) {
        std::string kw = to_lower(t[0]);
        auto read_temp = [&](size_t from, AnalysisDirective& dir) {
            for (size_t i = from; i < t.size(); ++i) {
                std::string kv = to_lower(t[i]);
                if (kv.rfind("temp=", 0) == 0) {
                    auto v = num(kv.substr(5), line, "temp");
                    if (v) dir.temp_k = *v;
                } else {
                    error(line, "unexpected token '" + t[i] + "'");
                }
            }
        };
        AnalysisDirective dir;
        if (kw == ".end") return false;
        if (kw == ".op") {
            dir.kind = AnalysisDirective::Kind::Op;
            read_temp(1, dir);
        } else if (kw == ".dc") {
            dir.kind = AnalysisDirective::Kind::DcSweep;
            if (t.size() < 5) {
                error(line, ".dc needs: .dc source start stop step");
                return true;
            }
            dir.source = to_lower(t[1]);
            auto a = num(t[2], line, "start"), b = num(t[3], line, "stop"),
                 s = num(t[4], line, "step");
            if (!a || !b || !s) return true;
            dir.start = *a;
            dir.stop = *b;
            dir.step = *s;
            read_temp(5, dir);
        } else if (kw == ".tran") {
            dir.kind = AnalysisDirective::Kind::Tran;
            if (t.size() < 3) {
                error(line, ".tran needs: .tran dt tstop");
                return true;
            }
            auto a = num(t[1], line, "dt"), b = num(t[2], line, "tstop");
            if (!a || !b) return true;
            dir.dt = *a;
            dir.tstop = *b;
            read_temp(3, dir);
        } else if (kw == ".model") {
            parse_model(t, line);
            return true;
        } else {
            error(line, "unknown directive '" + kw + "'");
            return true;
        }
        nl.directives.push_back(std::move(dir));
        return true;
    }
};

}  // namespace detail

// Total: any input yields either a Netlist or diagnostics, never a crash.
inline ParseResult parse(std::string_view text) {
    detail::LineParser p;
    int line_no = 0;
    size_t pos = 0;
    bool first = true;
    bool ended = false;
    while (pos <= text.size() && !ended) {
        size_t nl_pos = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, nl_pos == std::string_view::npos ? std::string_view::npos
                                                  : nl_pos - pos);
        pos = nl_pos == std::string_view::npos ? text.size() + 1 : nl_pos + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (first) {
            p.nl.title = std::string(line);
            first = false;
            continue;
        }
        auto toks = detail::split_ws(line);
        if (toks.empty() || toks[0][0] == '*') continue;
        if (toks[0][0] == '.') {
            ended = !p.parse_directive(toks, line_no);
        } else {
            // raw remainder after the first three tokens, for PWL re-joining
            std::string rest;
            if (toks.size() >= 4) {
                size_t seen = 0, i = 0;
                while (i < line.size() && seen < 3) {
                    while (i < line.size() && std::isspace((unsigned char)line[i])) ++i;
                    while (i < line.size() && !std::isspace((unsigned char)line[i])) ++i;
                    ++seen;
                }
                while (i < line.size() && std::isspace((unsigned char)line[i])) ++i;
                rest = std::string(line.substr(i));
            }
            p.parse_device(toks, line_no, rest);
        }
    }
    if (text.size() > 0 && first == false) {
        auto vdiags = validate(p.nl);
        p.diags.insert(p.diags.end(), vdiags.begin(), vdiags.end());
    }
    ParseResult res;
    res.diagnostics = std::move(p.diags);
    if (res.diagnostics.empty()) res.netlist = std::move(p.nl);
    return res;
}

// Canonical text form; parse(serialize(n)) is structurally identical to n.
inline std::string serialize(const Netlist& nl) {
    std::string out = nl.title + "\n";
    for (const auto& [key, m] : nl.models) {
        out += ".model " + m.name + (m.polarity == Polarity::Nmos ? " nmos" : " pmos");
        out += " vth0=" + format_spice_number(m.vth0);
        if (m.eta_derived) out += " eta=derived";
        else out += " eta=" + format_spice_number(m.eta);
        out += " tox=" + format_spice_number(m.tox);
        out += " wdm=" + format_spice_number(m.wdm);
        out += " u0cox=" + format_spice_number(m.u0cox);
        out += " kp=" + format_spice_number(m.kp);
        out += " lambda=" + format_spice_number(m.lambda);
        out += " sigma=" + format_spice_number(m.sigma_dibl);
        out += " is=" + format_spice_number(m.is_junction);
        out += "\n";
    }
    for (const auto& d : nl.devices) {
        out += d.name;
        for (const auto& n : d.nodes) out += " " + n;
        switch (d.kind) {
            case DeviceKind::Mosfet:
                out += " " + d.model + " w=" + format_spice_number(d.w) +
                       " l=" + format_spice_number(d.l);
                break;
            case DeviceKind::VSource:
            case DeviceKind::ISource:
                if (d.has_pwl()) {
                    out += " pwl(";
                    bool first = true;
                    for (const auto& pt : d.pwl) {
                        if (!first) out += " ";
                        first = false;
                        out += format_spice_number(pt.t) + " " +
                               format_spice_number(pt.v);
                    }
                    out += ")";
                } else {
                    out += " " + format_spice_number(d.value);
                }
                break;
            default:
                out += " " + format_spice_number(d.value);
                break;
        }
        out += "\n";
    }
    for (const auto& dir : nl.directives) {
        using K = AnalysisDirective::Kind;
        switch (dir.kind) {
            case K::Op:
                out += ".op";
                break;
            case K::DcSweep:
                out += ".dc " + dir.source + " " + format_spice_number(dir.start) +
                       " " + format_spice_number(dir.stop) + " " +
                       format_spice_number(dir.step);
                break;
            case K::Tran:
                out += ".tran " + format_spice_number(dir.dt) + " " +
                       format_spice_number(dir.tstop);
                break;
        }
        out += " temp=" + format_spice_number(dir.temp_k) + "\n";
    }
    out += ".end\n";
    return out;
}

}  // namespace leakspice
