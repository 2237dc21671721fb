#pragma once

// Randomized netlist generator and mutator shared by the property tests
// and the acceptance suite.

#include <random>
#include <string>

#include "leakspice/builders.hpp"

namespace testgen {

inline leakspice::Netlist random_netlist(std::mt19937& rng) {
    using namespace leakspice;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto pick = [&](int n) { return (int)(rng() % (unsigned)n); };

    Netlist nl;
    nl.title = "generated netlist " + std::to_string(rng() % 100000);

    int n_models = 1 + pick(3);
    std::vector<std::string> model_names;
    for (int i = 0; i < n_models; ++i) {
        MosModelCard c;
        c.name = "mod" + std::to_string(i);
        c.polarity = u01(rng) < 0.5 ? Polarity::Nmos : Polarity::Pmos;
        c.vth0 = 0.1 + 0.5 * u01(rng);
        c.tox = 1e-9 * (1.0 + 2.0 * u01(rng));
        c.wdm = 30e-9 * (1.0 + 2.0 * u01(rng));
        if (u01(rng) < 0.3) {
            c.eta_derived = true;
            c.eta = body_coefficient(c.tox, c.wdm);
        } else {
            c.eta = 1.0 + 1.5 * u01(rng);
        }
        c.u0cox = 1e-4 * (1.0 + 5.0 * u01(rng));
        c.kp = 1e-4 * (1.0 + 5.0 * u01(rng));
        c.lambda = u01(rng) < 0.5 ? 0.0 : 0.1 * u01(rng);
        c.sigma_dibl = u01(rng) < 0.5 ? 0.0 : 0.05 * u01(rng);
        c.is_junction = u01(rng) < 0.3 ? 1e-14 * u01(rng) : 0.0;
        model_names.push_back(c.name);
        nl.models.emplace(c.name, c);
    }

    std::vector<std::string> nodes = {"0", "n1", "n2", "n3", "n4"};
    auto node = [&]() { return nodes[pick((int)nodes.size())]; };

    int n_devices = 3 + pick(6);
    std::vector<std::string> source_names;
    for (int i = 0; i < n_devices; ++i) {
        int kind = pick(5);
        std::string idx = std::to_string(i);
        // first device pinned to ground so the netlist always validates
        std::string n2 = i == 0 ? "0" : node();
        switch (kind) {
            case 0: {
                auto m = make_mosfet("m" + idx, node(), node(), n2, n2,
                                     model_names[pick(n_models)],
                                     1e-6 * (1.0 + 9.0 * u01(rng)),
                                     1e-7 * (1.0 + 9.0 * u01(rng)));
                nl.devices.push_back(m);
                break;
            }
            case 1:
                nl.devices.push_back(make_two_terminal(
                    DeviceKind::Resistor, "r" + idx, node(), n2,
                    10.0 * std::pow(10.0, 5.0 * u01(rng))));
                break;
            case 2:
                nl.devices.push_back(make_two_terminal(
                    DeviceKind::Capacitor, "c" + idx, node(), n2,
                    1e-12 * (1.0 + 99.0 * u01(rng))));
                break;
            case 3:
            case 4: {
                auto kindv = kind == 3 ? DeviceKind::VSource : DeviceKind::ISource;
                auto d = make_two_terminal(kindv,
                                           (kind == 3 ? "v" : "i") + idx, node(),
                                           n2, 3.3 * u01(rng));
                if (u01(rng) < 0.3) {
                    double t = 0.0;
                    int n_pts = 2 + pick(4);
                    for (int k = 0; k < n_pts; ++k) {
                        d.pwl.push_back({t, 3.3 * u01(rng)});
                        t += 1e-9 * (1.0 + 9.0 * u01(rng));
                    }
                    d.value = d.pwl.front().v;
                }
                nl.devices.push_back(d);
                if (kind == 3) source_names.push_back(d.name);
                break;
            }
        }
    }

    int n_dirs = pick(3);
    for (int i = 0; i < n_dirs; ++i) {
        AnalysisDirective dir;
        dir.temp_k = 250.0 + 150.0 * u01(rng);
        switch (pick(3)) {
            case 0:
                dir.kind = AnalysisDirective::Kind::Op;
                break;
            case 1: {
                if (source_names.empty()) continue;
                dir.kind = AnalysisDirective::Kind::DcSweep;
                dir.source = source_names[pick((int)source_names.size())];
                dir.start = u01(rng);
                dir.stop = dir.start + u01(rng) + 0.1;
                dir.step = 0.01 + 0.1 * u01(rng);
                break;
            }
            case 2:
                dir.kind = AnalysisDirective::Kind::Tran;
                dir.dt = 1e-9;
                dir.tstop = 1e-9 * (1 + pick(100));
                break;
        }
        nl.directives.push_back(dir);
    }
    return nl;
}

// Random byte-level mutation of netlist text for fuzzing the parser.
inline std::string mutate(std::string text, std::mt19937& rng) {
    if (text.empty()) return text;
    int n_edits = 1 + (int)(rng() % 8);
    for (int i = 0; i < n_edits && !text.empty(); ++i) {
        size_t pos = rng() % text.size();
        switch (rng() % 4) {
            case 0:
                text[pos] = (char)(rng() % 256);
                break;
            case 1:
                text.erase(pos, 1 + rng() % 5);
                break;
            case 2: {
                static const char* bits[] = {"=", "pwl(", ")", ".model", "1e",
                                             "m", "\n.", "***", "\t", "-"};
                text.insert(pos, bits[rng() % 10]);
                break;
            }
            case 3:
                text.resize(pos);
                break;
        }
    }
    return text;
}

}  // namespace testgen
