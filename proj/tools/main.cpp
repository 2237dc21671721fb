// Command line front end: DC operating point, DC sweep, transient,
// leakage reporting and sleep-transistor gating over SPICE-style netlists.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "leakspice/report.hpp"

namespace {

using namespace leakspice;

struct ComputeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Netlist load_netlist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ComputeError("cannot open netlist file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    ParseResult pr = parse(ss.str());
    if (!pr.diagnostics.empty()) {
        for (const auto& d : pr.diagnostics)
            std::cerr << path << ":" << d.line << ": " << d.message << "\n";
        throw ComputeError("netlist '" + path + "' has errors");
    }
    return *pr.netlist;
}

// Data goes to --out if given, else stdout; errors never touch this stream.
class OutputStream {
  public:
    explicit OutputStream(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ComputeError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

struct CommonOpts {
    std::string netlist_path;
    double temp_k = 0.0;  // 0: take the directive's (or 300 K)
    std::string format = "csv";
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_netlist = true) {
    if (needs_netlist)
        cmd->add_option("netlist", o.netlist_path, "input netlist file")
            ->required();
    cmd->add_option("--temp", o.temp_k, "simulation temperature in kelvin");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out_path, "output file (default: stdout)");
}

double effective_temp(const CommonOpts& o, const AnalysisDirective* dir) {
    if (o.temp_k > 0.0) return o.temp_k;
    return dir ? dir->temp_k : 300.0;
}

const AnalysisDirective* find_directive(const Netlist& nl,
                                        AnalysisDirective::Kind kind) {
    for (const auto& d : nl.directives)
        if (d.kind == kind) return &d;
    return nullptr;
}

template <typename Report>
void emit(const CommonOpts& o, const Report& rep, const ReportMeta& meta) {
    OutputStream out(o.out_path);
    if (o.format == "json")
        out.get() << to_json(rep, meta).dump(2) << "\n";
    else
        write_csv(out.get(), rep, meta);
}

int run_op(const CommonOpts& o) {
    Netlist nl = load_netlist(o.netlist_path);
    double temp = effective_temp(o, find_directive(nl, AnalysisDirective::Kind::Op));
    OperatingPoint op = dc_operating_point(nl, temp);
    emit(o, op, make_meta(nl, temp));
    return 0;
}

int run_sweep(const CommonOpts& o, const std::vector<std::string>& curves) {
    Netlist nl = load_netlist(o.netlist_path);
    const AnalysisDirective* found =
        find_directive(nl, AnalysisDirective::Kind::DcSweep);
    if (!found) throw ComputeError("netlist has no .dc directive");
    AnalysisDirective dir = *found;
    dir.temp_k = effective_temp(o, found);

    if (curves.empty()) {
        Waveform wf = dc_sweep(nl, dir);
        emit(o, wf, make_meta(nl, dir.temp_k));
        return 0;
    }
    // each --curve src=value pins a source and contributes one current column
    Waveform table;
    table.abscissa_name = dir.source;
    for (const auto& spec : curves) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--curve", "expected <source>=<value>");
        std::string src = to_lower(spec.substr(0, eq));
        std::string value_text = spec.substr(eq + 1);
        auto value = parse_spice_number(value_text);
        DeviceInstance* dev = nl.find_device(src);
        if (!value || !dev ||
            (dev->kind != DeviceKind::VSource && dev->kind != DeviceKind::ISource))
            throw ComputeError("--curve " + spec + ": unknown source or bad value");
        dev->value = *value;
        Waveform wf = dc_sweep(nl, dir);
        if (table.abscissa.empty()) {
            table.abscissa = wf.abscissa;
            table.rows.assign(wf.abscissa.size(), {});
        }
        size_t col = wf.col_index("i(" + src + ")");
        for (size_t r = 0; r < wf.rows.size(); ++r)
            table.rows[r].push_back(wf.rows[r][col]);
        table.columns.push_back("ids_" + src + "_" + value_text);
    }
    emit(o, table, make_meta(nl, dir.temp_k));
    return 0;
}

int run_tran(const CommonOpts& o) {
    Netlist nl = load_netlist(o.netlist_path);
    const AnalysisDirective* found =
        find_directive(nl, AnalysisDirective::Kind::Tran);
    if (!found) throw ComputeError("netlist has no .tran directive");
    AnalysisDirective dir = *found;
    dir.temp_k = effective_temp(o, found);
    Waveform wf = transient(nl, dir);
    emit(o, wf, make_meta(nl, dir.temp_k));
    return 0;
}

int run_leakage(const CommonOpts& o, const std::vector<std::string>& inputs) {
    Netlist nl = load_netlist(o.netlist_path);
    double temp = effective_temp(o, nullptr);
    LeakageReport rep = leakage_report(nl, inputs, temp);
    emit(o, rep, make_meta(nl, temp));
    return 0;
}

struct GateCli {
    std::string style = "footer";
    std::string sleep_model;
    std::string state = "standby";
    double w = 0.0, l = 0.0;
    bool allow_regate = false;
    bool compare = false;
    std::vector<std::string> inputs;
};

int run_gate(const CommonOpts& o, const GateCli& g) {
    Netlist nl = load_netlist(o.netlist_path);
    GateOptions opt;
    opt.style = g.style == "footer" ? GateStyle::Footer : GateStyle::Header;
    opt.sleep_model = g.sleep_model;
    opt.state = g.state == "active" ? SleepState::Active : SleepState::Standby;
    opt.w = g.w;
    opt.l = g.l;
    opt.allow_regate = g.allow_regate;
    double temp = effective_temp(o, nullptr);
    if (g.compare) {
        GatingComparison cmp = compare_gating(nl, opt, g.inputs, temp);
        emit(o, cmp, make_meta(nl, temp));
    } else {
        Netlist gated = power_gate_transform(nl, opt);
        OutputStream out(o.out_path);
        out.get() << serialize(gated);
    }
    return 0;
}

struct ModelEvalCli {
    std::string op;
    double vgs = 0.0, vds = 0.0, temp = 300.0;
    double wl = 1.0, vt = 0.4, eta = 1.0;
    double tox = 2e-9, wdm = 60e-9;
    double cdep = 0.0, coxe = 1.0;
};

int run_model_eval(const CommonOpts& o, const ModelEvalCli& m) {
    double value = 0.0;
    if (m.op == "vt")
        value = thermal_voltage(m.temp);
    else if (m.op == "m" || m.op == "body-coefficient")
        value = body_coefficient(m.tox, m.wdm);
    else if (m.op == "eta")
        value = eta_from_caps(m.cdep, m.coxe);
    else if (m.op == "swing-nominal")
        value = subthreshold_swing_nominal(m.eta, m.temp);
    else if (m.op == "swing-exact")
        value = subthreshold_swing_exact(m.eta, m.temp);
    else if (m.op == "ids")
        value = ids_empirical(m.wl, m.vgs, m.vt, m.eta, m.temp);
    else if (m.op == "ioff")
        value = ioff_empirical(m.wl, m.vt, m.eta, m.temp);
    else
        throw CLI::ValidationError("operation",
                                   "unknown model-eval operation '" + m.op + "'");
    OutputStream out(o.out_path);
    out.get() << format_sci(value) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"leakage-aware SPICE-subset circuit simulator"};
    app.require_subcommand(1);

    CommonOpts op_o, sweep_o, tran_o, leak_o, gate_o, eval_o;
    std::vector<std::string> curves, leak_inputs;
    GateCli gate_cli;
    ModelEvalCli eval_cli;

    CLI::App* c_op = app.add_subcommand("op", "DC operating point");
    add_common(c_op, op_o);

    CLI::App* c_sweep = app.add_subcommand("sweep", "DC sweep (.dc directive)");
    add_common(c_sweep, sweep_o);
    c_sweep->add_option("--curve", curves,
                        "pin a source per curve, e.g. --curve vds=0.05; emits "
                        "one current column per flag");

    CLI::App* c_tran = app.add_subcommand("tran", "transient (.tran directive)");
    add_common(c_tran, tran_o);

    CLI::App* c_leak = app.add_subcommand("leakage",
                                          "static leakage over all input states");
    add_common(c_leak, leak_o);
    c_leak->add_option("--inputs", leak_inputs, "digital input source names")
        ->delimiter(',');

    CLI::App* c_gate = app.add_subcommand(
        "gate", "insert a sleep transistor; emits the gated netlist, or a "
                "before/after report with --compare");
    add_common(c_gate, gate_o);
    c_gate->add_option("--style", gate_cli.style, "rail to gate")
        ->check(CLI::IsMember({"footer", "header"}));
    c_gate->add_option("--sleep-model", gate_cli.sleep_model, "sleep device model")
        ->required();
    c_gate->add_option("--state", gate_cli.state, "sleep control state")
        ->check(CLI::IsMember({"active", "standby"}));
    c_gate->add_option("--w", gate_cli.w, "sleep device width (m)");
    c_gate->add_option("--l", gate_cli.l, "sleep device length (m)");
    c_gate->add_flag("--allow-regate", gate_cli.allow_regate,
                     "permit gating an already gated netlist");
    c_gate->add_flag("--compare", gate_cli.compare,
                     "emit baseline/active/standby leakage comparison");
    c_gate->add_option("--inputs", gate_cli.inputs,
                       "digital input source names for --compare")
        ->delimiter(',');

    CLI::App* c_eval = app.add_subcommand(
        "model-eval", "evaluate a device-model quantity from flags");
    c_eval->add_option("operation", eval_cli.op,
                       "vt | m | eta | swing-nominal | swing-exact | ids | ioff")
        ->required();
    add_common(c_eval, eval_o, false);
    c_eval->add_option("--vgs", eval_cli.vgs, "gate-source voltage (V)");
    c_eval->add_option("--vds", eval_cli.vds, "drain-source voltage (V)");
    c_eval->add_option("--wl", eval_cli.wl, "W/L ratio");
    c_eval->add_option("--vt", eval_cli.vt, "threshold voltage (V)");
    c_eval->add_option("--eta", eval_cli.eta, "subthreshold swing coefficient");
    c_eval->add_option("--tox", eval_cli.tox, "oxide thickness (m)");
    c_eval->add_option("--wdm", eval_cli.wdm, "depletion width (m)");
    c_eval->add_option("--cdep", eval_cli.cdep, "depletion capacitance (F)");
    c_eval->add_option("--coxe", eval_cli.coxe, "oxide capacitance (F)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (c_op->parsed()) return run_op(op_o);
        if (c_sweep->parsed()) return run_sweep(sweep_o, curves);
        if (c_tran->parsed()) return run_tran(tran_o);
        if (c_leak->parsed()) return run_leakage(leak_o, leak_inputs);
        if (c_gate->parsed()) return run_gate(gate_o, gate_cli);
        if (c_eval->parsed()) {
            eval_cli.temp = eval_o.temp_k > 0.0 ? eval_o.temp_k : 300.0;
            return run_model_eval(eval_o, eval_cli);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
