#pragma once

// Modified nodal analysis with damped Newton-Raphson, gmin/source stepping
// continuation, warm-started DC sweeps and fixed-step implicit transient
// (trapezoidal with a backward-Euler first step).

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "leakspice/netlist.hpp"

namespace leakspice {

struct SolverSettings {
    double abstol_i = 1e-12;  // A, max KCL residual
    double abstol_v = 1e-9;   // V, max Newton update
    double reltol = 1e-6;
    int max_iter = 200;
};

struct SolveError : std::runtime_error {
    double best_residual;
    explicit SolveError(const std::string& msg, double residual = 0.0)
        : std::runtime_error(msg), best_residual(residual) {}
};

struct OperatingPoint {
    std::map<std::string, double> node_voltages;
    std::map<std::string, double> source_currents;  // delivered out of n+
    int iterations = 0;
    double residual_norm = 0.0;
    bool converged = false;
};

struct Waveform {
    std::string abscissa_name;
    std::vector<std::string> columns;
    std::vector<double> abscissa;
    std::vector<std::vector<double>> rows;

    size_t col_index(const std::string& name) const {
        for (size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::out_of_range("waveform has no column '" + name + "'");
    }
    double at(size_t row, const std::string& name) const {
        return rows.at(row).at(col_index(name));
    }
};

namespace detail {

// Dense LU with partial pivoting. Row order is deterministic.
class DenseSolver {
  public:
    explicit DenseSolver(int n) : n_(n), a_(n * n), piv_(n) {}

    double& at(int r, int c) { return a_[r * n_ + c]; }
    void clear() { std::fill(a_.begin(), a_.end(), 0.0); }

    // returns index of first structurally singular unknown, or -1
    int factor() {
        for (int k = 0; k < n_; ++k) {
            int p = k;
            double best = std::abs(a_[k * n_ + k]);
            for (int r = k + 1; r < n_; ++r) {
                double v = std::abs(a_[r * n_ + k]);
                if (v > best) {
                    best = v;
                    p = r;
                }
            }
            // structural singularity shows up as an (almost) exactly zero
            // column; legitimate off-device conductances can be ~1e-40
            if (best < 1e-200) return k;
            piv_[k] = p;
            if (p != k)
                for (int c = 0; c < n_; ++c)
                    std::swap(a_[k * n_ + c], a_[p * n_ + c]);
            double inv = 1.0 / a_[k * n_ + k];
            for (int r = k + 1; r < n_; ++r) {
                double f = a_[r * n_ + k] * inv;
                a_[r * n_ + k] = f;
                if (f == 0.0) continue;
                for (int c = k + 1; c < n_; ++c)
                    a_[r * n_ + c] -= f * a_[k * n_ + c];
            }
        }
        return -1;
    }

    void solve(std::vector<double>& b) const {
        // apply the full row permutation before substitution; the stored L
        // already has every later swap folded in
        for (int k = 0; k < n_; ++k) std::swap(b[k], b[piv_[k]]);
        for (int k = 0; k < n_; ++k)
            for (int r = k + 1; r < n_; ++r) b[r] -= a_[r * n_ + k] * b[k];
        for (int k = n_ - 1; k >= 0; --k) {
            for (int c = k + 1; c < n_; ++c) b[k] -= a_[k * n_ + c] * b[c];
            b[k] /= a_[k * n_ + k];
        }
    }

  private:
    int n_;
    std::vector<double> a_;
    std::vector<int> piv_;
};

inline double pwl_value(const std::vector<PwlPoint>& pts, double t) {
    if (t <= pts.front().t) return pts.front().v;
    if (t >= pts.back().t) return pts.back().v;
    for (size_t i = 1; i < pts.size(); ++i) {
        if (t <= pts[i].t) {
            double f = (t - pts[i - 1].t) / (pts[i].t - pts[i - 1].t);
            return pts[i - 1].v + f * (pts[i].v - pts[i - 1].v);
        }
    }
    return pts.back().v;
}

// junction reverse current drain->body for an NMOS-oriented junction,
// with conductance; v = V(anode-side reverse bias) = Vdb for NMOS
struct JunctionEval {
    double i = 0.0;
    double g = 0.0;
};

inline JunctionEval junction_eval(double is, double v, double vt) {
    JunctionEval j;
    if (is <= 0.0) return j;
    double u = std::clamp(-v / vt, -exp_arg_limit, exp_arg_limit);
    double e = std::exp(u);
    j.i = is * (1.0 - e);
    j.g = is * e / vt;
    return j;
}

class Circuit {
  public:
    Circuit(const Netlist& nl, double temp_k) : nl_(nl), temp_k_(temp_k) {
        auto diags = validate(nl);
        if (!diags.empty())
            throw SolveError("invalid netlist: " + diags.front().message);
        for (const auto& name : nl.node_names()) {
            if (name == "0") continue;
            node_index_.emplace(name, 0);
        }
        int idx = 0;
        for (auto& [name, i] : node_index_) {
            i = idx++;
            node_names_.push_back(name);
        }
        n_nodes_ = idx;
        for (const auto& d : nl.devices) {
            if (d.kind == DeviceKind::VSource) {
                branch_index_.emplace(d.name, n_nodes_ + (int)vsources_.size());
                vsources_.push_back(&d);
            }
            if (d.kind == DeviceKind::Mosfet) {
                for (int t : {0, 1, 2}) {  // drain, gate, source
                    auto it = node_index_.find(d.nodes[t]);
                    if (it != node_index_.end()) mos_nodes_.insert(it->second);
                }
            }
        }
        // source-pinned nodes must snap to their branch constraint; the
        // step clamp would only fight it
        for (const auto* src : vsources_)
            for (const auto& n : src->nodes) {
                auto it = node_index_.find(n);
                if (it != node_index_.end()) mos_nodes_.erase(it->second);
            }
        n_unknowns_ = n_nodes_ + (int)vsources_.size();
        // internal nodes of a MOSFET network have no reason to leave the
        // rail span; bounding the iterate keeps newton from wandering
        for (const auto* src : vsources_) {
            v_lo_ = std::min(v_lo_, src->value);
            v_hi_ = std::max(v_hi_, src->value);
        }
        v_lo_ -= 1.0;
        v_hi_ += 1.0;
        // working copies of source values (for sweeps / stepping / time)
        for (const auto& d : nl.devices)
            source_value_[d.name] = d.value;
        x_.assign(n_unknowns_, 0.0);
    }

    int n_unknowns() const { return n_unknowns_; }
    int n_nodes() const { return n_nodes_; }
    double temp_k() const { return temp_k_; }
    const std::vector<std::string>& node_names() const { return node_names_; }
    const std::vector<const DeviceInstance*>& vsources() const { return vsources_; }
    std::vector<double>& state() { return x_; }

    void set_source(const std::string& name, double v) {
        source_value_.at(name) = v;
    }
    double source_value(const std::string& name) const {
        return source_value_.at(name);
    }

    void set_guess(const std::map<std::string, double>& guess) {
        for (const auto& [name, v] : guess) {
            auto it = node_index_.find(name);
            if (it != node_index_.end()) x_[it->second] = v;
        }
    }

    // Capacitor companion models for transient; empty map means DC (open).
    struct CapCompanion {
        double geq = 0.0;
        double ieq = 0.0;  // history current source, n1 -> n2
    };
    std::map<std::string, CapCompanion> cap_companion;

    double v_of(const std::vector<double>& x, const std::string& node) const {
        if (node == "0") return 0.0;
        return x[node_index_.at(node)];
    }

    // Assemble residual f (KCL rows in amps, branch rows in volts) and,
    // if J != nullptr, the Jacobian.
    void assemble(const std::vector<double>& x, std::vector<double>& f,
                  DenseSolver* J, double gmin, double source_scale) const {
        std::fill(f.begin(), f.end(), 0.0);
        if (J) J->clear();
        auto idx = [&](const std::string& node) -> int {
            if (node == "0") return -1;
            return node_index_.at(node);
        };
        auto addf = [&](int i, double v) {
            if (i >= 0) f[i] += v;
        };
        auto addj = [&](int r, int c, double v) {
            if (J && r >= 0 && c >= 0) J->at(r, c) += v;
        };
        const double vt = thermal_voltage(temp_k_);
        for (const auto& d : nl_.devices) {
            switch (d.kind) {
                case DeviceKind::Resistor: {
                    int a = idx(d.nodes[0]), b = idx(d.nodes[1]);
                    double g = 1.0 / d.value;
                    double i = g * (v_of(x, d.nodes[0]) - v_of(x, d.nodes[1]));
                    addf(a, i);
                    addf(b, -i);
                    addj(a, a, g);
                    addj(a, b, -g);
                    addj(b, a, -g);
                    addj(b, b, g);
                    break;
                }
                case DeviceKind::Capacitor: {
                    auto it = cap_companion.find(d.name);
                    if (it == cap_companion.end()) break;  // DC: open
                    int a = idx(d.nodes[0]), b = idx(d.nodes[1]);
                    double g = it->second.geq;
                    double i = g * (v_of(x, d.nodes[0]) - v_of(x, d.nodes[1])) +
                               it->second.ieq;
                    addf(a, i);
                    addf(b, -i);
                    addj(a, a, g);
                    addj(a, b, -g);
                    addj(b, a, -g);
                    addj(b, b, g);
                    break;
                }
                case DeviceKind::ISource: {
                    int a = idx(d.nodes[0]), b = idx(d.nodes[1]);
                    double i = source_scale * source_value_.at(d.name);
                    addf(a, i);   // current drawn from n+ ...
                    addf(b, -i);  // ... delivered into n-
                    break;
                }
                case DeviceKind::VSource: {
                    int a = idx(d.nodes[0]), b = idx(d.nodes[1]);
                    int br = branch_index_.at(d.name);
                    double ib = x[br];
                    addf(a, ib);
                    addf(b, -ib);
                    addj(a, br, 1.0);
                    addj(b, br, -1.0);
                    f[br] = v_of(x, d.nodes[0]) - v_of(x, d.nodes[1]) -
                            source_scale * source_value_.at(d.name);
                    addj(br, a, 1.0);
                    addj(br, b, -1.0);
                    break;
                }
                case DeviceKind::Mosfet: {
                    const MosModelCard& card = nl_.models.at(d.model);
                    int nd = idx(d.nodes[0]), ng = idx(d.nodes[1]),
                        ns = idx(d.nodes[2]), nb = idx(d.nodes[3]);
                    double vd = v_of(x, d.nodes[0]), vg = v_of(x, d.nodes[1]),
                           vs = v_of(x, d.nodes[2]), vb = v_of(x, d.nodes[3]);
                    DeviceEval ev = ids_unified(
                        card, d.w, d.l, {vg - vs, vd - vs, temp_k_});
                    addf(nd, ev.ids);
                    addf(ns, -ev.ids);
                    double gm = ev.d_ids_d_vgs, gds = ev.d_ids_d_vds;
                    addj(nd, ng, gm);
                    addj(nd, nd, gds);
                    addj(nd, ns, -(gm + gds));
                    addj(ns, ng, -gm);
                    addj(ns, nd, -gds);
                    addj(ns, ns, gm + gds);
                    if (card.is_junction > 0.0) {
                        // drain-body and source-body reverse diodes
                        double sgn = card.polarity == Polarity::Nmos ? 1.0 : -1.0;
                        for (auto [nt, vtm] :
                             {std::pair{nd, vd}, std::pair{ns, vs}}) {
                            JunctionEval j = junction_eval(
                                card.is_junction, sgn * (vtm - vb), vt);
                            double i = sgn * j.i;
                            addf(nt, i);
                            addf(nb, -i);
                            addj(nt, nt, j.g);
                            addj(nt, nb, -j.g);
                            addj(nb, nt, -j.g);
                            addj(nb, nb, j.g);
                        }
                    }
                    break;
                }
            }
        }
        // permanent tiny floor keeps quasi-floating nodes (all attached
        // devices deep off, conductances ~1e-40) numerically tame; its
        // residual contribution (~1e-16 * V) sits far below abstol_i
        double g = gmin + conductance_floor;
        for (int i = 0; i < n_nodes_; ++i) {
            f[i] += g * x[i];
            if (J) J->at(i, i) += g;
        }
    }

    static constexpr double conductance_floor = 1e-16;  // S

    double node_residual(const std::vector<double>& f) const {
        double r = 0.0;
        for (int i = 0; i < n_nodes_; ++i) r = std::max(r, std::abs(f[i]));
        return r;
    }

    // Every node needs a DC conduction path: resistors, voltage sources,
    // MOSFET drain/source terminals (body too, with junctions), or a
    // capacitor that currently has a transient companion model.
    void check_dc_paths() const {
        std::set<std::string> stamped;
        for (const auto& d : nl_.devices) {
            switch (d.kind) {
                case DeviceKind::Resistor:
                case DeviceKind::VSource:
                    stamped.insert(d.nodes[0]);
                    stamped.insert(d.nodes[1]);
                    break;
                case DeviceKind::Capacitor:
                    if (cap_companion.count(d.name)) {
                        stamped.insert(d.nodes[0]);
                        stamped.insert(d.nodes[1]);
                    }
                    break;
                case DeviceKind::Mosfet: {
                    stamped.insert(d.nodes[0]);
                    stamped.insert(d.nodes[2]);
                    const MosModelCard& card = nl_.models.at(d.model);
                    if (card.is_junction > 0.0) stamped.insert(d.nodes[3]);
                    break;
                }
                default:
                    break;
            }
        }
        for (const auto& name : node_names_)
            if (!stamped.count(name))
                throw SolveError("singular MNA matrix: floating node '" + name +
                                 "'");
    }

    struct NewtonResult {
        bool converged = false;
        int iterations = 0;
        double residual = 0.0;
    };

    NewtonResult newton(const SolverSettings& st, double gmin,
                        double source_scale) {
        const int n = n_unknowns_;
        DenseSolver J(n);
        std::vector<double> f(n), dx(n);
        const double step_limit = 2.0 * thermal_voltage(temp_k_);
        NewtonResult res;
        const std::vector<double> x_entry = x_;
        assemble(x_, f, &J, gmin, source_scale);
        res.residual = node_residual(f);
        for (int it = 1; it <= st.max_iter; ++it) {
            int sing = J.factor();
            if (sing >= 0) {
                std::string what =
                    sing < n_nodes_
                        ? "floating node '" + node_names_[sing] + "'"
                        : "degenerate source '" + vsources_[sing - n_nodes_]->name + "'";
                throw SolveError("singular MNA matrix: " + what, res.residual);
            }
            for (int i = 0; i < n; ++i) dx[i] = -f[i];
            J.solve(dx);
            // per-node clamp: a runaway high-impedance node must not stall
            // the rest of the system
            for (int i : mos_nodes_)
                dx[i] = std::clamp(dx[i], -step_limit, step_limit);
            double dv_max = 0.0, x_max = 0.0;
            bool finite = true;
            for (int i = 0; i < n; ++i) {
                x_[i] += dx[i];
                if (i < n_nodes_) x_[i] = std::clamp(x_[i], v_lo_, v_hi_);
                finite = finite && std::isfinite(x_[i]);
                dv_max = std::max(dv_max, std::abs(dx[i]));
                x_max = std::max(x_max, std::abs(x_[i]));
            }
            if (!finite) {
                // diverged; restore the entry state so the next phase
                // starts from something evaluable
                x_ = x_entry;
                res.iterations = it;
                return res;
            }
            assemble(x_, f, &J, gmin, source_scale);
            res.residual = node_residual(f);
            res.iterations = it;
#ifdef LEAKSPICE_NEWTON_TRACE
            {
                int worst = 0;
                for (int i = 0; i < n_nodes_; ++i)
                    if (std::abs(f[i]) > std::abs(f[worst])) worst = i;
                std::fprintf(stderr,
                             "  it %3d res %.3e worst %s f=%.2e v=%.4f dv=%.3e\n",
                             it, res.residual, node_names_[worst].c_str(),
                             f[worst], x_[worst], dv_max);
            }
#endif
            double branch_res = 0.0;
            for (int i = n_nodes_; i < n; ++i)
                branch_res = std::max(branch_res, std::abs(f[i]));
            bool small_step = dv_max <= st.abstol_v + st.reltol * x_max;
            if (res.residual <= st.abstol_i && branch_res <= st.abstol_v &&
                (small_step || res.residual <= st.abstol_i * 1e-3)) {
                res.converged = true;
                return res;
            }
        }
        return res;
    }

    OperatingPoint extract(const NewtonResult& nr) const {
        OperatingPoint op;
        for (int i = 0; i < n_nodes_; ++i)
            op.node_voltages[node_names_[i]] = x_[i];
        for (size_t k = 0; k < vsources_.size(); ++k)
            op.source_currents[vsources_[k]->name] = -x_[n_nodes_ + k];
        for (const auto& d : nl_.devices)
            if (d.kind == DeviceKind::ISource)
                op.source_currents[d.name] = source_value_.at(d.name);
        op.iterations = nr.iterations;
        op.residual_norm = nr.residual;
        op.converged = nr.converged;
        return op;
    }

    // Plain Newton, then gmin stepping, then source stepping. The reported
    // solve always runs with gmin fully removed. A singular matrix in one
    // phase (an iterate wandered into a dead region) must not abort the
    // remaining continuation strategies.
    NewtonResult solve_dc(const SolverSettings& st) {
        check_dc_paths();
        std::optional<SolveError> singular;
        double best = 1e300;
        auto attempt = [&](double gmin,
                           double scale) -> std::optional<NewtonResult> {
            try {
                NewtonResult nr = newton(st, gmin, scale);
                best = std::min(best, nr.residual);
                return nr;
            } catch (const SolveError& e) {
                singular = e;
                return std::nullopt;
            }
        };

        std::optional<NewtonResult> nr = attempt(0.0, 1.0);
        if (nr && nr->converged) return *nr;
        // gmin stepping
        {
            std::vector<double> saved = x_;
            std::fill(x_.begin(), x_.end(), 0.0);
            bool ok = true;
            for (double g = 1e-3; g >= 0.9e-12; g /= 10.0) {
                std::optional<NewtonResult> stage = attempt(g, 1.0);
                if (!stage || !stage->converged) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                nr = attempt(0.0, 1.0);
                if (nr && nr->converged) return *nr;
            }
            x_ = saved;
        }
        // source stepping
        {
            std::fill(x_.begin(), x_.end(), 0.0);
            bool ok = true;
            for (int k = 1; k <= 10; ++k) {
                std::optional<NewtonResult> stage = attempt(0.0, k / 10.0);
                if (!stage || !stage->converged) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                nr = attempt(0.0, 1.0);
                if (nr && nr->converged) return *nr;
            }
        }
        if (singular) throw *singular;
        throw SolveError("DC solve did not converge (best residual " +
                             format_spice_number(best) + " A)",
                         best);
    }

    const Netlist& netlist() const { return nl_; }

  private:
    const Netlist& nl_;
    double temp_k_;
    int n_nodes_ = 0;
    int n_unknowns_ = 0;
    std::map<std::string, int> node_index_;
    std::vector<std::string> node_names_;
    std::map<std::string, int> branch_index_;
    std::vector<const DeviceInstance*> vsources_;
    std::set<int> mos_nodes_;
    double v_lo_ = 0.0, v_hi_ = 0.0;
    std::map<std::string, double> source_value_;
    std::vector<double> x_;
};

}  // namespace detail

inline OperatingPoint dc_operating_point(
    const Netlist& nl, double temp_k = 300.0,
    const std::map<std::string, double>* initial_guess = nullptr,
    const SolverSettings& st = {}) {
    detail::Circuit c(nl, temp_k);
    if (initial_guess) c.set_guess(*initial_guess);
    auto nr = c.solve_dc(st);
    return c.extract(nr);
}

inline Waveform dc_sweep(const Netlist& nl, const AnalysisDirective& dir,
                         const SolverSettings& st = {}) {
    if (dir.kind != AnalysisDirective::Kind::DcSweep)
        throw std::invalid_argument("dc_sweep: directive is not .dc");
    detail::Circuit c(nl, dir.temp_k);
    Waveform wf;
    wf.abscissa_name = dir.source;
    for (const auto& name : c.node_names()) wf.columns.push_back("v(" + name + ")");
    for (const auto* src : c.vsources()) wf.columns.push_back("i(" + src->name + ")");
    int n_steps = (int)std::floor((dir.stop - dir.start) / dir.step + 0.5);
    for (int k = 0; k <= n_steps; ++k) {
        double value = dir.start + k * dir.step;
        c.set_source(dir.source, value);
        detail::Circuit::NewtonResult nr;  // warm start from previous point
        try {
            nr = c.solve_dc(st);
        } catch (const SolveError& e) {
            throw SolveError("sweep point " + dir.source + "=" +
                                 format_spice_number(value) + ": " + e.what(),
                             e.best_residual);
        }
        std::vector<double> row;
        const auto& x = c.state();
        for (int i = 0; i < c.n_nodes(); ++i) row.push_back(x[i]);
        for (size_t i = 0; i < c.vsources().size(); ++i)
            row.push_back(-x[c.n_nodes() + i]);
        wf.abscissa.push_back(value);
        wf.rows.push_back(std::move(row));
    }
    return wf;
}

inline Waveform transient(const Netlist& nl, const AnalysisDirective& dir,
                          const SolverSettings& st = {}) {
    if (dir.kind != AnalysisDirective::Kind::Tran)
        throw std::invalid_argument("transient: directive is not .tran");
    if (!(dir.dt > 0.0) || dir.tstop < dir.dt)
        throw std::invalid_argument("transient: need dt > 0 and tstop >= dt");
    detail::Circuit c(nl, dir.temp_k);

    auto set_sources_at = [&](double t) {
        for (const auto& d : nl.devices) {
            if ((d.kind == DeviceKind::VSource || d.kind == DeviceKind::ISource) &&
                d.has_pwl())
                c.set_source(d.name, detail::pwl_value(d.pwl, t));
        }
    };

    Waveform wf;
    wf.abscissa_name = "time";
    for (const auto& name : c.node_names()) wf.columns.push_back("v(" + name + ")");
    for (const auto* src : c.vsources()) wf.columns.push_back("i(" + src->name + ")");

    auto record = [&](double t) {
        std::vector<double> row;
        const auto& x = c.state();
        for (int i = 0; i < c.n_nodes(); ++i) row.push_back(x[i]);
        for (size_t i = 0; i < c.vsources().size(); ++i)
            row.push_back(-x[c.n_nodes() + i]);
        wf.abscissa.push_back(t);
        wf.rows.push_back(std::move(row));
    };

    // t = 0: DC operating point, capacitors open
    set_sources_at(0.0);
    c.solve_dc(st);
    record(0.0);

    struct CapState {
        const DeviceInstance* dev;
        double v_prev = 0.0;  // v(n1) - v(n2)
        double i_prev = 0.0;  // branch current at previous accepted step
    };
    std::vector<CapState> caps;
    for (const auto& d : nl.devices)
        if (d.kind == DeviceKind::Capacitor)
            caps.push_back({&d,
                            c.v_of(c.state(), d.nodes[0]) -
                                c.v_of(c.state(), d.nodes[1]),
                            0.0});

    const int n_steps = (int)std::llround(dir.tstop / dir.dt);
    for (int k = 1; k <= n_steps; ++k) {
        const double t = k * dir.dt;
        const bool backward_euler = (k == 1);  // startup step
        for (auto& cs : caps) {
            detail::Circuit::CapCompanion comp;
            double cval = cs.dev->value;
            if (backward_euler) {
                comp.geq = cval / dir.dt;
                comp.ieq = -comp.geq * cs.v_prev;
            } else {
                comp.geq = 2.0 * cval / dir.dt;
                comp.ieq = -(comp.geq * cs.v_prev + cs.i_prev);
            }
            c.cap_companion[cs.dev->name] = comp;
        }
        set_sources_at(t);
        detail::Circuit::NewtonResult nr = c.newton(st, 0.0, 1.0);
        if (!nr.converged)
            throw SolveError("transient step at t=" + format_spice_number(t) +
                                 " did not converge",
                             nr.residual);
        for (auto& cs : caps) {
            const auto& comp = c.cap_companion[cs.dev->name];
            double v = c.v_of(c.state(), cs.dev->nodes[0]) -
                       c.v_of(c.state(), cs.dev->nodes[1]);
            cs.i_prev = comp.geq * v + comp.ieq;
            cs.v_prev = v;
        }
        record(t);
    }
    return wf;
}

// Slew rate between the first crossings of lo_frac and hi_frac of the
// total signal swing (defaults: 10% / 90%).
inline double measure_slew_rate(const Waveform& wf, const std::string& signal,
                                double lo_frac = 0.1, double hi_frac = 0.9) {
    if (!(lo_frac < hi_frac))
        throw std::invalid_argument("measure_slew_rate: need lo_frac < hi_frac");
    size_t col = wf.col_index(signal);
    if (wf.rows.size() < 2)
        throw std::invalid_argument("measure_slew_rate: waveform too short");
    double vmin = wf.rows[0][col], vmax = vmin;
    for (const auto& r : wf.rows) {
        vmin = std::min(vmin, r[col]);
        vmax = std::max(vmax, r[col]);
    }
    const double swing = vmax - vmin;
    if (swing <= 0.0)
        throw std::runtime_error("measure_slew_rate: no crossing found (flat signal)");

    auto first_crossing = [&](double level, size_t from, bool rising,
                              double* t_out) -> size_t {
        for (size_t i = from + 1; i < wf.rows.size(); ++i) {
            double a = wf.rows[i - 1][col], b = wf.rows[i][col];
            bool hit = rising ? (a < level && b >= level)
                              : (a > level && b <= level);
            if (hit) {
                double f = (level - a) / (b - a);
                *t_out = wf.abscissa[i - 1] +
                         f * (wf.abscissa[i] - wf.abscissa[i - 1]);
                return i;
            }
        }
        return 0;
    };

    const double lo = vmin + lo_frac * swing;
    const double hi = vmin + hi_frac * swing;
    double t_lo = 0.0, t_hi = 0.0;
    // rising edge: lo then hi
    size_t i_lo = first_crossing(lo, 0, true, &t_lo);
    if (i_lo) {
        size_t i_hi = first_crossing(hi, i_lo - 1, true, &t_hi);
        if (i_hi && t_hi > t_lo) return (hi - lo) / (t_hi - t_lo);
    }
    // falling edge: hi then lo
    size_t i_hi = first_crossing(hi, 0, false, &t_hi);
    if (i_hi) {
        size_t i_lo2 = first_crossing(lo, i_hi - 1, false, &t_lo);
        if (i_lo2 && t_lo > t_hi) return (hi - lo) / (t_lo - t_hi);
    }
    throw std::runtime_error("measure_slew_rate: no crossing found");
}

}  // namespace leakspice
