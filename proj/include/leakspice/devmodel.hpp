#pragma once

// Subthreshold-aware MOSFET compact model: weak-inversion (diffusion)
// current, square-law strong inversion, and the empirical 100nA*W/L
// threshold-current convention, all with analytic partials.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "leakspice/constants.hpp"

namespace leakspice {

enum class Polarity { Nmos, Pmos };

enum class Region { OffWeak, Triode, Saturation };

struct MosModelCard {
    std::string name;
    Polarity polarity = Polarity::Nmos;
    double vth0 = 0.4;        // V, zero-bias threshold (magnitude)
    double eta = 1.0;         // subthreshold swing / body effect coefficient
    bool eta_derived = false; // eta taken as 1 + 3*tox/wdm
    double tox = 2e-9;        // m
    double wdm = 60e-9;       // m
    double u0cox = 3.5e-4;    // A/V^2 per square, weak-inversion prefactor
    double kp = 2e-4;         // A/V^2, square-law transconductance parameter
    double lambda = 0.0;      // 1/V, channel-length modulation
    double sigma_dibl = 0.0;  // Vth_eff = vth0 - sigma_dibl*Vds
    double is_junction = 0.0; // A, junction reverse saturation current

    void validate() const {
        if (!(eta >= 1.0))
            throw std::domain_error("model " + name + ": eta must be >= 1");
        if (!(tox > 0.0) || !(wdm > 0.0))
            throw std::domain_error("model " + name + ": tox and wdm must be > 0");
        if (u0cox < 0.0 || kp < 0.0 || is_junction < 0.0)
            throw std::domain_error("model " + name + ": negative parameter");
    }
};

struct BiasPoint {
    double vgs = 0.0;
    double vds = 0.0;
    double temp_k = 300.0;
};

struct DeviceEval {
    double ids = 0.0;          // A, drain->source channel current
    double d_ids_d_vgs = 0.0;  // A/V
    double d_ids_d_vds = 0.0;  // A/V
    Region region = Region::OffWeak;
    bool exp_clamped = false;  // subthreshold exponent hit the +-120 guard
};

// Guard for every exponent that feeds std::exp.
inline constexpr double exp_arg_limit = 120.0;

// M = 1 + 3*tox/Wdm
inline double body_coefficient(double tox, double wdm) {
    if (!(tox > 0.0) || !(wdm > 0.0))
        throw std::domain_error("body_coefficient: tox and wdm must be > 0");
    return 1.0 + 3.0 * tox / wdm;
}

// eta = 1 + Cdep/Coxe
inline double eta_from_caps(double c_dep, double c_oxe) {
    if (!(c_oxe > 0.0))
        throw std::domain_error("eta_from_caps: c_oxe must be > 0");
    if (c_dep < 0.0)
        throw std::domain_error("eta_from_caps: c_dep must be >= 0");
    return 1.0 + c_dep / c_oxe;
}

// Rounded reporting form, mV/decade: eta * 60mV * T/300.
inline double subthreshold_swing_nominal(double eta, double temp_k) {
    if (!(eta >= 1.0))
        throw std::domain_error("subthreshold_swing: eta must be >= 1");
    if (!(temp_k > 0.0))
        throw std::domain_error("subthreshold_swing: temperature must be > 0 K");
    return eta * 60.0 * temp_k / 300.0;
}

// Decade spacing actually exhibited by the exponential: eta*vT*ln10, mV/decade.
inline double subthreshold_swing_exact(double eta, double temp_k) {
    if (!(eta >= 1.0))
        throw std::domain_error("subthreshold_swing: eta must be >= 1");
    return eta * thermal_voltage(temp_k) * std::log(10.0) * 1e3;
}

// 100nA * W/L * exp(q(Vgs-Vt)/(eta kT))
inline double ids_empirical(double w_over_l, double vgs, double vt, double eta,
                            double temp_k) {
    if (!(w_over_l > 0.0))
        throw std::domain_error("ids_empirical: W/L must be > 0");
    if (!(eta >= 1.0))
        throw std::domain_error("ids_empirical: eta must be >= 1");
    double u = (vgs - vt) / (eta * thermal_voltage(temp_k));
    u = std::clamp(u, -exp_arg_limit, exp_arg_limit);
    return 100e-9 * w_over_l * std::exp(u);
}

// Ioff = Ids at Vgs = 0.
inline double ioff_empirical(double w_over_l, double vt, double eta,
                             double temp_k) {
    return ids_empirical(w_over_l, 0.0, vt, eta, temp_k);
}

// Ideal reverse-diode junction leakage; v_reverse > 0 means reverse bias.
inline double junction_reverse_current(double is_junction, double v_reverse,
                                       double temp_k) {
    if (is_junction < 0.0)
        throw std::domain_error("junction_reverse_current: Is must be >= 0");
    if (is_junction == 0.0) return 0.0;
    double u = std::clamp(-v_reverse / thermal_voltage(temp_k),
                          -exp_arg_limit, exp_arg_limit);
    return is_junction * (1.0 - std::exp(u));
}

// mu0*Cox*(W/L)*(m-1)*vT^2 * exp((Vgs-Vth_eff)/(m vT)) * (1 - exp(-Vds/vT)),
// NMOS orientation, Vth_eff = vth0 - sigma_dibl*Vds.
inline double ids_weak_inversion(const MosModelCard& card, double w, double l,
                                 const BiasPoint& bias) {
    if (!(w > 0.0) || !(l > 0.0))
        throw std::domain_error("ids_weak_inversion: W and L must be > 0");
    const double vt = thermal_voltage(bias.temp_k);
    const double vth_eff = card.vth0 - card.sigma_dibl * bias.vds;
    double u = std::clamp((bias.vgs - vth_eff) / (card.eta * vt),
                          -exp_arg_limit, exp_arg_limit);
    const double prefac = card.u0cox * (w / l) * (card.eta - 1.0) * vt * vt;
    return prefac * std::exp(u) * (1.0 - std::exp(-bias.vds / vt));
}

// Square law with channel-length modulation; lambda factor applied in both
// regions so the triode/saturation seam stays continuous for lambda != 0.
inline double ids_strong_inversion(const MosModelCard& card, double w, double l,
                                   const BiasPoint& bias) {
    if (!(w > 0.0) || !(l > 0.0))
        throw std::domain_error("ids_strong_inversion: W and L must be > 0");
    const double vth_eff = card.vth0 - card.sigma_dibl * bias.vds;
    const double vov = bias.vgs - vth_eff;
    if (vov <= 0.0) return 0.0;
    const double beta = card.kp * (w / l);
    const double clm = 1.0 + card.lambda * bias.vds;
    if (bias.vds < vov)
        return beta * (vov * bias.vds - 0.5 * bias.vds * bias.vds) * clm;
    return 0.5 * beta * vov * vov * clm;
}

namespace detail {

// NMOS, vds >= 0. Weak-inversion exponential below Vth_eff; above it the
// exponential factor continues linearly (value and slope match at the seam)
// and the square law is added on top. The square law contributes zero value
// and zero dVgs slope at Vov = 0+, so the blend is C1 in both variables.
inline DeviceEval eval_nmos_forward(const MosModelCard& card, double w_over_l,
                                    const BiasPoint& bias) {
    DeviceEval ev;
    const double vt = thermal_voltage(bias.temp_k);
    const double eta_vt = card.eta * vt;
    const double sigma = card.sigma_dibl;
    const double vth_eff = card.vth0 - sigma * bias.vds;
    const double x = bias.vgs - vth_eff;
    const double u = x / eta_vt;

    const double prefac = card.u0cox * w_over_l * (card.eta - 1.0) * vt * vt;
    const double e_ds = std::exp(-bias.vds / vt);
    const double drain_fac = 1.0 - e_ds;
    const double d_drain_fac = e_ds / vt;

    double f, df;  // exponential factor and its d/du
    if (u <= 0.0) {
        if (u < -exp_arg_limit) {
            f = df = 0.0;
            ev.exp_clamped = true;
        } else {
            f = df = std::exp(u);
        }
    } else {
        f = 1.0 + u;
        df = 1.0;
    }

    ev.ids = prefac * f * drain_fac;
    ev.d_ids_d_vgs = prefac * df * drain_fac / eta_vt;
    ev.d_ids_d_vds =
        prefac * (f * d_drain_fac + df * drain_fac * sigma / eta_vt);

    if (x <= 0.0) {
        ev.region = Region::OffWeak;
        return ev;
    }

    const double beta = card.kp * w_over_l;
    const double clm = 1.0 + card.lambda * bias.vds;
    if (bias.vds < x) {
        ev.region = Region::Triode;
        const double q = x * bias.vds - 0.5 * bias.vds * bias.vds;
        ev.ids += beta * q * clm;
        ev.d_ids_d_vgs += beta * bias.vds * clm;
        ev.d_ids_d_vds +=
            beta * ((x + sigma * bias.vds - bias.vds) * clm + q * card.lambda);
    } else {
        ev.region = Region::Saturation;
        ev.ids += 0.5 * beta * x * x * clm;
        ev.d_ids_d_vgs += beta * x * clm;
        ev.d_ids_d_vds +=
            beta * x * sigma * clm + 0.5 * beta * x * x * card.lambda;
    }
    return ev;
}

// NMOS, any vds. Negative vds by source/drain exchange symmetry.
inline DeviceEval eval_nmos(const MosModelCard& card, double w_over_l,
                            const BiasPoint& bias) {
    if (bias.vds >= 0.0) return eval_nmos_forward(card, w_over_l, bias);
    BiasPoint swapped{bias.vgs - bias.vds, -bias.vds, bias.temp_k};
    DeviceEval ev = eval_nmos_forward(card, w_over_l, swapped);
    DeviceEval out;
    out.ids = -ev.ids;
    out.d_ids_d_vgs = -ev.d_ids_d_vgs;
    out.d_ids_d_vds = ev.d_ids_d_vgs + ev.d_ids_d_vds;
    out.region = ev.region;
    out.exp_clamped = ev.exp_clamped;
    return out;
}

}  // namespace detail

// Single C1 current function covering all regions and both polarities.
// PMOS is the exact mirror: ids_pmos(vgs, vds) = -ids_nmos(-vgs, -vds).
inline DeviceEval ids_unified(const MosModelCard& card, double w, double l,
                              const BiasPoint& bias) {
    if (!(w > 0.0) || !(l > 0.0))
        throw std::domain_error("ids_unified: W and L must be > 0");
    if (!std::isfinite(bias.vgs) || !std::isfinite(bias.vds))
        throw std::domain_error("ids_unified: non-finite bias");
    const double w_over_l = w / l;
    if (card.polarity == Polarity::Nmos)
        return detail::eval_nmos(card, w_over_l, bias);
    BiasPoint mirrored{-bias.vgs, -bias.vds, bias.temp_k};
    DeviceEval ev = detail::eval_nmos(card, w_over_l, mirrored);
    ev.ids = -ev.ids;  // partials are invariant under the double sign flip
    return ev;
}

}  // namespace leakspice
