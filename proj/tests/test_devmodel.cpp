#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "leakspice/devmodel.hpp"

using namespace leakspice;
using Catch::Approx;

// Frozen with an independent 40-digit evaluation (mpmath) of the same
// formulas before the implementation was written.
namespace oracle {
constexpr double vt_300k = 0.02585199388082590;
constexpr double swing_exact_eta1_300k = 59.52641573416301;     // mV/dec
constexpr double swing_exact_eta15_300k = 89.28962360124451;    // mV/dec
constexpr double ioff_vt02_eta15_300k = 5.755698981673155e-10;  // A
constexpr double weak_example = 1.346338316420128e-9;           // A
constexpr double decade_eta15_300k = 0.08928962360124451;       // V
constexpr double ids_minus_08929mv = 9.999902935422706e-9;      // A
constexpr double one_minus_exp_m10 = 0.9999546000702375;
}  // namespace oracle

TEST_CASE("thermal voltage") {
    CHECK(thermal_voltage(300.0) == Approx(oracle::vt_300k).epsilon(1e-12));
    CHECK(thermal_voltage(600.0) ==
          Approx(2.0 * oracle::vt_300k).epsilon(1e-12));
    CHECK_THROWS_AS(thermal_voltage(0.0), std::domain_error);
    CHECK_THROWS_AS(thermal_voltage(-10.0), std::domain_error);
}

TEST_CASE("body coefficient") {
    CHECK(body_coefficient(2e-9, 60e-9) == Approx(1.1).epsilon(1e-12));
    CHECK(body_coefficient(1e-9, 30e-9) == Approx(1.1).epsilon(1e-12));
    CHECK(body_coefficient(1e-15, 60e-9) == Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(body_coefficient(0.0, 60e-9), std::domain_error);
    CHECK_THROWS_AS(body_coefficient(2e-9, 0.0), std::domain_error);
}

TEST_CASE("eta from capacitances") {
    CHECK(eta_from_caps(0.0, 1e-3) == 1.0);
    CHECK(eta_from_caps(1e-3, 1e-3) == Approx(2.0).epsilon(1e-12));
    CHECK(eta_from_caps(0.5e-3, 1e-3) == Approx(1.5).epsilon(1e-12));
    CHECK_THROWS_AS(eta_from_caps(1e-3, 0.0), std::domain_error);
    CHECK_THROWS_AS(eta_from_caps(-1e-3, 1e-3), std::domain_error);
}

TEST_CASE("subthreshold swing, nominal and exact") {
    CHECK(subthreshold_swing_nominal(1.0, 300.0) == 60.0);
    CHECK(subthreshold_swing_nominal(1.5, 300.0) == Approx(90.0).epsilon(1e-12));
    CHECK(subthreshold_swing_nominal(1.5, 600.0) == Approx(180.0).epsilon(1e-12));
    CHECK(subthreshold_swing_exact(1.0, 300.0) ==
          Approx(oracle::swing_exact_eta1_300k).epsilon(1e-12));
    CHECK(subthreshold_swing_exact(1.5, 300.0) ==
          Approx(oracle::swing_exact_eta15_300k).epsilon(1e-12));
    CHECK(subthreshold_swing_exact(1.0, 150.0) ==
          Approx(oracle::swing_exact_eta1_300k / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(subthreshold_swing_nominal(0.5, 300.0), std::domain_error);

    // the rounded 60 mV form stays within 1% of the exact decade spacing
    for (double eta : {1.0, 1.2, 1.5, 2.0, 3.0}) {
        double nom = subthreshold_swing_nominal(eta, 300.0);
        double exact = subthreshold_swing_exact(eta, 300.0);
        CHECK(std::abs(nom - exact) / exact <= 0.01);
    }
}

TEST_CASE("empirical threshold-current law") {
    CHECK(ids_empirical(1.0, 0.3, 0.3, 1.5, 300.0) == Approx(100e-9).epsilon(1e-12));
    CHECK(ids_empirical(2.0, 0.3, 0.3, 1.5, 300.0) == Approx(200e-9).epsilon(1e-12));
    CHECK(ids_empirical(1.0, 0.3 - oracle::decade_eta15_300k, 0.3, 1.5, 300.0) ==
          Approx(10e-9).epsilon(1e-11));
    CHECK(ids_empirical(1.0, 0.3 - 0.08929, 0.3, 1.5, 300.0) ==
          Approx(oracle::ids_minus_08929mv).epsilon(1e-12));
    CHECK_THROWS_AS(ids_empirical(0.0, 0.0, 0.3, 1.5, 300.0), std::domain_error);
}

TEST_CASE("decade slope property") {
    for (double eta : {1.0, 1.5, 2.0, 3.0}) {
        for (double t : {250.0, 300.0, 400.0}) {
            double dec = eta * thermal_voltage(t) * std::log(10.0);
            for (double vgs : {-0.1, 0.05, 0.2}) {
                double ratio = ids_empirical(1.0, vgs, 0.25, eta, t) /
                               ids_empirical(1.0, vgs - dec, 0.25, eta, t);
                CHECK(ratio == Approx(10.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("ioff") {
    CHECK(ioff_empirical(3.0, 0.0, 1.5, 300.0) == Approx(300e-9).epsilon(1e-12));
    CHECK(ioff_empirical(1.0, 0.2, 1.5, 300.0) ==
          Approx(oracle::ioff_vt02_eta15_300k).epsilon(1e-12));
    CHECK(ioff_empirical(10.0, 0.2, 1.5, 300.0) ==
          Approx(10.0 * oracle::ioff_vt02_eta15_300k).epsilon(1e-12));
    // identity with ids_empirical at Vgs = 0, bit-exact
    CHECK(ioff_empirical(2.5, 0.37, 1.3, 320.0) ==
          ids_empirical(2.5, 0.0, 0.37, 1.3, 320.0));
}

TEST_CASE("ioff minimization levers") {
    // strictly decreasing in Vt, in decreasing eta, in decreasing T
    double prev = ioff_empirical(1.0, 0.1, 1.5, 300.0);
    for (double vt : {0.15, 0.2, 0.3, 0.4, 0.5}) {
        double cur = ioff_empirical(1.0, vt, 1.5, 300.0);
        CHECK(cur < prev);
        prev = cur;
    }
    prev = ioff_empirical(1.0, 0.2, 2.5, 300.0);
    for (double eta : {2.0, 1.7, 1.4, 1.1}) {
        double cur = ioff_empirical(1.0, 0.2, eta, 300.0);
        CHECK(cur < prev);
        prev = cur;
    }
    prev = ioff_empirical(1.0, 0.2, 1.5, 400.0);
    for (double t : {350.0, 300.0, 250.0, 200.0}) {
        double cur = ioff_empirical(1.0, 0.2, 1.5, t);
        CHECK(cur < prev);
        prev = cur;
    }
}

static MosModelCard test_card() {
    MosModelCard c;
    c.name = "nch";
    c.polarity = Polarity::Nmos;
    c.vth0 = 0.2;
    c.eta = 1.5;
    c.u0cox = 3.5e-4;
    c.kp = 2e-4;
    return c;
}

TEST_CASE("weak inversion current") {
    MosModelCard c = test_card();
    BiasPoint b{0.0, 1.0, 300.0};
    CHECK(ids_weak_inversion(c, 2e-6, 1e-6, b) ==
          Approx(oracle::weak_example).epsilon(1e-12));
    CHECK(ids_weak_inversion(c, 2e-6, 1e-6, {0.0, 0.0, 300.0}) == 0.0);

    double vt = thermal_voltage(300.0);
    double near = ids_weak_inversion(c, 1e-6, 1e-6, {0.0, 10.0 * vt, 300.0});
    double far = ids_weak_inversion(c, 1e-6, 1e-6, {0.0, 1000.0 * vt, 300.0});
    CHECK(near / far == Approx(oracle::one_minus_exp_m10).epsilon(1e-9));
    CHECK(std::abs(near / far - 1.0) < 5e-5);
    CHECK_THROWS_AS(ids_weak_inversion(c, 0.0, 1e-6, b), std::domain_error);
}

TEST_CASE("weak inversion monotonicity") {
    MosModelCard c = test_card();
    double prev = 0.0;
    for (int i = 0; i <= 40; ++i) {  // increasing Vgs
        double cur = ids_weak_inversion(c, 1e-6, 1e-6, {-0.3 + i * 0.01, 1.0, 300.0});
        CHECK(cur > prev);
        prev = cur;
    }
    prev = -1.0;
    for (int i = 0; i <= 40; ++i) {  // nondecreasing Vds
        double cur = ids_weak_inversion(c, 1e-6, 1e-6, {0.0, i * 0.05, 300.0});
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("strong inversion square law") {
    MosModelCard c = test_card();
    c.kp = 2e-4;
    CHECK(ids_strong_inversion(c, 1e-6, 1e-6, {0.2, 1.0, 300.0}) == 0.0);
    // saturation, Vov = 1
    CHECK(ids_strong_inversion(c, 1e-6, 1e-6, {1.2, 2.0, 300.0}) ==
          Approx(1e-4).epsilon(1e-12));
    // continuity at the triode/saturation seam
    double tri = ids_strong_inversion(c, 1e-6, 1e-6, {1.2, 1.0, 300.0});
    double sat = ids_strong_inversion(c, 1e-6, 1e-6, {1.2, 1.0 + 1e-12, 300.0});
    CHECK(tri == Approx(sat).epsilon(1e-9));
    c.lambda = 0.05;
    tri = ids_strong_inversion(c, 1e-6, 1e-6, {1.2, 1.0, 300.0});
    sat = ids_strong_inversion(c, 1e-6, 1e-6, {1.2, 1.0 + 1e-9, 300.0});
    CHECK(tri == Approx(sat).epsilon(1e-6));
}

TEST_CASE("unified model basics") {
    MosModelCard c = test_card();
    auto ev0 = ids_unified(c, 1e-6, 1e-6, {0.0, 0.0, 300.0});
    CHECK(ev0.ids == 0.0);
    CHECK_THROWS_AS(
        ids_unified(c, 1e-6, 1e-6,
                    {std::numeric_limits<double>::quiet_NaN(), 0.0, 300.0}),
        std::domain_error);

    // deep subthreshold matches the unblended weak-inversion expression
    double vt = thermal_voltage(300.0);
    for (double depth : {5.0, 6.0, 10.0}) {
        BiasPoint b{c.vth0 - depth * c.eta * vt, 1.0, 300.0};
        double blended = ids_unified(c, 1e-6, 1e-6, b).ids;
        double pure = ids_weak_inversion(c, 1e-6, 1e-6, b);
        CHECK(blended == Approx(pure).epsilon(1e-3));
    }

    // region tags
    CHECK(ids_unified(c, 1e-6, 1e-6, {0.1, 1.0, 300.0}).region == Region::OffWeak);
    CHECK(ids_unified(c, 1e-6, 1e-6, {1.2, 0.1, 300.0}).region == Region::Triode);
    CHECK(ids_unified(c, 1e-6, 1e-6, {1.2, 2.0, 300.0}).region == Region::Saturation);
}

TEST_CASE("unified model C1 smoothness at the blend boundary") {
    MosModelCard c = test_card();
    for (double vds : {0.05, 0.5, 2.0}) {
        for (double sigma : {0.0, 0.05}) {
            c.sigma_dibl = sigma;
            double vth_eff = c.vth0 - sigma * vds;
            auto lo = ids_unified(c, 1e-6, 1e-6, {vth_eff - 1e-12, vds, 300.0});
            auto hi = ids_unified(c, 1e-6, 1e-6, {vth_eff + 1e-12, vds, 300.0});
            CHECK(lo.ids == Approx(hi.ids).epsilon(1e-9));
            CHECK(lo.d_ids_d_vgs == Approx(hi.d_ids_d_vgs).epsilon(1e-6));
            CHECK(lo.d_ids_d_vds == Approx(hi.d_ids_d_vds).epsilon(1e-6));
        }
    }
}

TEST_CASE("PMOS is the exact mirror of NMOS") {
    MosModelCard n = test_card();
    MosModelCard p = n;
    p.polarity = Polarity::Pmos;
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> uv(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        double vgs = uv(rng), vds = uv(rng);
        auto en = ids_unified(n, 1e-6, 1e-6, {-vgs, -vds, 300.0});
        auto ep = ids_unified(p, 1e-6, 1e-6, {vgs, vds, 300.0});
        CHECK(ep.ids == -en.ids);
        CHECK(ep.d_ids_d_vgs == en.d_ids_d_vgs);
        CHECK(ep.d_ids_d_vds == en.d_ids_d_vds);
    }
}

namespace {

// effective forward-orientation coordinates after polarity mirror and
// source/drain exchange, used to keep finite differences away from the
// (C1 but not C2) region seams
struct Fwd {
    double x;    // Vgs' - Vth_eff
    double vds;  // >= 0
};

Fwd forward_coords(const MosModelCard& c, double vgs, double vds) {
    if (c.polarity == Polarity::Pmos) {
        vgs = -vgs;
        vds = -vds;
    }
    if (vds < 0.0) {
        vgs = vgs - vds;
        vds = -vds;
    }
    double vth_eff = c.vth0 - c.sigma_dibl * vds;
    return {vgs - vth_eff, vds};
}

bool near_seam(const MosModelCard& c, double vgs, double vds, double band) {
    Fwd f = forward_coords(c, vgs, vds);
    return std::abs(f.x) < band || std::abs(f.vds) < band ||
           std::abs(f.vds - f.x) < band;
}

}  // namespace

TEST_CASE("analytic partials match central finite differences") {
    std::mt19937 rng(987654);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double h = 1e-6;
    int checked = 0;
    while (checked < 100) {
        MosModelCard c = test_card();
        c.polarity = u01(rng) < 0.5 ? Polarity::Nmos : Polarity::Pmos;
        c.vth0 = 0.1 + 0.5 * u01(rng);
        c.eta = 1.0 + 1.5 * u01(rng);
        c.lambda = 0.1 * u01(rng);
        c.sigma_dibl = u01(rng) < 0.5 ? 0.0 : 0.05;
        double vgs = -1.0 + 3.0 * u01(rng);
        double vds = -2.0 + 4.0 * u01(rng);
        if (near_seam(c, vgs, vds, 1e-4)) continue;
        if (near_seam(c, vgs + h, vds, 2e-6) || near_seam(c, vgs, vds + h, 2e-6))
            continue;
        ++checked;
        auto ev = ids_unified(c, 2e-6, 1e-6, {vgs, vds, 300.0});
        double fd_gm = (ids_unified(c, 2e-6, 1e-6, {vgs + h, vds, 300.0}).ids -
                        ids_unified(c, 2e-6, 1e-6, {vgs - h, vds, 300.0}).ids) /
                       (2.0 * h);
        double fd_gds = (ids_unified(c, 2e-6, 1e-6, {vgs, vds + h, 300.0}).ids -
                         ids_unified(c, 2e-6, 1e-6, {vgs, vds - h, 300.0}).ids) /
                        (2.0 * h);
        double tol_gm = 1e-6 * std::max(std::abs(fd_gm), std::abs(ev.d_ids_d_vgs));
        double tol_gds = 1e-6 * std::max(std::abs(fd_gds), std::abs(ev.d_ids_d_vds));
        CHECK(std::abs(ev.d_ids_d_vgs - fd_gm) <= std::max(tol_gm, 1e-18));
        CHECK(std::abs(ev.d_ids_d_vds - fd_gds) <= std::max(tol_gds, 1e-18));
    }
}

TEST_CASE("junction reverse current") {
    double vt = thermal_voltage(300.0);
    CHECK(junction_reverse_current(0.0, 1.0, 300.0) == 0.0);
    CHECK(junction_reverse_current(1e-12, 0.0, 300.0) == 0.0);
    CHECK(junction_reverse_current(1e-12, 10.0 * vt, 300.0) ==
          Approx(1e-12 * oracle::one_minus_exp_m10).epsilon(1e-9));
    CHECK_THROWS_AS(junction_reverse_current(-1e-12, 1.0, 300.0),
                    std::domain_error);
}
