#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "qx/certify.hpp"

using namespace qx;

namespace {

constexpr double kPi = 3.14159265358979323846;

HenonMap horseshoe() {
    return quadratic_henon(cplx(-6.0, 0.0), cplx(0.1, 0.0));
}

// One shared certification of the period <= 3 horseshoe sample (10 points).
const CertifyResult& horseshoe_result() {
    static CertifyResult res = [] {
        HenonMap m = horseshoe();
        SaddleCatalog cat = find_periodic_orbits(m, 3);
        CertifyParams cp;
        cp.law_radii = {0.2, 0.4, 0.6, 0.8, 1.0};
        return certify_theorem12(m, cat, cp);
    }();
    return res;
}

const SaddlePointData& first_included() {
    for (const SaddlePointData& pt : horseshoe_result().points)
        if (!pt.excluded) return pt;
    REQUIRE(false);
    return horseshoe_result().points.front();
}

// Synthetic parametrization (zeta, 0): the map-independent closed forms.
UnstableParametrization identity_psi() {
    UnstableParametrization psi;
    psi.base = ComplexPoint{cplx(0.0, 0.0), cplx(0.0, 0.0)};
    psi.multiplier = cplx(2.0, 0.0);
    psi.coeffs = {ComplexPoint{cplx(1.0, 0.0), cplx(0.0, 0.0)}};
    psi.valid_radius = 10.0;
    return psi;
}

// Graph parametrization (zeta, zeta^2).
UnstableParametrization graph_psi() {
    UnstableParametrization psi = identity_psi();
    psi.coeffs.push_back(ComplexPoint{cplx(0.0, 0.0), cplx(1.0, 0.0)});
    return psi;
}

}  // namespace

TEST_CASE("horseshoe sample certifies quasi-expansion") {
    const CertifyResult& res = horseshoe_result();
    const Certificate& c = res.cert;

    CHECK(c.verdict == "PASS");
    CHECK(c.sample_size + c.exclusions == 10);
    CHECK(c.exclusions <= 1);
    for (const ConditionReport& cr : c.conditions) CHECK(cr.pass);

    CHECK(c.kappa > 3.0);
    CHECK(c.kappa < 4.0);
    // beta = log d / log kappa and C = kappa^beta = d by construction.
    CHECK(std::abs(c.beta * std::log(c.kappa) - std::log(2.0)) <= 1e-12);
    CHECK(c.C == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("orbit multipliers factor into per-step moduli") {
    const CertifyResult& res = horseshoe_result();
    CHECK(res.orbits.size() >= 4);
    for (const OrbitAudit& a : res.orbits) {
        CHECK(a.eig_unstable_mod > 1.0);
        CHECK(a.product_rel_err <= 1e-6);
        CHECK(a.lyapunov_exponent ==
              doctest::Approx(std::log(a.eig_unstable_mod) / a.period)
                  .epsilon(1e-12));
    }
}

TEST_CASE("transformation-law residuals stay inside the tolerance") {
    const CertifyResult& res = horseshoe_result();
    CHECK(res.law_residual_max <= 1e-5);
    int measured = 0;
    for (const SaddlePointData& pt : res.points) {
        if (pt.excluded || !pt.step.ok) continue;
        ++measured;
        CHECK(pt.step.law_radii_checked == 5);
        CHECK(pt.step.law_residual_max <= 1e-5);
    }
    CHECK(measured >= 9);
}

TEST_CASE("power-law lower bound verifies with the certificate constants") {
    const CertifyResult& res = horseshoe_result();
    std::vector<double> radii;
    for (int i = 1; i <= 10; ++i) radii.push_back(0.1 * i);
    LowerBoundReport lb = check_lower_bound(horseshoe(), res, radii);
    CHECK(lb.pass);
    CHECK(lb.violations.empty());
    CHECK(lb.checks == 10 * res.cert.sample_size);
    CHECK(lb.beta == doctest::Approx(res.cert.beta).epsilon(1e-15));
    CHECK(lb.C == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("lower bound detects an overstated expansion rate") {
    const CertifyResult& res = horseshoe_result();
    // kappa = 1000 pretends beta ~ 0.1; at r = 0.01 the claimed bound
    // t r^0.1 / 2 = 0.32 far exceeds the true m(0.01) ~ r^0.56.
    LowerBoundReport lb = check_lower_bound(horseshoe(), res,
                                            {0.01, 0.1, 1.0}, 1e-9, 1000.0);
    CHECK(!lb.pass);
    CHECK(!lb.violations.empty());
}

TEST_CASE("certificate assembly from synthetic samples") {
    SUBCASE("no points: insufficient sample") {
        CertificateInputs in;
        Certificate c = build_certificate(in);
        CHECK(c.verdict == "INSUFFICIENT_SAMPLE");
        CHECK(c.sample_size == 0);
    }
    SUBCASE("all points excluded: insufficient sample") {
        CertificateInputs in;
        SamplePointSummary p;
        p.excluded = true;
        in.points = {p, p};
        Certificate c = build_certificate(in);
        CHECK(c.verdict == "INSUFFICIENT_SAMPLE");
        CHECK(c.exclusions == 2);
    }
    SUBCASE("exact power-law sample passes with kappa = min step") {
        // m(r) = t r^beta with beta = log 2 / log 1.5; then C = 2 and the
        // condition-(5) ratio is exactly 1/2 < 1 at every grid radius.
        double beta = std::log(2.0) / std::log(1.5);
        CertificateInputs in;
        for (double step : {1.5, 2.0}) {
            SamplePointSummary p;
            p.step_ok = true;
            p.step_modulus = step;
            p.profile.radii = {0.5, 1.0, 2.0};
            for (double r : p.profile.radii) {
                p.profile.values.push_back(std::pow(r, beta));
                p.profile.reliable.push_back(true);
            }
            in.points.push_back(p);
        }
        Certificate c = build_certificate(in);
        CHECK(c.verdict == "PASS");
        CHECK(c.kappa == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(c.beta == doctest::Approx(beta).epsilon(1e-12));
        CHECK(c.C == doctest::Approx(2.0).epsilon(1e-12));
        for (const ConditionReport& cr : c.conditions) CHECK(cr.pass);
    }
    SUBCASE("expansion below the margin fails condition 4") {
        CertificateInputs in;
        in.margin = 0.05;
        SamplePointSummary p;
        p.step_ok = true;
        p.step_modulus = 1.03;
        p.profile.radii = {0.5, 1.0, 2.0};
        p.profile.values = {0.5, 1.0, 2.0};
        p.profile.reliable = {true, true, true};
        in.points = {p};
        Certificate c = build_certificate(in);
        CHECK(c.verdict == "FAIL");
        CHECK(!c.conditions[3].pass);
    }
}

TEST_CASE("local-variety area matches closed forms") {
    SUBCASE("identity graph: area of the unit disk") {
        AreaReport ar = area_of_local_variety(identity_psi(), 1.0);
        CHECK(ar.area == doctest::Approx(kPi).epsilon(1e-6));
        CHECK(ar.rho_min == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(ar.rho_max == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(ar.star_check);
    }
    SUBCASE("parabola graph at eps = sqrt(2): energy 3 pi over the disk") {
        // ||psi(zeta)||_2 = sqrt(rho^2 + rho^4) is angle-free, so the
        // component is exactly the unit disk and the area integral is
        // int (1 + 4 rho^2) = pi + 2 pi.
        AreaReport ar = area_of_local_variety(graph_psi(), std::sqrt(2.0));
        CHECK(ar.area == doctest::Approx(3.0 * kPi).epsilon(1e-6));
        CHECK(ar.rho_min == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(ar.rho_max == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(ar.star_check);
    }
}

TEST_CASE("annulus modulus bound reproduces its closed form") {
    SUBCASE("identity datum (R0 = 1, R1 = e): rhs = 1 / (3 pi)") {
        ProperDiskDatum d;
        d.R0 = 1.0;
        d.R1 = std::exp(1.0);
        d.rho_inner.assign(64, 1.0);
        d.rho_outer.assign(64, d.R1);
        d.area = kPi * d.R1 * d.R1;
        ModulusReport rep = modulus_bound_check(d);
        CHECK(rep.lhs_lo == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.lhs_hi == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.rhs == doctest::Approx(1.0 / (3.0 * kPi)).epsilon(1e-12));
        CHECK(rep.pass);
        CHECK(rep.margin == doctest::Approx(1.0 - 1.0 / (3.0 * kPi))
                                .epsilon(1e-6));
    }
    SUBCASE("identity parametrization produces the same datum numerically") {
        ProperDiskDatum d =
            proper_disk_datum(identity_psi(), 1.0, std::exp(1.0));
        ModulusReport rep = modulus_bound_check(d);
        CHECK(rep.lhs_lo == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(rep.rhs == doctest::Approx(1.0 / (3.0 * kPi)).epsilon(1e-8));
        CHECK(rep.pass);
    }
    SUBCASE("degree-two graph keeps a positive margin") {
        ProperDiskDatum d = proper_disk_datum(graph_psi(), 0.5, 1.0);
        ModulusReport rep = modulus_bound_check(d);
        CHECK(rep.pass);
        CHECK(rep.margin > 0.4);
        CHECK(rep.rhs_slope > 0.0);
    }
}

TEST_CASE("backward contraction shrinks pulled-back varieties") {
    const CertifyResult& res = horseshoe_result();
    REQUIRE(res.cert.verdict == "PASS");
    const SaddlePointData& pt = first_included();

    ContractionReport cr =
        backward_contraction(horseshoe(), res.cert, pt.psi, 0.3, 8);
    CHECK(cr.replay_ok);
    CHECK(cr.rows.size() == 9);  // n = 0..8
    CHECK(cr.theta_envelope < 1.0);
    CHECK(cr.theta_fit > 0.0);
    CHECK(cr.theta_fit < 1.0);
}

TEST_CASE("backward contraction refuses a failed certificate") {
    const CertifyResult& res = horseshoe_result();
    Certificate broken = res.cert;
    broken.verdict = "FAIL";
    CHECK_THROWS_AS(backward_contraction(horseshoe(), broken,
                                         first_included().psi, 0.3, 2),
                    PreconditionError);
}

TEST_CASE("Lyapunov exponents dominate the certified rate") {
    const CertifyResult& res = horseshoe_result();
    LyapunovReport ly = lyapunov_estimate(res);
    CHECK(ly.pass);
    CHECK(ly.rows.size() == res.orbits.size());
    CHECK(ly.log_kappa == doctest::Approx(std::log(res.cert.kappa))
                              .epsilon(1e-15));
    CHECK(ly.min_exponent >= ly.log_kappa - 1e-9);
}

TEST_CASE("ball growth fit is expanding and deterministic") {
    HenonMap m = horseshoe();
    ComplexPoint fp = first_included().point;
    std::vector<double> radii = {0.05, 0.1, 0.2};
    BallGrowthFit a = ball_green_growth(m, fp, radii);
    BallGrowthFit b = ball_green_growth(m, fp, radii);
    CHECK(a.exponent > 0.0);
    CHECK(a.exponent == b.exponent);
    CHECK(a.C == b.C);
}
