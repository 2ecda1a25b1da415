#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "qx/poly1d.hpp"

using namespace qx;

namespace {

Polynomial1D chebyshev() { return quadratic_1d(cplx(-2.0, 0.0)); }

// Exact-period cycle counts of z^2 + c (generic c, all cycles counted):
// necklace numbers of the 2-shift.
const std::map<int, int> kCycleCounts = {{1, 2}, {2, 1}, {3, 2}, {4, 3},
                                         {5, 6}};

std::map<int, int> count_by_period(const std::vector<Cycle1D>& cycles) {
    std::map<int, int> n;
    for (const Cycle1D& c : cycles) n[c.period]++;
    return n;
}

const Cycle1D* find_fixed(const std::vector<Cycle1D>& cycles, cplx z) {
    for (const Cycle1D& c : cycles)
        if (c.period == 1 && std::abs(c.points[0] - z) < 1e-8) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("Green function of z^2 - 2: closed form off the Julia interval") {
    Polynomial1D g = chebyshev();
    // G(z) = log |z + sqrt(z^2 - 4)| - log 2 outside [-2, 2].
    GreenEstimate at3 = green_1d(g, cplx(3.0, 0.0));
    CHECK(at3.status == GreenStatus::Escaped);
    double want = std::log((3.0 + std::sqrt(5.0)) / 2.0);
    CHECK(at3.value == doctest::Approx(want).epsilon(1e-12));
    CHECK(at3.error_bound <= 1e-12);

    // Inside the interval the value is numerically zero.
    GreenEstimate inside = green_1d(g, cplx(1.5, 0.0));
    CHECK(std::abs(inside.value) <= 1e-10);

    // G o g = d G.
    cplx z(2.5, 0.3);
    GreenEstimate g0 = green_1d(g, z);
    GreenEstimate g1 = green_1d(g, g.eval(z));
    CHECK(std::abs(g1.value - 2.0 * g0.value) <= 1e-12 * g1.value);
}

TEST_CASE("cycle counts for quadratic maps match the necklace numbers") {
    for (cplx c : {cplx(-2.0, 0.0), cplx(0.0, 0.0)}) {
        Polynomial1D g = quadratic_1d(c);
        std::vector<Cycle1D> cycles = find_cycles_1d(g, 5);
        std::map<int, int> got = count_by_period(cycles);
        for (const auto& [period, want] : kCycleCounts) {
            INFO("c = " << c.real() << ", period " << period);
            CHECK(got[period] == want);
        }
        for (const Cycle1D& cyc : cycles) {
            CHECK(cyc.residual <= 1e-9);
            // Points advance under the map.
            for (int j = 0; j < cyc.period; ++j)
                CHECK(std::abs(g.eval(cyc.points[j]) -
                               cyc.points[(j + 1) % cyc.period]) <= 1e-8);
        }
    }
}

TEST_CASE("the repelling filter drops attracting and indifferent cycles") {
    // z^2: the superattracting fixed point 0 must be excluded.
    Polynomial1D sq = quadratic_1d(cplx(0.0, 0.0));
    std::vector<Cycle1D> all = find_cycles_1d(sq, 1);
    CHECK(all.size() == 2);
    std::vector<Cycle1D> rep = repelling_cycles(sq, 1);
    REQUIRE(rep.size() == 1);
    CHECK(std::abs(rep[0].points[0] - cplx(1.0, 0.0)) <= 1e-10);

    // z^2 + 1/4: the parabolic fixed point 1/2 (multiplier 1) is dropped.
    Polynomial1D par = quadratic_1d(cplx(0.25, 0.0));
    std::vector<Cycle1D> pall = find_cycles_1d(par, 1);
    REQUIRE(pall.size() >= 1);
    bool found_parabolic = false;
    for (const Cycle1D& c : pall)
        if (std::abs(c.points[0] - cplx(0.5, 0.0)) < 1e-5) {
            found_parabolic = true;
            CHECK(std::abs(c.multiplier - cplx(1.0, 0.0)) <= 1e-5);
            CHECK(!c.repelling);
        }
    CHECK(found_parabolic);
    CHECK(repelling_cycles(par, 1).empty());
}

TEST_CASE("cycle multipliers match closed forms") {
    Polynomial1D g = chebyshev();
    std::vector<Cycle1D> cycles = find_cycles_1d(g, 2);

    const Cycle1D* fixed2 = find_fixed(cycles, cplx(2.0, 0.0));
    REQUIRE(fixed2 != nullptr);
    CHECK(std::abs(fixed2->multiplier - cplx(4.0, 0.0)) <= 1e-9);
    CHECK(fixed2->repelling);

    const Cycle1D* fixedm1 = find_fixed(cycles, cplx(-1.0, 0.0));
    REQUIRE(fixedm1 != nullptr);
    CHECK(std::abs(fixedm1->multiplier - cplx(-2.0, 0.0)) <= 1e-9);

    // Period 2: {(-1 +- sqrt 5)/2}, multiplier 4 x0 x1 = -4.
    for (const Cycle1D& c : cycles)
        if (c.period == 2)
            CHECK(std::abs(c.multiplier - cplx(-4.0, 0.0)) <= 1e-8);

    // z^2 + 1/4, period 2: multiplier 4 (c + 1) = 5.
    std::vector<Cycle1D> par = find_cycles_1d(quadratic_1d(cplx(0.25, 0.0)), 2);
    bool saw2 = false;
    for (const Cycle1D& c : par)
        if (c.period == 2) {
            saw2 = true;
            CHECK(std::abs(c.multiplier - cplx(5.0, 0.0)) <= 1e-8);
            CHECK(c.repelling);
        }
    CHECK(saw2);
}

TEST_CASE("itineraries reach individual cycles directly") {
    Polynomial1D g = chebyshev();

    // The two fixed points carry the two constant itineraries.
    std::set<int> roots;
    for (int s : {0, 1}) {
        Cycle1D c = cycle_from_itinerary(g, {s});
        REQUIRE(c.period == 1);
        if (std::abs(c.points[0] - cplx(2.0, 0.0)) < 1e-9)
            roots.insert(2);
        else if (std::abs(c.points[0] - cplx(-1.0, 0.0)) < 1e-9)
            roots.insert(-1);
    }
    CHECK(roots == std::set<int>{-1, 2});

    Cycle1D two = cycle_from_itinerary(g, {0, 1});
    CHECK(two.period == 2);
    CHECK(std::abs(two.multiplier - cplx(-4.0, 0.0)) <= 1e-8);
    CHECK(two.repelling);
    CHECK(two.residual <= 1e-9);

    // A word that collapses onto a shorter cycle is rejected.
    CHECK_THROWS(cycle_from_itinerary(g, {0, 0}));
}

TEST_CASE("deep itinerary cycles stay exact: |multiplier| = 2^n for z^2 - 2") {
    // On the Chebyshev interval, (g^n)'(2 cos t) = 2^n sin(2^n t)/sin t,
    // which at a period-n angle has modulus exactly 2^n.
    Polynomial1D g = chebyshev();
    std::vector<int> word(12, 1);
    word[0] = 0;
    word[11] = 0;
    Cycle1D c = cycle_from_itinerary(g, word);
    CHECK(c.period == 12);
    CHECK(c.repelling);
    CHECK(c.residual <= 1e-9);
    // The twelve polished points carry ~1e-12 position error each; the
    // product of twelve derivatives keeps a few parts in 1e8.
    CHECK(std::abs(c.multiplier) ==
          doctest::Approx(4096.0).epsilon(1e-6));
}

TEST_CASE("Koenigs linearizer at the Chebyshev fixed point 2") {
    Polynomial1D g = chebyshev();
    std::vector<Cycle1D> cycles = find_cycles_1d(g, 1);
    const Cycle1D* fixed2 = find_fixed(cycles, cplx(2.0, 0.0));
    REQUIRE(fixed2 != nullptr);

    Linearizer1D lin = linearizer_1d(g, *fixed2);
    CHECK(std::abs(lin.multiplier - cplx(4.0, 0.0)) <= 1e-9);
    CHECK(lin.valid_radius > 0.0);
    CHECK(lin.residual_bound <= 1e-9);
    CHECK(lin.cross_check_err <= 1e-8);

    // phi(zeta) = 2 cosh(sqrt(2 zeta) / ...): 2 + zeta + zeta^2/12 +
    // zeta^3/360 in the phi'(0) = 1 normalization.
    REQUIRE(lin.order() >= 3);
    CHECK(std::abs(lin.phi.c[0] - cplx(2.0, 0.0)) <= 1e-10);
    CHECK(std::abs(lin.phi.c[1] - cplx(1.0, 0.0)) <= 1e-10);
    CHECK(std::abs(lin.phi.c[2] - cplx(1.0 / 12.0, 0.0)) <= 1e-10);
    CHECK(std::abs(lin.phi.c[3] - cplx(1.0 / 360.0, 0.0)) <= 1e-10);

    // The recursion-built series agrees with the pull-back direct limit.
    CHECK(direct_limit_disagreement(g, lin, 0.5 * lin.valid_radius) <= 1e-8);

    // Spot check of one direct-limit evaluation against the series.  The
    // depth is a sweet spot, not a monotone knob: too shallow and the limit
    // has not converged, too deep and the orbit escapes the linearization
    // neighborhood, so keep zeta small and the depth moderate.
    cplx zeta(0.11, 0.07);
    cplx series_val = lin.eval(zeta);
    cplx direct_val = koenigs_limit_eval(g, lin, zeta, 12);
    CHECK(std::abs(series_val - direct_val) <=
          1e-8 * std::max(1.0, std::abs(series_val)));
}

TEST_CASE("level normalization and per-step multipliers in one dimension") {
    Polynomial1D g = chebyshev();
    std::vector<Cycle1D> cycles = find_cycles_1d(g, 1);

    for (auto [z, step] : std::map<double, double>{{2.0, 4.0}, {-1.0, 2.0}}) {
        const Cycle1D* cyc = find_fixed(cycles, cplx(z, 0.0));
        REQUIRE(cyc != nullptr);
        Linearizer1D lin = linearizer_1d(g, *cyc);
        NormalizationRecord rec = normalize_1d(g, lin, 1.0);
        CHECK(lin.normalized);
        CHECK(rec.achieved == doctest::Approx(1.0).epsilon(1e-9));

        StepMultiplier sm = step_multiplier_1d(g, lin, lin);
        CHECK(sm.modulus == doctest::Approx(step).epsilon(1e-6));
        CHECK(sm.fd_modulus == doctest::Approx(sm.modulus).epsilon(1e-6));
    }
}

TEST_CASE("Chebyshev certificate through period 4") {
    Polynomial1D g = chebyshev();
    std::vector<Cycle1D> rep = repelling_cycles(g, 4);
    CHECK(rep.size() == 8);  // 2 + 1 + 2 + 3 necklaces

    Certify1DResult res = certify_1d(g, rep);
    CHECK(res.cert.verdict == "PASS");
    CHECK(res.cert.exclusions == 0);
    CHECK(res.cert.kappa == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(res.cert.beta == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.cert.C == doctest::Approx(2.0).epsilon(1e-9));

    for (const CyclePointData1D& pt : res.points) {
        if (pt.excluded || !pt.step.ok) continue;
        double want = std::abs(pt.point - cplx(2.0, 0.0)) < 1e-6 ? 4.0 : 2.0;
        CHECK(pt.step.mult.modulus == doctest::Approx(want).epsilon(1e-6));
    }
    for (const OrbitAudit& a : res.orbits) CHECK(a.product_rel_err <= 1e-6);
}

TEST_CASE("semi-hyperbolicity verdicts across the quadratic corpus") {
    SemiHypParams sp;
    sp.period_bound = 4;  // parabolic scan depth; enough for these maps

    SUBCASE("z^2 - 2: yes, critical orbit lands on a repelling fixed point") {
        SemiHypVerdict v = semi_hyperbolic_verdict(chebyshev(), sp);
        CHECK(v.verdict == "YES");
        CHECK(!v.parabolic_found);
        REQUIRE(v.critical.size() == 1);
        CHECK(!v.critical[0].recurrent);
        CHECK(v.eta_fit_ok);
        CHECK(v.eta > 0.0);
    }
    SUBCASE("z^2: yes, critical point sits in an attracting basin") {
        SemiHypVerdict v =
            semi_hyperbolic_verdict(quadratic_1d(cplx(0.0, 0.0)), sp);
        CHECK(v.verdict == "YES");
        REQUIRE(v.critical.size() == 1);
        CHECK(v.critical[0].attracted);
    }
    SUBCASE("z^2 + i: yes, strictly pre-periodic critical orbit") {
        SemiHypVerdict v =
            semi_hyperbolic_verdict(quadratic_1d(cplx(0.0, 1.0)), sp);
        CHECK(v.verdict == "YES");
        REQUIRE(v.critical.size() == 1);
        CHECK(!v.critical[0].recurrent);
        CHECK(v.critical[0].min_distance ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("z^2 + 1/4: no, parabolic fixed point") {
        SemiHypVerdict v =
            semi_hyperbolic_verdict(quadratic_1d(cplx(0.25, 0.0)), sp);
        CHECK(v.verdict == "NO");
        CHECK(v.parabolic_found);
        CHECK(v.parabolic_witness.period == 1);
        CHECK(std::abs(v.parabolic_witness.multiplier - cplx(1.0, 0.0)) <=
              1e-5);
    }
}
