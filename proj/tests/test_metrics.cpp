#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "qx/metrics.hpp"

using namespace qx;

namespace {

HenonMap horseshoe() {
    return quadratic_henon(cplx(-6.0, 0.0), cplx(0.1, 0.0));
}

// Shared level-1 certification of the period <= 2 sample (4 points).
const CertifyResult& result2() {
    static CertifyResult res = [] {
        HenonMap m = horseshoe();
        SaddleCatalog cat = find_periodic_orbits(m, 2);
        return certify_theorem12(m, cat, CertifyParams{});
    }();
    return res;
}

const SaddlePointData& neg_fixed_point() {
    for (const SaddlePointData& pt : result2().points)
        if (pt.period == 1 && !pt.excluded && pt.point.x.real() < 0.0)
            return pt;
    REQUIRE(false);
    return result2().points.front();
}

GreenFn green_of(const HenonMap& m) {
    return [m](const ComplexPoint& q) { return green_plus(m, q); };
}

constexpr double kLambdaNeg = 3.8952840152569412;

}  // namespace

TEST_CASE("interval arithmetic behaves like sets") {
    Ival a{1.0, 2.0}, b{0.5, 0.75};
    Ival s = a + b;
    CHECK(s.lo == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(s.hi == doctest::Approx(2.75).epsilon(1e-15));
    Ival d = a - b;
    CHECK(d.lo == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(d.hi == doctest::Approx(1.5).epsilon(1e-15));

    CHECK(a.width() == doctest::Approx(1.0));
    CHECK(a.contains(1.5));
    CHECK(!a.contains(2.5));
    CHECK(a.overlaps(Ival{1.9, 3.0}));
    CHECK(!a.overlaps(Ival{2.1, 3.0}));

    CHECK(dist_zero(Ival{-1.0, 2.0}) == 0.0);
    CHECK(dist_zero(Ival{0.5, 3.0}) == doctest::Approx(0.5));
    CHECK(dist_zero(Ival{-3.0, -1.0}) == doctest::Approx(1.0));
}

TEST_CASE("metric interval at the fixed point has the Koebe shape") {
    HenonMap m = horseshoe();
    const SaddlePointData& pt = neg_fixed_point();
    MetricInterval mi = metric_L_interval(m, pt.psi, green_of(m), 1.0);

    // psi is normalized to m(1) = t = 1, so the level-1 inradius is 1 and
    // the density interval is [1/4, 1].
    CHECK(mi.L == 1.0);
    CHECK(mi.inradius == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mi.lower == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(mi.upper == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mi.upper == doctest::Approx(4.0 * mi.lower).epsilon(1e-12));
    // The ray estimate quantizes the boundary by the ray fan, so it only
    // matches the grid inradius to the fan's angular resolution.
    CHECK(mi.ray_inradius == doctest::Approx(mi.inradius).epsilon(1e-2));
    CHECK(mi.star_ok);
    CHECK(mi.rays >= 32);
}

TEST_CASE("level inradius scales by the multiplier across one degree step") {
    HenonMap m = horseshoe();
    const SaddlePointData& pt = neg_fixed_point();
    MetricInterval m1 = metric_L_interval(m, pt.psi, green_of(m), 1.0);
    MetricInterval m2 = metric_L_interval(m, pt.psi, green_of(m), 2.0);
    // m(|lambda| r) = d m(r) at a fixed point, so delta(2) = |lambda| delta(1).
    CHECK(m2.inradius / m1.inradius ==
          doctest::Approx(kLambdaNeg).epsilon(1e-6));
}

TEST_CASE("level-change relation: overlap and eigenvalue recovery") {
    HenonMap m = horseshoe();
    const SaddlePointData& pt = neg_fixed_point();
    LevelRelationCheck lr = relation_level_change(
        m, pt.psi, pt.psi, kLambdaNeg, green_of(m), 1.0);
    CHECK(lr.overlap);
    CHECK(lr.at_x.overlaps(lr.at_fx));
    CHECK(lr.inradius_ratio == doctest::Approx(kLambdaNeg).epsilon(1e-6));

    // Along the period-2 orbit with the measured step modulus.
    const CertifyResult& res = result2();
    const SaddlePointData* p0 = nullptr;
    const SaddlePointData* p1 = nullptr;
    for (const SaddlePointData& pt2 : res.points) {
        if (pt2.period != 2 || pt2.excluded) continue;
        (pt2.point_index == 0 ? p0 : p1) = &pt2;
    }
    REQUIRE(p0 != nullptr);
    REQUIRE(p1 != nullptr);
    REQUIRE(p0->step.ok);
    LevelRelationCheck lr2 = relation_level_change(
        m, p0->psi, p1->psi, p0->step.mult.modulus, green_of(m), 1.0);
    CHECK(lr2.overlap);
    CHECK(lr2.inradius_ratio ==
          doctest::Approx(p0->step.mult.modulus).epsilon(1e-6));
}

TEST_CASE("hash cocycle telescopes to the orbit multiplier") {
    HenonMap m = horseshoe();
    const CertifyResult& res = result2();
    const OrbitAudit* audit = nullptr;
    for (const OrbitAudit& a : res.orbits)
        if (a.period == 2) audit = &a;
    REQUIRE(audit != nullptr);
    int idx = audit->orbit_index;

    CocycleSample cs =
        cocycle_series(m, res, idx, MetricFamily::Hash, 1.0, 2);
    REQUIRE(cs.steps.size() == 2);
    for (const CocycleStep& st : cs.steps) {
        CHECK(st.ok);
        CHECK(st.value.width() == 0.0);  // degenerate by definition
    }
    // The telescoped sum is log of the step product, which matches the
    // orbit multiplier to the audited product accuracy (<= 1e-6 relative).
    double total = std::log(audit->eig_unstable_mod);
    CHECK(cs.partial.back().lo == doctest::Approx(total).epsilon(1e-6));

    // Two loops around the cycle double the telescoped sum.
    CocycleSample cs2 =
        cocycle_series(m, res, idx, MetricFamily::Hash, 1.0, 4);
    CHECK(cs2.partial.back().lo ==
          doctest::Approx(2.0 * total).epsilon(1e-6));
}

TEST_CASE("level cocycle brackets the multiplier over a closed orbit") {
    HenonMap m = horseshoe();
    const CertifyResult& res = result2();

    // At the fixed point a single step is a pure level change whose interval
    // is centered on log |lambda| with Koebe width log 16.
    int fp_idx = neg_fixed_point().orbit_index;
    CocycleSample c1 =
        cocycle_series(m, res, fp_idx, MetricFamily::LevelL, 1.0, 1);
    REQUIRE(c1.steps.size() == 1);
    const Ival& v = c1.steps[0].value;
    CHECK(v.contains(std::log(kLambdaNeg)));
    CHECK((v.lo + v.hi) / 2.0 ==
          doctest::Approx(std::log(kLambdaNeg)).epsilon(1e-6));
    CHECK(v.width() == doctest::Approx(std::log(16.0)).epsilon(1e-6));

    // Over a full period the coboundary telescopes away, so the interval sum
    // must bracket the hash total log |eig|.
    const OrbitAudit* audit = nullptr;
    for (const OrbitAudit& a : res.orbits)
        if (a.period == 2) audit = &a;
    REQUIRE(audit != nullptr);
    CocycleSample c2 = cocycle_series(m, res, audit->orbit_index,
                                      MetricFamily::LevelL, 1.0, 2);
    CHECK(c2.partial.back().contains(std::log(audit->eig_unstable_mod)));
}

TEST_CASE("coboundary residual: zero for consistent data, positive when "
          "perturbed") {
    auto deg = [](double v) { return Ival{v, v}; };
    std::vector<Ival> c1 = {deg(1.0), deg(2.0)};
    std::vector<Ival> a12 = {deg(0.3), deg(0.7)};
    // c2 = c1 - (a12 o f - a12), computed by hand with cyclic wrap.
    std::vector<Ival> c2 = {deg(1.0 - 0.4), deg(2.0 + 0.4)};
    CHECK(coboundary_residual(c1, c2, a12) <= 1e-15);

    std::vector<Ival> broken = c2;
    broken[1] = deg(2.4 + 0.05);
    CHECK(coboundary_residual(c1, broken, a12) ==
          doctest::Approx(0.05).epsilon(1e-12));

    // Interval slack absorbs small inconsistencies.
    std::vector<Ival> slack = {Ival{0.55, 0.7}, Ival{2.3, 2.5}};
    CHECK(coboundary_residual(c1, slack, a12) == 0.0);
}

TEST_CASE("strip and half-line comparison bounds") {
    HenonMap m = horseshoe();
    const SaddlePointData& pt = neg_fixed_point();

    StripBound sb = strip_cocycle_bound(m, pt.psi, 1.0, false);
    CHECK(!sb.half_line);
    CHECK(sb.bound == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(sb.phi_deriv0 == doctest::Approx(4.0 / 3.14159265358979323846)
                               .epsilon(1e-9));
    CHECK(sb.composite_target == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sb.composite_deriv == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(!sb.map_formula.empty());

    StripBound hb = strip_cocycle_bound(m, pt.psi, 1.0, true);
    CHECK(hb.half_line);
    CHECK(hb.bound == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
    CHECK(hb.composite_target == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(hb.composite_deriv == doctest::Approx(0.25).epsilon(1e-10));
}
