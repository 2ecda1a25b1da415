#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "qx/folding.hpp"

using namespace qx;

namespace {

ComplexPoint cp(cplx x, cplx y) { return ComplexPoint{x, y}; }

const ComplexPoint kOrigin = cp(cplx(0.0, 0.0), cplx(0.0, 0.0));

// (zeta, zeta^2): tangent along x, quadratic fold along y.
TaylorJet parabola_jet() {
    return make_jet(kOrigin, {cp(cplx(1.0, 0.0), cplx(0.0, 0.0)),
                              cp(cplx(0.0, 0.0), cplx(1.0, 0.0))});
}

}  // namespace

TEST_CASE("vanishing order of explicit jets") {
    TaylorJet cubic = make_jet(
        kOrigin, {cp(cplx(0.0, 0.0), cplx(0.0, 0.0)),
                  cp(cplx(0.0, 0.0), cplx(0.0, 0.0)),
                  cp(cplx(0.5, 0.0), cplx(0.0, 0.25))});
    OrderReport r = order_of(cubic);
    CHECK(r.order == 3);
    CHECK(!r.degenerate);

    CHECK(order_of(parabola_jet()).order == 1);

    TaylorJet zero = make_jet(kOrigin, {kOrigin, kOrigin});
    CHECK(order_of(zero).degenerate);

    // The order tolerance is relative to the jet scale: a uniformly tiny
    // jet is still a jet, not a degenerate one.
    TaylorJet tiny = make_jet(
        kOrigin, {cp(cplx(1e-12, 0.0), cplx(0.0, 0.0))});
    CHECK(order_of(tiny).order == 1);
    CHECK(!order_of(tiny).degenerate);
}

TEST_CASE("projection degree counts the winding of the projected graph") {
    TaylorJet jet = parabola_jet();

    DegreeReport along_x =
        projection_degree(jet, cp(cplx(1.0, 0.0), cplx(0.0, 0.0)), 0.5);
    REQUIRE(along_x.ok);
    CHECK(along_x.degree == 1);
    CHECK(along_x.min_modulus > 0.0);

    DegreeReport along_y =
        projection_degree(jet, cp(cplx(0.0, 0.0), cplx(1.0, 0.0)), 0.5);
    REQUIRE(along_y.ok);
    CHECK(along_y.degree == 2);

    SUBCASE("degree is stable under radius choice inside the fold") {
        DegreeReport small =
            projection_degree(jet, cp(cplx(0.0, 0.0), cplx(1.0, 0.0)), 0.1);
        REQUIRE(small.ok);
        CHECK(small.degree == 2);
    }

    SUBCASE("degree is invariant under a unit phase on the direction") {
        cplx ph = std::polar(1.0, 0.7);
        DegreeReport rot =
            projection_degree(jet, cp(ph, cplx(0.0, 0.0)), 0.5);
        REQUIRE(rot.ok);
        CHECK(rot.degree == 1);
    }

    SUBCASE("a small higher-order tail cannot change the count") {
        // <jet, e_y> = zeta^2 + 0.01 zeta^3: on |zeta| = 0.5 the tail is
        // dominated, so the winding stays 2.
        TaylorJet bent = make_jet(
            kOrigin, {cp(cplx(1.0, 0.0), cplx(0.0, 0.0)),
                      cp(cplx(0.0, 0.0), cplx(1.0, 0.0)),
                      cp(cplx(0.0, 0.0), cplx(0.01, 0.0))});
        DegreeReport r =
            projection_degree(bent, cp(cplx(0.0, 0.0), cplx(1.0, 0.0)), 0.5);
        REQUIRE(r.ok);
        CHECK(r.degree == 2);
    }
}

TEST_CASE("extremal k-th coefficient over a family of jets") {
    std::vector<TaylorJet> jets = {
        make_jet(kOrigin, {cp(cplx(1.0, 0.0), cplx(0.0, 0.0)),
                           cp(cplx(0.5, 0.0), cplx(0.0, 0.0))}),
        make_jet(kOrigin, {cp(cplx(1.0, 0.0), cplx(0.0, 0.0)),
                           cp(cplx(0.0, 0.0), cplx(2.0, 0.0))}),
        make_jet(kOrigin, {cp(cplx(1.0, 0.0), cplx(0.0, 0.0)),
                           cp(cplx(0.0, 1.0), cplx(0.0, 0.0))})};

    GammaReport g2 = gamma_k(jets, 2);
    CHECK(g2.k == 2);
    CHECK(g2.gamma == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g2.metric_factor == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(!g2.stratum_mismatch);

    // No jet in the family has a third coefficient: the stratum is empty.
    GammaReport g3 = gamma_k(jets, 3);
    CHECK(g3.stratum_mismatch);
    CHECK(g3.gamma == 0.0);
}

TEST_CASE("contact order between jets through a common point") {
    SUBCASE("independent tangents are transverse") {
        TaylorJet a = make_jet(kOrigin, {cp(cplx(1.0, 0.0), cplx(0.0, 0.0))});
        TaylorJet b = make_jet(kOrigin, {cp(cplx(1.0, 0.0), cplx(1.0, 0.0))});
        TangencyReport t = tangency_order(a, b);
        CHECK(t.ok);
        CHECK(t.tau == 1);
    }

    SUBCASE("quadratic contact along a shared tangent") {
        // Both jets carry an explicit quadratic coefficient: the comparison
        // only probes orders both truncations can express, so a shorter jet
        // would stop it at the linear term.
        TaylorJet a = make_jet(
            kOrigin, {cp(cplx(1.0, 0.0), cplx(0.0, 0.0)),
                      cp(cplx(0.0, 0.0), cplx(0.0, 0.0))});
        TaylorJet b = make_jet(
            kOrigin, {cp(cplx(1.0, 0.0), cplx(0.0, 0.0)),
                      cp(cplx(0.0, 0.0), cplx(0.1, 0.0))});
        TangencyReport t = tangency_order(a, b);
        CHECK(t.ok);
        CHECK(t.tau == 2);
        CHECK(t.diff_magnitude == doctest::Approx(0.1).epsilon(1e-12));
    }

    SUBCASE("cubic contact and reparametrization invariance") {
        // Same tangent, same curvature, graphs split at zeta^3 (a carries an
        // explicit zero cubic term so that order is comparable).
        TaylorJet a = make_jet(
            kOrigin, {cp(cplx(1.0, 0.0), cplx(0.0, 0.0)),
                      cp(cplx(0.0, 0.0), cplx(0.2, 0.0)),
                      cp(cplx(0.0, 0.0), cplx(0.0, 0.0))});
        TaylorJet b = make_jet(
            kOrigin, {cp(cplx(1.0, 0.0), cplx(0.0, 0.0)),
                      cp(cplx(0.0, 0.0), cplx(0.2, 0.0)),
                      cp(cplx(0.0, 0.0), cplx(0.1, 0.0))});
        TangencyReport t = tangency_order(a, b);
        CHECK(t.ok);
        CHECK(t.tau == 3);
        CHECK(t.first_diff_index == 3);

        // b traced at double speed is the same curve: same contact order.
        TaylorJet b2 = make_jet(
            kOrigin, {cp(cplx(2.0, 0.0), cplx(0.0, 0.0)),
                      cp(cplx(0.0, 0.0), cplx(0.8, 0.0)),
                      cp(cplx(0.0, 0.0), cplx(0.8, 0.0))});
        TangencyReport t2 = tangency_order(a, b2);
        CHECK(t2.ok);
        CHECK(t2.tau == 3);
    }

    SUBCASE("identical jets coincide to truncation order") {
        TaylorJet a = parabola_jet();
        TangencyReport t = tangency_order(a, a);
        CHECK(t.germ_coincidence);
        CHECK(!t.ok);  // no finite contact order was established
    }

    SUBCASE("different base points are rejected") {
        TaylorJet a = parabola_jet();
        TaylorJet b = make_jet(cp(cplx(1.0, 0.0), cplx(0.0, 0.0)),
                               {cp(cplx(1.0, 0.0), cplx(0.0, 0.0))});
        CHECK_THROWS_AS(tangency_order(a, b), PreconditionError);
    }
}

TEST_CASE("jets lifted from unstable parametrizations keep base and "
          "coefficients") {
    UnstableParametrization psi;
    psi.base = cp(cplx(0.4, 0.0), cplx(-0.2, 0.0));
    psi.coeffs = {cp(cplx(0.6, 0.8), cplx(0.0, 0.0)),
                  cp(cplx(0.0, 0.0), cplx(0.3, 0.0))};
    psi.valid_radius = 0.5;
    TaylorJet jet = jet_of(psi);
    CHECK(dist_2(jet.base, psi.base) == 0.0);
    REQUIRE(jet.coeffs.size() == psi.coeffs.size());
    for (std::size_t i = 0; i < jet.coeffs.size(); ++i)
        CHECK(dist_2(jet.coeffs[i], psi.coeffs[i]) == 0.0);
    CHECK(order_of(jet).order == 1);
}
