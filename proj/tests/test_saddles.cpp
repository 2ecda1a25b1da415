#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "qx/saddles.hpp"

using namespace qx;

namespace {

HenonMap horseshoe() {
    return quadratic_henon(cplx(-6.0, 0.0), cplx(0.1, 0.0));
}

const SaddleCatalog& catalog4() {
    static SaddleCatalog cat = find_periodic_orbits(horseshoe(), 4);
    return cat;
}

}  // namespace

TEST_CASE("horseshoe catalog: 2^n points fixed by f^n for n <= 4") {
    const SaddleCatalog& cat = catalog4();
    CHECK(cat.status == "ok");
    CHECK(cat.period_max == 4);

    // Exact-period point counts (Moebius ladder of 2^n).
    CHECK(cat.point_count(1) == 2);
    CHECK(cat.point_count(2) == 2);
    CHECK(cat.point_count(3) == 6);
    CHECK(cat.point_count(4) == 12);

    // Fixed points of f^n = points whose exact period divides n.
    for (int n = 1; n <= 4; ++n) {
        int fixed = 0;
        for (int d = 1; d <= n; ++d)
            if (n % d == 0) fixed += cat.point_count(d);
        CHECK(fixed == (1 << n));
    }
}

TEST_CASE("every horseshoe orbit is a saddle with determinant-consistent "
          "eigenvalues") {
    const SaddleCatalog& cat = catalog4();
    for (const PeriodicOrbit& o : cat.orbits) {
        CHECK(o.classification == OrbitClass::Saddle);
        CHECK(std::abs(o.eig_unstable) > 1.0);
        CHECK(std::abs(o.eig_stable) < 1.0);
        CHECK(o.residual <= 1e-9);

        // det Df = a everywhere, so |l_u l_s| = |a|^period.
        double want = std::pow(0.1, o.period);
        double got = std::abs(o.eig_unstable * o.eig_stable);
        CHECK(got == doctest::Approx(want).epsilon(1e-8));
    }
    CHECK(cat.saddles().size() == cat.orbits.size());
}

TEST_CASE("catalog fixed points and eigenvalues match the closed form") {
    const SaddleCatalog& cat = catalog4();
    std::vector<const PeriodicOrbit*> fixed;
    for (const PeriodicOrbit& o : cat.orbits)
        if (o.period == 1) fixed.push_back(&o);
    REQUIRE(fixed.size() == 2);

    double disc = std::sqrt(25.21);
    std::set<int> seen;
    for (const PeriodicOrbit* o : fixed) {
        const ComplexPoint& q = o->points[0];
        CHECK(std::abs(q.x - q.y) < 1e-10);
        bool plus = std::abs(q.x - cplx((1.1 + disc) / 2.0, 0.0)) < 1e-9;
        bool minus = std::abs(q.x - cplx((1.1 - disc) / 2.0, 0.0)) < 1e-9;
        CHECK((plus || minus));
        seen.insert(plus ? 1 : 0);

        // Eigenvalues of Df at (x, x) solve l^2 - 2xl + a = 0.
        for (cplx l : {o->eig_unstable, o->eig_stable})
            CHECK(std::abs(l * l - 2.0 * q.x * l + 0.1) < 1e-8);
    }
    CHECK(seen.size() == 2);  // both roots present
}

TEST_CASE("orbit points advance under the map in canonical order") {
    const SaddleCatalog& cat = catalog4();
    for (const PeriodicOrbit& o : cat.orbits) {
        REQUIRE(static_cast<int>(o.points.size()) == o.period);
        HenonMap m = horseshoe();
        for (int j = 0; j < o.period; ++j) {
            const ComplexPoint& next = o.points[(j + 1) % o.period];
            CHECK(dist_2(evaluate(m, o.points[j]), next) <= 1e-8);
        }
    }
}

TEST_CASE("orbits are sorted by period and free of rotated duplicates") {
    const SaddleCatalog& cat = catalog4();
    for (std::size_t i = 1; i < cat.orbits.size(); ++i)
        CHECK(cat.orbits[i - 1].period <= cat.orbits[i].period);

    for (std::size_t i = 0; i < cat.orbits.size(); ++i) {
        for (std::size_t j = i + 1; j < cat.orbits.size(); ++j) {
            if (cat.orbits[i].period != cat.orbits[j].period) continue;
            // Distinct orbits of equal period must separate somewhere.
            double sep = 1e99;
            for (int r = 0; r < cat.orbits[i].period; ++r) {
                double worst = 0.0;
                for (int s = 0; s < cat.orbits[i].period; ++s) {
                    int t = (s + r) % cat.orbits[i].period;
                    worst = std::max(worst, dist_2(cat.orbits[i].points[s],
                                                   cat.orbits[j].points[t]));
                }
                sep = std::min(sep, worst);
            }
            CHECK(sep > 1e-6);
        }
    }
}

TEST_CASE("newton polishes a perturbed seed back onto the cycle") {
    HenonMap m = horseshoe();
    const SaddleCatalog& cat = catalog4();
    const PeriodicOrbit* o3 = nullptr;
    for (const PeriodicOrbit& o : cat.orbits)
        if (o.period == 3) { o3 = &o; break; }
    REQUIRE(o3 != nullptr);

    SaddleSearchParams sp;
    ComplexPoint seed = o3->points[0];
    seed.x += cplx(1e-4, 2e-5);
    seed.y += cplx(-3e-5, 1e-4);
    auto polished = newton_periodic_point(m, 3, seed, sp);
    REQUIRE(polished.has_value());
    double best = 1e99;
    for (const ComplexPoint& p : o3->points)
        best = std::min(best, dist_2(*polished, p));
    CHECK(best <= 1e-9);
}

TEST_CASE("classify_orbit reproduces the catalog classification") {
    HenonMap m = horseshoe();
    const SaddleCatalog& cat = catalog4();
    const PeriodicOrbit& o = cat.orbits.front();
    PeriodicOrbit re = classify_orbit(m, o.points[0], o.period, 1e-8);
    CHECK(re.classification == OrbitClass::Saddle);
    CHECK(std::abs(re.eig_unstable - o.eig_unstable) <=
          1e-8 * std::abs(o.eig_unstable));
    CHECK(std::abs(re.eig_stable - o.eig_stable) <= 1e-8);
}

TEST_CASE("empty period range reports an insufficient sample") {
    SaddleCatalog cat = find_periodic_orbits(horseshoe(), 0);
    CHECK(cat.orbits.empty());
    CHECK(cat.status.find("INSUFFICIENT") != std::string::npos);
}

TEST_CASE("orbit class names are human-readable") {
    CHECK(to_string(OrbitClass::Saddle) == "saddle");
    CHECK(to_string(OrbitClass::Attracting) == "attracting");
    CHECK(to_string(OrbitClass::Repelling) == "repelling");
    CHECK(to_string(OrbitClass::Indifferent) == "indifferent");
}
