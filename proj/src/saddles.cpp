#include "qx/saddles.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace qx {

std::string to_string(OrbitClass c) {
    switch (c) {
        case OrbitClass::Saddle: return "saddle";
        case OrbitClass::Attracting: return "attracting";
        case OrbitClass::Repelling: return "repelling";
        case OrbitClass::Indifferent: return "indifferent";
    }
    return "?";
}

std::vector<const PeriodicOrbit*> SaddleCatalog::saddles() const {
    std::vector<const PeriodicOrbit*> out;
    for (const auto& o : orbits)
        if (o.classification == OrbitClass::Saddle) out.push_back(&o);
    return out;
}

int SaddleCatalog::point_count(int period) const {
    int n = 0;
    for (const auto& o : orbits)
        if (o.period == period) n += period;
    return n;
}

namespace {

// Lexicographic order on (re x, im x, re y, im y) with a quantization snap
// so that ties caused by floating noise do not flip representatives.
bool point_less(const ComplexPoint& p, const ComplexPoint& q) {
    auto key = [](const ComplexPoint& r) {
        return std::array<double, 4>{r.x.real(), r.x.imag(), r.y.real(),
                                     r.y.imag()};
    };
    auto a = key(p), b = key(q);
    for (int i = 0; i < 4; ++i) {
        if (std::abs(a[i] - b[i]) > 1e-11) return a[i] < b[i];
    }
    return false;
}

std::vector<ComplexPoint> canonical_rotation(std::vector<ComplexPoint> pts) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < pts.size(); ++j)
        if (point_less(pts[j], pts[best])) best = j;
    std::rotate(pts.begin(), pts.begin() + best, pts.end());
    return pts;
}

double orbit_distance(const PeriodicOrbit& a, const PeriodicOrbit& b) {
    if (a.period != b.period) return 1e300;
    // Minimum over cyclic alignments: the canonical rotation of two copies
    // of one orbit can start at different points when the lex order has a
    // near-tie, so a fixed-alignment comparison would keep duplicates.
    double best = 1e300;
    for (int off = 0; off < a.period; ++off) {
        double d = 0.0;
        for (int j = 0; j < a.period; ++j)
            d = std::max(d, norm_sup(a.points[static_cast<std::size_t>(
                                         (j + off) % a.period)] -
                                     b.points[static_cast<std::size_t>(j)]));
        best = std::min(best, d);
    }
    return best;
}

}  // namespace

std::optional<ComplexPoint> newton_periodic_point(const HenonMap& m, int n,
                                                  ComplexPoint seed,
                                                  const SaddleSearchParams& sp) {
    ComplexPoint q = seed;
    double blowup = 4.0 * escape_radius(m);
    for (int it = 0; it < sp.newton_max_iter; ++it) {
        if (norm_sup(q) > blowup) return std::nullopt;
        Mat2 dfn = Mat2::identity();
        ComplexPoint p = q;
        for (int j = 0; j < n; ++j) {
            dfn = jacobian(m, p) * dfn;
            p = evaluate(m, p);
        }
        ComplexPoint fval = p - q;
        double res = norm_sup(fval);
        if (res <= sp.newton_tol) return q;
        Mat2 j = dfn;
        j.a -= 1.0;
        j.d -= 1.0;
        if (std::abs(j.det()) < 1e-290) return std::nullopt;
        ComplexPoint delta = solve2(j, fval);
        q = q - delta;
        // Declare convergence when the step stagnates at rounding level.
        if (norm_sup(delta) < 1e-15 * (1.0 + norm_sup(q))) {
            ComplexPoint chk = iterate(m, q, n) - q;
            if (norm_sup(chk) <= sp.accept_tol) return q;
            return std::nullopt;
        }
    }
    ComplexPoint chk = iterate(m, q, n) - q;
    if (norm_sup(chk) <= sp.accept_tol) return q;
    return std::nullopt;
}

PeriodicOrbit classify_orbit(const HenonMap& m, const ComplexPoint& start,
                             int period, double indifferent_band) {
    PeriodicOrbit o;
    o.period = period;
    o.points.resize(period);
    o.points[0] = start;
    for (int j = 1; j < period; ++j)
        o.points[j] = evaluate(m, o.points[j - 1]);
    o.points = canonical_rotation(std::move(o.points));
    o.residual = norm_sup(evaluate(m, o.points.back()) - o.points[0]);

    Eigen2 eg = eigen2(jacobian_product(m, o.points[0], period));
    o.eig_unstable = eg.lambda1;
    o.eig_stable = eg.lambda2;
    double m1 = std::abs(eg.lambda1), m2 = std::abs(eg.lambda2);
    double band = indifferent_band;
    if (std::abs(m1 - 1.0) <= band || std::abs(m2 - 1.0) <= band)
        o.classification = OrbitClass::Indifferent;
    else if (m1 > 1.0 && m2 < 1.0)
        o.classification = OrbitClass::Saddle;
    else if (m1 < 1.0)
        o.classification = OrbitClass::Attracting;
    else
        o.classification = OrbitClass::Repelling;
    return o;
}

SaddleCatalog find_periodic_orbits(const HenonMap& m, int n_max,
                                   const SaddleSearchParams& sp) {
    m.validate();
    SaddleCatalog cat;
    cat.period_max = n_max;
    if (n_max <= 0) {
        cat.status = "INSUFFICIENT_SAMPLE: empty period range";
        return cat;
    }
    double R = escape_radius(m);
    auto rng = seeded_rng(sp.seed, "saddle-seeds");
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::vector<ComplexPoint> seeds;
    seeds.reserve(static_cast<std::size_t>(sp.grid_per_axis) * sp.grid_per_axis);
    for (int i = 0; i < sp.grid_per_axis; ++i) {
        for (int j = 0; j < sp.grid_per_axis; ++j) {
            double fx = -R + 2.0 * R * (i + 0.5) / sp.grid_per_axis;
            double fy = -R + 2.0 * R * (j + 0.5) / sp.grid_per_axis;
            cplx jit{sp.imag_jitter * unit(rng), sp.imag_jitter * unit(rng)};
            seeds.push_back({cplx{fx, 0.0} + jit, cplx{fy, 0.0} + jit});
        }
    }

    for (int n = 1; n <= n_max; ++n) {
        std::vector<ComplexPoint> extra;
        // Midpoints and images of already-found points improve coverage for
        // higher periods at no real cost.
        for (const auto& o : cat.orbits)
            for (const auto& pt : o.points) extra.push_back(pt);

        auto try_seed = [&](const ComplexPoint& s) {
            auto root = newton_periodic_point(m, n, s, sp);
            if (!root) return;
            // Primitive period: reject points that close up at a divisor.
            for (int dper = 1; dper < n; ++dper) {
                if (n % dper != 0) continue;
                if (norm_sup(iterate(m, *root, dper) - *root) < sp.dedup_tol)
                    return;
            }
            PeriodicOrbit o =
                classify_orbit(m, *root, n, sp.indifferent_band);
            if (o.residual > sp.accept_tol) return;
            for (const auto& have : cat.orbits)
                if (orbit_distance(have, o) < sp.dedup_tol) return;
            cat.orbits.push_back(std::move(o));
        };
        for (const auto& s : seeds) try_seed(s);
        for (const auto& s : extra) try_seed(s);
    }

    std::sort(cat.orbits.begin(), cat.orbits.end(),
              [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
                  if (a.period != b.period) return a.period < b.period;
                  return point_less(a.points[0], b.points[0]);
              });
    cat.status = cat.orbits.empty() ? "WARNING: no convergent seeds" : "ok";
    return cat;
}

}  // namespace qx
