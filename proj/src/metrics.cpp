#include "qx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace qx {

Ival operator+(const Ival& a, const Ival& b) { return {a.lo + b.lo, a.hi + b.hi}; }
Ival operator-(const Ival& a, const Ival& b) { return {a.lo - b.hi, a.hi - b.lo}; }

double dist_zero(const Ival& a) {
    if (a.lo > 0.0) return a.lo;
    if (a.hi < 0.0) return -a.hi;
    return 0.0;
}

MetricInterval metric_L_interval(const HenonMap& m,
                                 const UnstableParametrization& psi,
                                 const GreenFn& green, double L,
                                 const MetricParams& mp) {
    if (L <= 0.0) throw PreconditionError("metric level L must be positive");
    GreenAlong g = green_along(m, psi, green);
    const double cap = extended_capacity(psi);

    MetricInterval mi;
    mi.L = L;
    mi.rays = mp.rays;
    // The inradius of the component of {G o psi < L} containing 0 equals the
    // first level-crossing radius of the circle max m(r) (the r-disk sits in
    // the component exactly while m(r) < L), solved by bisection.
    mi.inradius =
        solve_m_radius(g, L, std::min(1.0, 0.5 * cap), cap, mp.solve_rel_tol,
                       mp.mf);
    mi.lower = 1.0 / (4.0 * mi.inradius);
    mi.upper = 1.0 / mi.inradius;

    // 64-ray first-crossing sweep: cheap star-shape / connectivity evidence.
    // Rays are capped at a few inradii -- a ray may wander through the zero
    // set of G much farther out, which is irrelevant to the minimum.
    double ray_cap = std::min(cap, 8.0 * mi.inradius);
    double best = std::numeric_limits<double>::infinity();
    int crossed = 0;
    for (int k = 0; k < mp.rays; ++k) {
        double th = 2.0 * M_PI * k / mp.rays;
        cplx dir = std::polar(1.0, th);
        double lo = 0.5 * mi.inradius, hi = lo;
        bool found = false;
        while (hi < ray_cap) {
            hi = std::min(hi * 1.25, ray_cap);
            if (g(hi * dir).value >= L) {
                found = true;
                break;
            }
            lo = hi;
        }
        if (!found) continue;
        while (hi - lo > mp.ray_tol * hi) {
            double mid = 0.5 * (lo + hi);
            (g(mid * dir).value < L ? lo : hi) = mid;
        }
        best = std::min(best, 0.5 * (lo + hi));
        ++crossed;
    }
    mi.ray_inradius = crossed > 0 ? best : ray_cap;

    // Circular sweep at delta/2: one circle max, must stay below the level.
    mi.star_ok =
        circle_max_green(g, 0.5 * mi.inradius, mp.mf).value < L;
    return mi;
}

LevelRelationCheck relation_level_change(const HenonMap& m,
                                         const UnstableParametrization& psi_x,
                                         const UnstableParametrization& psi_fx,
                                         double lambda_mod, const GreenFn& green,
                                         double L, const MetricParams& mp) {
    MetricInterval at_x = metric_L_interval(m, psi_x, green, L, mp);
    MetricInterval at_fx =
        metric_L_interval(m, psi_fx, green, m.degree() * L, mp);
    LevelRelationCheck chk;
    chk.at_x = {at_x.lower, at_x.upper};
    // ||Df v||^(dL)_{fx} with Df v = lambda_x psi_fx'(0).
    chk.at_fx = {lambda_mod * at_fx.lower, lambda_mod * at_fx.upper};
    chk.overlap = chk.at_x.overlaps(chk.at_fx);
    chk.inradius_ratio = at_fx.inradius > 0.0 && at_x.inradius > 0.0
                             ? at_fx.inradius / at_x.inradius
                             : 0.0;
    return chk;
}

CocycleSample cocycle_series(const HenonMap& m, const CertifyResult& res,
                             int orbit_index, MetricFamily family, double L,
                             int n_steps, const MetricParams& mp) {
    if (n_steps < 1) throw PreconditionError("cocycle_series: n_steps >= 1");
    // Collect the points of the requested orbit in cycle order.
    std::vector<const SaddlePointData*> cyc;
    for (const auto& pt : res.points)
        if (pt.orbit_index == orbit_index) cyc.push_back(&pt);
    if (cyc.empty())
        throw PreconditionError("cocycle_series: orbit index not in sample");
    std::sort(cyc.begin(), cyc.end(),
              [](const SaddlePointData* a, const SaddlePointData* b) {
                  return a->point_index < b->point_index;
              });
    const int n = static_cast<int>(cyc.size());
    GreenFn green = [&m](const ComplexPoint& q) { return green_plus(m, q); };

    CocycleSample cs;
    cs.family = family;
    cs.L = L;
    // Metric intervals are per cycle point; cache across wrapped steps.
    std::vector<bool> have(n, false);
    std::vector<Ival> cached(n);
    for (int j = 0; j < n_steps; ++j) {
        const SaddlePointData& pt = *cyc[j % n];
        CocycleStep step;
        step.index = j;
        if (pt.excluded || !pt.step.ok) {
            step.ok = false;
            cs.truncated = true;
            cs.steps.push_back(step);
            break;
        }
        if (family == MetricFamily::Hash) {
            double v = std::log(pt.step.mult.modulus);
            step.value = {v, v};
        } else {
            try {
                if (!have[j % n]) {
                    MetricInterval at_L =
                        metric_L_interval(m, pt.psi, green, L, mp);
                    MetricInterval at_Ld = metric_L_interval(
                        m, pt.psi, green, L / m.degree(), mp);
                    // c^(L)(x,1) = log||v||^(L/d)_x - log||v||^(L)_x.
                    cached[j % n] = {
                        std::log(at_Ld.lower) - std::log(at_L.upper),
                        std::log(at_Ld.upper) - std::log(at_L.lower)};
                    have[j % n] = true;
                }
                step.value = cached[j % n];
            } catch (const CapacityError&) {
                step.ok = false;
                cs.truncated = true;
                cs.steps.push_back(step);
                break;
            }
        }
        cs.steps.push_back(step);
        Ival prev = cs.partial.empty() ? Ival{0.0, 0.0} : cs.partial.back();
        cs.partial.push_back(prev + step.value);
    }
    return cs;
}

double coboundary_residual(const std::vector<Ival>& c1,
                           const std::vector<Ival>& c2,
                           const std::vector<Ival>& a12) {
    if (c1.size() != c2.size() || a12.size() < c1.size() || c1.empty())
        throw PreconditionError("coboundary_residual: mismatched series");
    const size_t n = a12.size();
    double worst = 0.0;
    for (size_t j = 0; j < c1.size(); ++j) {
        Ival lhs = c1[j] - c2[j];
        Ival rhs = a12[(j + 1) % n] - a12[j % n];
        worst = std::max(worst, dist_zero(lhs - rhs));
    }
    return worst;
}

namespace {

cplx strip_map(cplx z) {  // disk -> strip {|Im| < 1}
    return (2.0 / M_PI) * std::log((1.0 + z) / (1.0 - z));
}
cplx strip_map_inv(cplx w) { return std::tanh(M_PI * w / 4.0); }

// Richardson-extrapolated central difference at 0.
template <typename F>
double deriv0(F&& f, double h) {
    auto central = [&](double hh) {
        return ((f(cplx{hh, 0.0}) - f(cplx{-hh, 0.0})) / (2.0 * hh)).real();
    };
    double d1 = central(h), d2 = central(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

StripBound strip_cocycle_bound(const HenonMap& m,
                               const UnstableParametrization& psi, double L,
                               bool half_line) {
    if (!m.real_flag)
        throw PreconditionError("strip bound: map must be flagged real");
    auto imag_small = [](cplx v) {
        return std::abs(v.imag()) <= 1e-10 * std::max(1.0, std::abs(v));
    };
    if (!imag_small(psi.base.x) || !imag_small(psi.base.y))
        throw PreconditionError("strip bound: base point is not real");
    for (const auto& c : psi.coeffs)
        if (!imag_small(c.x) || !imag_small(c.y))
            throw PreconditionError(
                "strip bound: parametrization is not real-symmetric");

    const int d = m.degree();
    StripBound sb;
    sb.half_line = half_line;
    sb.L = L;
    sb.phi_deriv0 = deriv0(strip_map, 1e-5);
    if (!half_line) {
        sb.bound = std::log(static_cast<double>(d));
        sb.composite_target = 1.0 / d;
        sb.map_formula = "w = (2/pi) log((1+z)/(1-z)); rho(z) = phi^-1(phi(z)/d)";
        auto rho = [&](cplx z) {
            return strip_map_inv(strip_map(z) / static_cast<double>(d));
        };
        sb.composite_deriv = deriv0(rho, 1e-5);
    } else {
        sb.bound = 2.0 * std::log(static_cast<double>(d));
        sb.composite_target = 1.0 / (static_cast<double>(d) * d);
        sb.map_formula =
            "w = ((2/pi) log((1+sqrt(z))/(1-sqrt(z))))^2 scaling; "
            "rho(z) = tanh^2(atanh(sqrt(z))/d)";
        auto rho = [&](cplx z) {
            cplx s = std::tanh(std::atanh(std::sqrt(z)) / static_cast<double>(d));
            return s * s;
        };
        sb.composite_deriv = deriv0(rho, 1e-5);
    }
    return sb;
}

}  // namespace qx
