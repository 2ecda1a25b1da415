#include "qx/folding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qx {

namespace {

double family_scale(const std::vector<ComplexPoint>& coeffs) {
    double s = 0.0;
    for (const auto& c : coeffs) s = std::max(s, norm_2(c));
    return s > 0.0 ? s : 1.0;
}

// Hermitian inner product <v, e> = conj(e.x) v.x + conj(e.y) v.y; constants
// are conjugated, so zeta -> <jet(zeta), e> stays holomorphic.
cplx herm(const ComplexPoint& v, const ComplexPoint& e) {
    return std::conj(e.x) * v.x + std::conj(e.y) * v.y;
}

}  // namespace

TaylorJet jet_of(const UnstableParametrization& psi) {
    return make_jet(psi.base, psi.coeffs);
}

TaylorJet make_jet(const ComplexPoint& base,
                   const std::vector<ComplexPoint>& coeffs) {
    TaylorJet jet;
    jet.base = base;
    jet.coeffs = coeffs;
    jet.scale_ref = family_scale(coeffs);
    return jet;
}

OrderReport order_of(const TaylorJet& jet, double tol) {
    OrderReport rep;
    const double thr = tol * jet.scale_ref;
    for (std::size_t k = 0; k < jet.coeffs.size(); ++k) {
        if (norm_2(jet.coeffs[k]) > thr) {
            rep.order = static_cast<int>(k) + 1;
            return rep;
        }
    }
    rep.degenerate = true;
    return rep;
}

DegreeReport projection_degree(const TaylorJet& jet,
                               const ComplexPoint& direction, double r,
                               double tol) {
    if (r <= 0.0) throw PreconditionError("projection_degree: radius > 0");
    double dn = norm_2(direction);
    if (dn == 0.0)
        throw PreconditionError("projection_degree: zero direction");
    ComplexPoint e{direction.x / dn, direction.y / dn};

    auto h = [&](cplx zeta) {
        ComplexPoint v{0.0, 0.0};
        for (std::size_t k = jet.coeffs.size(); k-- > 0;) {
            v.x = v.x * zeta + jet.coeffs[k].x;
            v.y = v.y * zeta + jet.coeffs[k].y;
        }
        return herm(v, e) * zeta;  // <jet(zeta) - base, e>
    };

    DegreeReport rep;
    rep.radius = r;
    const double half_pi = 1.5707963267948966;
    for (int n = 1024; n <= (1 << 16); n *= 2) {
        double total = 0.0;
        double min_mod = std::numeric_limits<double>::infinity();
        bool jumped = false;
        cplx prev = h(cplx{r, 0.0});
        min_mod = std::min(min_mod, std::abs(prev));
        for (int i = 1; i <= n; ++i) {
            cplx z = std::polar(r, 2.0 * M_PI * i / n);
            cplx cur = h(z);
            min_mod = std::min(min_mod, std::abs(cur));
            double dphi = std::arg(cur / prev);
            if (!(std::abs(dphi) <= half_pi)) {  // also trips on NaN
                jumped = true;
                break;
            }
            total += dphi;
            prev = cur;
        }
        rep.samples = n;
        rep.min_modulus = min_mod;
        if (min_mod <= 10.0 * tol) return rep;  // unusable radius: retry
        if (jumped) continue;                   // undersampled: double
        rep.degree = static_cast<int>(std::lround(total / (2.0 * M_PI)));
        rep.ok = true;
        return rep;
    }
    return rep;  // persistent jumps even at the densest sampling
}

GammaReport gamma_k(const std::vector<TaylorJet>& jets, int k) {
    if (jets.empty()) throw PreconditionError("gamma_k: empty jet family");
    if (k < 1) throw PreconditionError("gamma_k: k >= 1 required");
    for (const auto& j : jets)
        if (dist_2(j.base, jets.front().base) > 1e-9)
            throw PreconditionError("gamma_k: jets must share the base point");
    GammaReport rep;
    rep.k = k;
    for (const auto& j : jets)
        if (static_cast<std::size_t>(k) <= j.coeffs.size())
            rep.gamma = std::max(rep.gamma, norm_2(j.coeffs[k - 1]));
    if (rep.gamma > 0.0)
        rep.metric_factor = 1.0 / rep.gamma;
    else
        rep.stratum_mismatch = true;
    return rep;
}

TangencyReport tangency_order(const TaylorJet& a, const TaylorJet& b,
                              double tol) {
    if (dist_2(a.base, b.base) > 1e-9)
        throw PreconditionError(
            "tangency_order: jets must be based at the same point");
    OrderReport oa = order_of(a), ob = order_of(b);
    if (oa.degenerate || ob.degenerate)
        throw PreconditionError("tangency_order: degenerate jet");

    const ComplexPoint ta = a.coeffs[oa.order - 1];
    const ComplexPoint tb = b.coeffs[ob.order - 1];
    TangencyReport rep;
    cplx det = ta.x * tb.y - ta.y * tb.x;
    if (std::abs(det) > tol * norm_2(ta) * norm_2(tb)) {
        rep.tau = 1;  // independent tangent directions
        rep.first_diff_index = 1;
        rep.diff_magnitude = std::abs(det) / (norm_2(ta) * norm_2(tb));
        rep.ok = true;
        return rep;
    }

    // Common tangent direction: both curves must be graphs over it, i.e.
    // have a first-order coefficient (higher-order jets fold over the
    // tangent and the graph reparametrization does not exist).
    if (oa.order != 1 || ob.order != 1)
        throw PreconditionError(
            "tangency_order: jet is not a graph over the common tangent");
    double tn = norm_2(ta);
    ComplexPoint e{ta.x / tn, ta.y / tn};
    ComplexPoint eperp{-std::conj(e.y), std::conj(e.x)};

    const std::size_t n =
        std::min(a.coeffs.size(), b.coeffs.size()) + 1;
    auto as_graph = [&](const TaylorJet& j) {
        Series u(n), w(n);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            u.c[k + 1] = herm(j.coeffs[k], e);
            w.c[k + 1] = herm(j.coeffs[k], eperp);
        }
        // Reparametrize by the tangential coordinate: w as a series in s = u.
        return poly_on_series(w.c, series_invert(u), n);
    };
    Series ga = as_graph(a), gb = as_graph(b);

    const double thr = tol * std::max(a.scale_ref, b.scale_ref);
    for (std::size_t k = 1; k < n; ++k) {
        double d = std::abs(ga.coeff(k) - gb.coeff(k));
        if (d > thr) {
            rep.tau = static_cast<int>(k);
            rep.first_diff_index = static_cast<int>(k);
            rep.diff_magnitude = d;
            rep.ok = true;
            return rep;
        }
    }
    rep.germ_coincidence = true;  // indistinguishable to truncation order
    return rep;
}

}  // namespace qx
