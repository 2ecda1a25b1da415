#include "qx/henon.hpp"

#include <cmath>
#include <limits>

namespace qx {

void HenonMap::validate() const {
    if (p_coeffs.size() < 3)
        throw PreconditionError("HenonMap: p must have degree >= 2");
    if (p_coeffs.back() != cplx{1.0, 0.0})
        throw PreconditionError("HenonMap: p must be monic");
    if (a == cplx{0.0, 0.0})
        throw PreconditionError("HenonMap: Jacobian a must be nonzero");
}

HenonMap quadratic_henon(cplx c, cplx a, bool real_flag) {
    HenonMap m;
    m.p_coeffs = {c, cplx{0.0}, cplx{1.0}};
    m.a = a;
    m.real_flag = real_flag;
    return m;
}

cplx eval_poly(const std::vector<cplx>& coeffs, cplx z) {
    cplx acc{0.0};
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
    return acc;
}

cplx eval_poly_derivative(const std::vector<cplx>& coeffs, cplx z) {
    cplx acc{0.0};
    for (std::size_t k = coeffs.size() - 1; k >= 1; --k)
        acc = acc * z + static_cast<double>(k) * coeffs[k];
    return acc;
}

ComplexPoint evaluate(const HenonMap& m, const ComplexPoint& q) {
    return {eval_poly(m.p_coeffs, q.x) - m.a * q.y, q.x};
}

ComplexPoint inverse(const HenonMap& m, const ComplexPoint& q) {
    return {q.y, (eval_poly(m.p_coeffs, q.y) - q.x) / m.a};
}

ComplexPoint iterate(const HenonMap& m, ComplexPoint q, int n) {
    for (; n > 0; --n) q = evaluate(m, q);
    for (; n < 0; ++n) q = inverse(m, q);
    return q;
}

Mat2 jacobian(const HenonMap& m, const ComplexPoint& q) {
    return {eval_poly_derivative(m.p_coeffs, q.x), -m.a, cplx{1.0}, cplx{0.0}};
}

Mat2 jacobian_inverse(const HenonMap& m, const ComplexPoint& q) {
    // Derivative of (x, y) -> (y, (p(y) - x)/a).
    return {cplx{0.0}, cplx{1.0}, cplx{-1.0} / m.a,
            eval_poly_derivative(m.p_coeffs, q.y) / m.a};
}

Mat2 jacobian_product(const HenonMap& m, const ComplexPoint& q, int n) {
    Mat2 acc = Mat2::identity();
    ComplexPoint p = q;
    for (int i = 0; i < n; ++i) {
        acc = jacobian(m, p) * acc;
        p = evaluate(m, p);
    }
    return acc;
}

Series2 apply_map(const HenonMap& m, const Series2& s) {
    Series2 r;
    std::size_t trunc = s.x.size();
    r.x = series_add(poly_on_series(m.p_coeffs, s.x, trunc),
                     series_scale(s.y, -m.a));
    r.y = s.x;
    return r;
}

Series2 apply_map_inverse(const HenonMap& m, const Series2& s) {
    Series2 r;
    std::size_t trunc = s.x.size();
    r.x = s.y;
    Series py = poly_on_series(m.p_coeffs, s.y, trunc);
    r.y = series_scale(series_add(py, series_scale(s.x, cplx{-1.0})),
                       cplx{1.0} / m.a);
    return r;
}

double escape_radius(const HenonMap& m) {
    m.validate();
    double aa = std::abs(m.a);
    double growth = std::max(2.0 + aa, 1.0 + 2.0 * aa);
    double lower_order = 0.0;  // sum of |c_j| below the leading term
    for (std::size_t j = 0; j + 1 < m.p_coeffs.size(); ++j)
        lower_order += std::abs(m.p_coeffs[j]);
    // |p(t)| >= |t|^{d-1}(|t| - lower_order) >= growth * |t| once
    // |t| >= max(1, lower_order + growth).
    return std::max(1.0, lower_order + growth);
}

EscapeFiltration make_filtration(const HenonMap& m) {
    return {escape_radius(m)};
}

bool escape_radius_ok(const HenonMap& m, double R, int samples,
                      std::uint64_t seed) {
    auto rng = seeded_rng(seed, "escape-radius-check");
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> stretch(1.0, 4.0);
    double aa = std::abs(m.a);
    for (int i = 0; i < samples; ++i) {
        double r = R * stretch(rng);
        cplx t = std::polar(r, angle(rng));
        double pt = std::abs(eval_poly(m.p_coeffs, t));
        if (pt < (2.0 + aa) * r) return false;      // forward doubling
        if (pt < (1.0 + 2.0 * aa) * r) return false;  // backward doubling
    }
    return true;
}

namespace {

// Common escape-series accumulator.  step(q) advances the dynamics whose
// growing coordinate is extracted by grow(q); entered(q) tests membership in
// the escaping region.  In that region u_n = log|dominant| satisfies
// u_{n+1} = d*u_n - shift + eta_n with |eta_n| <= slack_num / |dominant_n|
// and the dominant coordinate at least doubles, so the limit of d^{-n} u_n
// exists with a computable geometric tail; the constant `shift` (log|a| for
// the inverse map, 0 forward) is summed in closed form instead of waiting
// for d^{-n} to crush it.
template <class Step, class Grow, class Entered>
GreenEstimate green_generic(ComplexPoint q, int d, double slack_num,
                            double shift, double R, const GreenParams& gp,
                            Step step, Grow grow, Entered entered) {
    const double big = std::pow(10.0, 280.0 / d);  // keep p() in double range
    double scale = 1.0;                            // d^{-n}
    GreenEstimate g;
    for (int n = 0; n <= gp.budget; ++n) {
        if (entered(q)) {
            double mag = grow(q);
            double slack = 2.0 * slack_num / mag;
            double tail = scale / d * slack / (1.0 - 1.0 / (2.0 * d));
            if ((tail <= gp.tol && mag >= 2.0 * R) || mag >= big) {
                g.value = scale * (std::log(mag) - shift / (d - 1));
                g.error_bound = tail;
                g.iterations_used = n;
                g.status = GreenStatus::Escaped;
                return g;
            }
        }
        if (n == gp.budget) break;
        q = step(q);
        scale /= d;
    }
    if (std::abs(q.x) <= R && std::abs(q.y) <= R) {
        // Confined to V for the whole budget: report 0 with the honest bound
        // d^{-budget} * sup of the Green function over the box V.
        g.value = 0.0;
        g.error_bound =
            scale * (std::log(R) + 2.0 * std::log(2.0 + slack_num) +
                     std::abs(shift) / (d - 1));
        g.iterations_used = gp.budget;
        g.status = GreenStatus::Bounded;
        return g;
    }
    g.value = 0.0;
    g.error_bound = std::numeric_limits<double>::infinity();
    g.iterations_used = gp.budget;
    g.status = GreenStatus::Inconclusive;
    return g;
}

double lower_coeff_sum(const HenonMap& m) {
    double lower = 0.0;
    for (std::size_t j = 0; j + 1 < m.p_coeffs.size(); ++j)
        lower += std::abs(m.p_coeffs[j]);
    return lower;
}

}  // namespace

GreenEstimate green_plus(const HenonMap& m, const ComplexPoint& q,
                         const GreenParams& gp) {
    EscapeFiltration filt = make_filtration(m);
    // |log(x'/x^d)| <= 2(lower + |a|)/|x| once |x| >= 2R dominates.
    return green_generic(
        q, m.degree(), lower_coeff_sum(m) + std::abs(m.a), 0.0, filt.R, gp,
        [&](const ComplexPoint& p) { return evaluate(m, p); },
        [](const ComplexPoint& p) { return std::abs(p.x); },
        [&](const ComplexPoint& p) { return filt.in_v_plus(p); });
}

GreenEstimate green_minus(const HenonMap& m, const ComplexPoint& q,
                          const GreenParams& gp) {
    EscapeFiltration filt = make_filtration(m);
    // y' = (p(y) - x)/a: the log|a| offset repeats every step and is summed
    // exactly; the remaining correction is <= 2(lower + 1)/|y|.
    return green_generic(
        q, m.degree(), lower_coeff_sum(m) + 1.0, std::log(std::abs(m.a)),
        filt.R, gp, [&](const ComplexPoint& p) { return inverse(m, p); },
        [](const ComplexPoint& p) { return std::abs(p.y); },
        [&](const ComplexPoint& p) { return filt.in_v_minus(p); });
}

}  // namespace qx
