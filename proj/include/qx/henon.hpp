#pragma once
// Complex Henon map f(x, y) = (p(x) - a*y, x), its inverse, Jacobians,
// escape filtration and the two Green functions.

#include <vector>

#include "qx/core.hpp"
#include "qx/series.hpp"

namespace qx {

struct HenonMap {
    std::vector<cplx> p_coeffs;  // low -> high, monic, degree >= 2
    cplx a{0.1, 0.0};
    bool real_flag = false;

    int degree() const { return static_cast<int>(p_coeffs.size()) - 1; }
    void validate() const;
};

// Convenience constructor for the quadratic family p(x) = x^2 + c.
HenonMap quadratic_henon(cplx c, cplx a, bool real_flag = true);

cplx eval_poly(const std::vector<cplx>& coeffs, cplx z);
cplx eval_poly_derivative(const std::vector<cplx>& coeffs, cplx z);

ComplexPoint evaluate(const HenonMap& m, const ComplexPoint& q);
ComplexPoint inverse(const HenonMap& m, const ComplexPoint& q);
ComplexPoint iterate(const HenonMap& m, ComplexPoint q, int n);  // n may be negative

// Df at q; determinant is identically a.
Mat2 jacobian(const HenonMap& m, const ComplexPoint& q);
Mat2 jacobian_inverse(const HenonMap& m, const ComplexPoint& q);
// Ordered product Df(f^{n-1}q) ... Df(q).
Mat2 jacobian_product(const HenonMap& m, const ComplexPoint& q, int n);

// Push a C^2-valued series through f (or f^{-1}): the series analogue of
// evaluate/inverse, truncated to the input length.
Series2 apply_map(const HenonMap& m, const Series2& s);
Series2 apply_map_inverse(const HenonMap& m, const Series2& s);

// Escape filtration.  R is chosen so that |p(t)| >= (2+|a|)|t| and
// |p(t)| >= (1+2|a|)|t| for every |t| >= R; the first makes the x-dominant
// region forward-escaping with doubling, the second makes the y-dominant
// region backward-escaping with doubling.
struct EscapeFiltration {
    double R = 0.0;

    bool in_v(const ComplexPoint& q) const {
        return std::abs(q.x) <= R && std::abs(q.y) <= R;
    }
    // Forward-escaping region: x dominates and exceeds R.
    bool in_v_plus(const ComplexPoint& q) const {
        double ax = std::abs(q.x);
        return ax >= R && ax >= std::abs(q.y);
    }
    // Backward-escaping region: y dominates and exceeds R.
    bool in_v_minus(const ComplexPoint& q) const {
        double ay = std::abs(q.y);
        return ay >= R && ay >= std::abs(q.x);
    }
};

double escape_radius(const HenonMap& m);
EscapeFiltration make_filtration(const HenonMap& m);
// Randomized direct verification of the growth properties behind R.
bool escape_radius_ok(const HenonMap& m, double R, int samples,
                      std::uint64_t seed);

enum class GreenStatus {
    Escaped,       // orbit reached the escaping region; value converged
    Bounded,       // orbit stayed in V for the whole budget; value is 0
    Inconclusive,  // budget exhausted before either resolution
};

struct GreenEstimate {
    double value = 0.0;
    double error_bound = 0.0;
    int iterations_used = 0;
    GreenStatus status = GreenStatus::Inconclusive;

    bool reliable() const { return status != GreenStatus::Inconclusive; }
};

struct GreenParams {
    double tol = 1e-12;  // requested bound on the escape-series tail
    int budget = 220;    // max iterations before giving up / declaring bounded
};

// G+ = lim d^{-n} log+ |f^n q|  (sup norm); G+ o f = d * G+.
GreenEstimate green_plus(const HenonMap& m, const ComplexPoint& q,
                         const GreenParams& gp = {});
// Mirror for the inverse map: G- = lim d^{-n} log+ |f^{-n} q|.
GreenEstimate green_minus(const HenonMap& m, const ComplexPoint& q,
                          const GreenParams& gp = {});

}  // namespace qx
