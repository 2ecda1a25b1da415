#pragma once
// Truncated Taylor series over C, and C^2-valued series, used by the
// linearizer solvers, jets and the local inversion needed for multiplier
// arguments.  Everything is dense degree-N arithmetic; N stays small (<= 96)
// so the O(N^2) products are irrelevant next to Green evaluations.

#include <vector>

#include "qx/core.hpp"

namespace qx {

struct Series {
    std::vector<cplx> c;  // c[k] multiplies zeta^k

    Series() = default;
    explicit Series(std::size_t order_plus_one) : c(order_plus_one, cplx{0.0}) {}

    std::size_t size() const { return c.size(); }
    cplx coeff(std::size_t k) const { return k < c.size() ? c[k] : cplx{0.0}; }

    cplx eval(cplx z) const {
        cplx acc{0.0};
        for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
        return acc;
    }

    Series derivative() const {
        if (c.size() <= 1) return Series(1);
        Series d(c.size() - 1);
        for (std::size_t k = 1; k < c.size(); ++k)
            d.c[k - 1] = static_cast<double>(k) * c[k];
        return d;
    }
};

Series series_add(const Series& p, const Series& q);
Series series_scale(const Series& p, cplx s);
// Product truncated to `trunc` coefficients (degree trunc-1).
Series series_mul(const Series& p, const Series& q, std::size_t trunc);
// Polynomial (coeffs low->high) evaluated on a series, truncated.
Series poly_on_series(const std::vector<cplx>& poly, const Series& s,
                      std::size_t trunc);
// zeta -> s(scale * zeta)
Series series_rescale(const Series& s, cplx scale);
// Compositional inverse of s (s[0] must be 0, s[1] != 0), truncated to the
// same length.  Solved order by order.
Series series_invert(const Series& s);

struct Series2 {
    Series x, y;

    Series2() = default;
    explicit Series2(std::size_t n) : x(n), y(n) {}

    ComplexPoint eval(cplx z) const { return {x.eval(z), y.eval(z)}; }
    ComplexPoint coeff(std::size_t k) const { return {x.coeff(k), y.coeff(k)}; }
};

}  // namespace qx
