#include "qx/series.hpp"

#include <algorithm>

namespace qx {

Series series_add(const Series& p, const Series& q) {
    Series r(std::max(p.size(), q.size()));
    for (std::size_t k = 0; k < r.size(); ++k) r.c[k] = p.coeff(k) + q.coeff(k);
    return r;
}

Series series_scale(const Series& p, cplx s) {
    Series r = p;
    for (auto& c : r.c) c *= s;
    return r;
}

Series series_mul(const Series& p, const Series& q, std::size_t trunc) {
    Series r(trunc);
    std::size_t np = std::min(p.size(), trunc);
    for (std::size_t i = 0; i < np; ++i) {
        if (p.c[i] == cplx{0.0}) continue;
        std::size_t nq = std::min(q.size(), trunc - i);
        for (std::size_t j = 0; j < nq; ++j) r.c[i + j] += p.c[i] * q.c[j];
    }
    return r;
}

Series poly_on_series(const std::vector<cplx>& poly, const Series& s,
                      std::size_t trunc) {
    // Horner: acc = acc*s + poly[k], from the leading coefficient down.
    Series acc(trunc);
    if (poly.empty()) return acc;
    acc.c[0] = poly.back();
    for (std::size_t k = poly.size() - 1; k-- > 0;) {
        acc = series_mul(acc, s, trunc);
        acc.c[0] += poly[k];
    }
    return acc;
}

Series series_rescale(const Series& s, cplx scale) {
    Series r = s;
    cplx pw{1.0};
    for (std::size_t k = 0; k < r.size(); ++k) {
        r.c[k] *= pw;
        pw *= scale;
    }
    return r;
}

Series series_invert(const Series& s) {
    std::size_t n = s.size();
    if (n < 2 || s.coeff(0) != cplx{0.0} || s.coeff(1) == cplx{0.0})
        throw PreconditionError("series_invert: need s(0)=0, s'(0)!=0");
    Series inv(n);
    inv.c[1] = 1.0 / s.c[1];
    // Grow the inverse order by order: with inv known through order k-1,
    // the zeta^k coefficient of inv(s(zeta)) - zeta is e_k and correcting
    // inv by -e_k / s1^k cancels it without touching lower orders.
    for (std::size_t k = 2; k < n; ++k) {
        // comp = inv o s truncated to order k (Horner in s; s has valuation
        // 1 so orders of inv above k cannot contribute).
        Series comp(k + 1);
        for (std::size_t j = k + 1; j-- > 0;) {
            comp = series_mul(comp, s, k + 1);
            comp.c[0] += inv.c[j];
        }
        cplx e = comp.c[k];  // target coefficient is 0 for k >= 2
        cplx s1k = std::pow(s.c[1], static_cast<double>(k));
        inv.c[k] = -e / s1k;
    }
    return inv;
}

}  // namespace qx
