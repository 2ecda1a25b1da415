#include "qx/core.hpp"

#include <cmath>
#include <cstdio>

namespace qx {

Eigen2 eigen2(const Mat2& m) {
    cplx tr = m.a + m.d;
    cplx det = m.det();
    cplx disc = std::sqrt(tr * tr - 4.0 * det);
    // Pick the sign that adds constructively to the trace.
    if (std::real(std::conj(tr) * disc) < 0.0) disc = -disc;
    cplx l1 = 0.5 * (tr + disc);
    cplx l2;
    if (std::abs(l1) > 0.0)
        l2 = det / l1;  // avoids cancellation in tr - disc
    else
        l2 = 0.5 * (tr - disc);
    if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2);

    auto eigvec = [&](cplx lam) -> ComplexPoint {
        // Rows of (M - lam I) are (a-lam, b) and (c, d-lam); the eigenvector
        // is orthogonal-ish to the better-conditioned row.
        cplx r1x = m.a - lam, r1y = m.b;
        cplx r2x = m.c, r2y = m.d - lam;
        double n1 = std::abs(r1x) + std::abs(r1y);
        double n2 = std::abs(r2x) + std::abs(r2y);
        ComplexPoint v;
        if (n1 >= n2)
            v = {-r1y, r1x};
        else
            v = {-r2y, r2x};
        double nv = norm_2(v);
        if (nv == 0.0) return {cplx{1.0}, cplx{0.0}};
        return (1.0 / nv) * v;
    };
    return {l1, l2, eigvec(l1), eigvec(l2)};
}

std::string digest_hex(const std::string& content) {
    std::uint64_t h = fnv1a64(content.data(), content.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace qx
