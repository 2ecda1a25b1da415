#pragma once
// Shared scalar/matrix types and small utilities used across the library.

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qx {

using cplx = std::complex<double>;

// A point of C^2.  x is the coordinate that grows under the forward map.
struct ComplexPoint {
    cplx x{0.0, 0.0};
    cplx y{0.0, 0.0};
};

inline ComplexPoint operator+(const ComplexPoint& p, const ComplexPoint& q) {
    return {p.x + q.x, p.y + q.y};
}
inline ComplexPoint operator-(const ComplexPoint& p, const ComplexPoint& q) {
    return {p.x - q.x, p.y - q.y};
}
inline ComplexPoint operator*(const cplx& c, const ComplexPoint& p) {
    return {c * p.x, c * p.y};
}

// Hermitian norms on C^2.
inline double norm_sup(const ComplexPoint& p) {
    return std::max(std::abs(p.x), std::abs(p.y));
}
inline double norm_2(const ComplexPoint& p) {
    return std::hypot(std::abs(p.x), std::abs(p.y));
}
inline double dist_2(const ComplexPoint& p, const ComplexPoint& q) {
    return norm_2(p - q);
}

// Column-major 2x2 complex matrix [[a, b], [c, d]].
struct Mat2 {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static Mat2 identity() { return {}; }

    cplx det() const { return a * d - b * c; }

    ComplexPoint apply(const ComplexPoint& v) const {
        return {a * v.x + b * v.y, c * v.x + d * v.y};
    }
};

inline Mat2 operator*(const Mat2& m, const Mat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

// Solve (M - s*I) v = rhs is not needed; we only ever solve M v = rhs.
inline ComplexPoint solve2(const Mat2& m, const ComplexPoint& rhs) {
    cplx det = m.det();
    if (std::abs(det) == 0.0)
        throw std::runtime_error("solve2: singular 2x2 system");
    return {(m.d * rhs.x - m.b * rhs.y) / det,
            (m.a * rhs.y - m.c * rhs.x) / det};
}

// Eigenvalues of a 2x2 complex matrix, cancellation-safe: the larger root of
// the characteristic polynomial is computed by the quadratic formula with the
// sign chosen to avoid subtractive loss, the other as det/larger.
struct Eigen2 {
    cplx lambda1;  // larger modulus
    cplx lambda2;
    ComplexPoint v1;  // eigenvector for lambda1
    ComplexPoint v2;
};

Eigen2 eigen2(const Mat2& m);

// Error taxonomy.  Capacity errors mean "the requested radius/level exceeds
// what the truncated data can certify" and are routinely caught and counted
// as exclusions; precondition errors indicate misuse and are not.
struct QxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionError : QxError {
    using QxError::QxError;
};
struct CapacityError : QxError {
    using QxError::QxError;
};
struct ResonanceError : QxError {
    int order;
    double denominator;
    ResonanceError(const std::string& msg, int k, double den)
        : QxError(msg), order(k), denominator(den) {}
};

// FNV-1a 64-bit content digest.  Deterministic cache/identity key for maps,
// configs and bundles; not cryptographic.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}
std::string digest_hex(const std::string& content);

// All randomized sampling in the library draws from an explicitly seeded
// engine; sub-streams are derived so independent stages do not interact.
inline std::mt19937_64 seeded_rng(std::uint64_t seed, const char* purpose) {
    std::uint64_t h = fnv1a64(purpose, std::string(purpose).size(), seed ^ 0x9e3779b97f4a7c15ull);
    return std::mt19937_64(h);
}

}  // namespace qx
