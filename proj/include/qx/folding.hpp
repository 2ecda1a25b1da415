#pragma once
// Order / folding diagnostics on explicit Taylor jets: vanishing order Ord,
// projection mapping degree by the argument principle, the extremal k-th
// coefficient gamma_k with its metric factor, and the contact order between
// two jets through a common point.  Jets are finite truncations; every
// verdict here is about the jet handed in, not about a normal-limit family.

#include <string>
#include <vector>

#include "qx/manifold.hpp"
#include "qx/series.hpp"

namespace qx {

struct TaylorJet {
    ComplexPoint base;
    std::vector<ComplexPoint> coeffs;  // coeffs[k] multiplies zeta^{k+1}
    double scale_ref = 1.0;            // magnitude reference for tolerances
};

// Jet of a (normalized or raw) local unstable parametrization.
TaylorJet jet_of(const UnstableParametrization& psi);
// Jet from explicit coefficients; scale_ref = max coefficient norm (or 1).
TaylorJet make_jet(const ComplexPoint& base,
                   const std::vector<ComplexPoint>& coeffs);

struct OrderReport {
    int order = 0;            // least n >= 1 with |a_n| > tol * scale_ref
    bool degenerate = false;  // every coefficient below the tolerance
};
OrderReport order_of(const TaylorJet& jet, double tol = 1e-7);

struct DegreeReport {
    int degree = 0;
    double radius = 0.0;
    double min_modulus = 0.0;  // min over |zeta| = r of the projected difference
    bool ok = false;           // false: radius unusable, retry with another r
    int samples = 0;           // boundary samples used by the winding count
};
// Winding number of zeta -> <jet(zeta) - base, direction> around 0 over
// |zeta| = r (accumulated argument; samples double until increments are
// small).  The projection is Hermitian-linear, so the curve is holomorphic.
DegreeReport projection_degree(const TaylorJet& jet,
                               const ComplexPoint& direction, double r,
                               double tol = 1e-9);

struct GammaReport {
    int k = 0;
    double gamma = 0.0;             // max over the family of |k-th coefficient|
    double metric_factor = 0.0;     // 1 / gamma_k
    bool stratum_mismatch = false;  // gamma_k = 0: no jet realizes order k
};
// Extremal k-th coefficient over a family of jets sharing a base point.
GammaReport gamma_k(const std::vector<TaylorJet>& jets, int k);

struct TangencyReport {
    int tau = 0;  // contact order; 1 = transverse
    int first_diff_index = 0;
    double diff_magnitude = 0.0;    // size of the first differing coefficient
    bool germ_coincidence = false;  // jets agree to full truncation order
    bool ok = false;                // a finite order was established
};
// Contact order of two jets through the same base point: 1 when the tangent
// directions are independent, otherwise the valuation of the difference of
// the two graphs over the common tangent direction.
TangencyReport tangency_order(const TaylorJet& a, const TaylorJet& b,
                              double tol = 1e-9);

}  // namespace qx
