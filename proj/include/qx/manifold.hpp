#pragma once
// Unstable-manifold parametrizations at saddle cycle points: truncated
// power series psi with f^n(psi(zeta)) = psi(lambda zeta), the m-function
// m(r) = max_{|zeta|<=r} G+(psi(zeta)), level-t normalization, and per-step
// multipliers extracted from the transformation law d*m_x(r) = m_fx(|l|r).

#include <functional>
#include <vector>

#include "qx/henon.hpp"
#include "qx/saddles.hpp"
#include "qx/series.hpp"

namespace qx {

using GreenFn = std::function<GreenEstimate(const ComplexPoint&)>;
// Green value along a parametrized curve: zeta -> G(psi(zeta)).
using GreenAlong = std::function<GreenEstimate(cplx)>;

struct UnstableParametrization {
    ComplexPoint base;
    int period = 1;
    cplx multiplier{0.0};  // lambda of the functional equation (Df^period eigenvalue)
    std::vector<ComplexPoint> coeffs;  // a_1 ... a_N (zeta^1 ... zeta^N)
    double valid_radius = 0.0;         // residual-certified disk radius
    double residual_bound = 0.0;       // measured functional residual there
    double scale = 1.0;                // cumulative zeta rescaling applied
    bool normalized = false;
    double t_level = 0.0;

    int order() const { return static_cast<int>(coeffs.size()); }
    ComplexPoint eval(cplx zeta) const;
    ComplexPoint deriv(cplx zeta) const;
    Series2 as_series() const;  // includes the constant term
};

struct LinearizeParams {
    int order = 40;             // truncation order N
    double resonance_tol = 1e-10;
    double residual_tol = 1e-9;  // relative residual accepted on the certified disk
    int residual_samples = 64;
    double min_unstable = 1e-6;  // require |lambda| > 1 + this
};

// Taylor solve of f^period(psi(zeta)) = psi(lambda zeta) at orbit point
// `index`; a_1 is the unit unstable eigenvector with a canonical phase.
UnstableParametrization linearize_unstable(const HenonMap& m,
                                           const PeriodicOrbit& orbit,
                                           int index,
                                           const LinearizeParams& lp = {});

// Same solve for the stable side, done through the inverse map (the stable
// manifold of f is the unstable manifold of f^{-1}).
UnstableParametrization linearize_stable(const HenonMap& m,
                                         const PeriodicOrbit& orbit, int index,
                                         const LinearizeParams& lp = {});

// f∘psi: raw parametrization of the manifold at f(base); same multiplier.
UnstableParametrization push_forward(const HenonMap& m,
                                     const UnstableParametrization& psi,
                                     const LinearizeParams& lp = {});

// Max of ||f^period(psi(zeta)) - psi(lambda zeta)|| over |zeta| = r
// (equally spaced plus seeded random samples).
double functional_residual(const HenonMap& m,
                           const UnstableParametrization& psi, double r,
                           int samples, std::uint64_t seed = 0x9d5ab1e5ull);

struct MFunction {
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<bool> reliable;
    int circle_samples = 0;  // K actually used per circle
};

struct MFunctionParams {
    int circle_samples = 256;
    double refine_theta_tol = 1e-8;  // golden-section window on candidate arcs
    GreenParams green;
};

// Max of the (subharmonic) Green value over the circle |zeta| = r: grid max
// refined on every near-winning arc so the result carries no grid-alignment
// error.  unreliable = some contributing sample was inconclusive.
struct CircleMax {
    double value = 0.0;
    double theta = 0.0;
    bool reliable = true;
};
CircleMax circle_max_green(const GreenAlong& g, double r,
                           const MFunctionParams& mp);

MFunction m_function(const GreenAlong& g, const std::vector<double>& radii,
                     double valid_radius, const MFunctionParams& mp);

// Smallest s in [lo, hi_cap] with m(s) = target (m nondecreasing); throws
// CapacityError when the bracket cannot be established inside hi_cap.
double solve_m_radius(const GreenAlong& g, double target, double lo,
                      double hi_cap, double rel_tol, const MFunctionParams& mp);

// Green value along the parametrized manifold.  For |zeta| beyond the
// residual-certified disk the functional equation extends the evaluation
// exactly: G(psi(lambda zeta)) = d^period G(psi(zeta)), so zeta is pulled
// back into the disk and the value rescaled -- no truncation loss.
GreenAlong green_along(const HenonMap& m, const UnstableParametrization& psi,
                       const GreenFn& green, int j_cap = 40);

// Largest |zeta| reachable through the functional-equation extension.
double extended_capacity(const UnstableParametrization& psi, int j_cap = 40);

struct NormalizationRecord {
    double scale = 1.0;     // zeta rescaling applied to reach the level
    double t = 1.0;
    double achieved = 0.0;  // m(1) after rescaling
    int bisection_evals = 0;
};

struct NormalizeParams {
    double rel_tol = 1e-11;  // bisection tolerance on the scale
    MFunctionParams mf;
};

// Rescale zeta so that m(1) = t.  Throws CapacityError if the level is not
// attained inside the extended domain.
NormalizationRecord normalize(const HenonMap& m, UnstableParametrization& psi,
                              const GreenFn& green, double t,
                              const NormalizeParams& np = {});

struct StepMultiplier {
    cplx lambda{0.0};        // modulus from the m-equation, phase from the germ
    double modulus = 0.0;
    double fd_modulus = 0.0;  // finite-difference cross-check of |lambda|
};

// Per-step multiplier lambda_x: |lambda| solves m_fx(s) = d * t, the
// argument comes from the derivative of psi_fx^{-1} o f o psi_x at 0.
StepMultiplier step_multiplier(const HenonMap& m,
                               const UnstableParametrization& psi_x,
                               const UnstableParametrization& psi_fx,
                               const GreenFn& green,
                               const NormalizeParams& np = {});

}  // namespace qx
