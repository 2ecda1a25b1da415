#pragma once
// One-variable polynomial dynamics: Green function by escape rate, a
// repelling-cycle catalog (itinerary-seeded inverse iteration for degree 2,
// grid and random seeds in general, Newton polish), Koenigs linearizers
// solved by coefficient recursion and cross-checked against the direct
// iteration limit, level-t normalization, the quasi-expansion certificate
// built from per-step multipliers, and the semi-hyperbolicity verdict the
// certificate is equivalent to.

#include <cstdint>
#include <string>
#include <vector>

#include "qx/certify.hpp"
#include "qx/henon.hpp"
#include "qx/manifold.hpp"
#include "qx/series.hpp"

namespace qx {

struct Polynomial1D {
    std::vector<cplx> coeffs;  // low -> high; monic of degree >= 2

    Polynomial1D() = default;
    explicit Polynomial1D(std::vector<cplx> c);

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    cplx eval(cplx z) const;
    cplx deriv(cplx z) const;
    cplx iterate(cplx z, int n) const;
    // (g^n)'(x) along a cycle = product of g' over the cycle points.
    cplx cycle_multiplier(const std::vector<cplx>& pts) const;
    // |g(z)| >= 2|z| for |z| >= R; escape region is {|z| >= R}.
    double escape_radius() const;
    // Roots of g' (Durand-Kerner), each verified |g'(c)| <= 1e-10 * scale.
    std::vector<cplx> critical_points() const;
};

Polynomial1D quadratic_1d(cplx c);  // z^2 + c

// G = lim d^{-n} log|g^n z| with a certified geometric tail, 0 on bounded
// orbits; G o g = d * G.
GreenEstimate green_1d(const Polynomial1D& g, cplx z, const GreenParams& gp = {});

struct Cycle1D {
    std::vector<cplx> points;  // cycle in dynamical order, canonical rotation
    int period = 0;            // exact period (divisors excluded)
    cplx multiplier{0.0};      // (g^period)'
    double residual = 0.0;     // |g^period(x) - x| after polish
    bool repelling = false;
};

struct CycleSearchParams {
    int newton_iters = 64;
    double newton_tol = 1e-13;
    double accept_tol = 1e-9;
    double dedup_tol = 1e-8;
    double repelling_band = 1e-8;  // |mult| > 1 + band counts as repelling
    int circle_grid = 32;          // angular seeds per circle, 3 circles
    int reseed_rounds = 4;         // random rounds after the seeded passes
    int reseed_batch = 256;
    int inverse_burn = 24;         // itinerary pull-back cycles (degree 2)
    std::uint64_t seed = 0x1d5eedull;
};

// All cycles of exact period n for n = 1..n_max (attracting and indifferent
// ones included); repelling_cycles keeps the repelling ones only.
std::vector<Cycle1D> find_cycles_1d(const Polynomial1D& g, int n_max,
                                    const CycleSearchParams& sp = {});
std::vector<Cycle1D> repelling_cycles(const Polynomial1D& g, int n_max,
                                      const CycleSearchParams& sp = {});

// Polish the single cycle realizing a degree-2 inverse-branch itinerary
// (one symbol per step, period = symbols.size()).  This reaches individual
// deep cycles (e.g. the slow family hugging a parabolic point) that a full
// period enumeration cannot afford; the result is verified like any other
// catalog entry.  Throws if the polished point misses the residual target
// or has lower exact period.
Cycle1D cycle_from_itinerary(const Polynomial1D& g,
                             const std::vector<int>& symbols,
                             const CycleSearchParams& sp = {});

struct Linearizer1D {
    cplx base{0.0};
    int period = 1;
    cplx multiplier{0.0};  // lambda = (g^period)'(base), |lambda| > 1
    Series phi;            // phi.c[0] = base; phi'(0) = scale
    double valid_radius = 0.0;   // residual-certified disk radius
    double residual_bound = 0.0; // relative residual measured there
    double cross_check_err = 0.0;  // series vs direct limit on radius/2
    cplx scale{1.0};
    bool normalized = false;
    double t_level = 0.0;

    int order() const { return static_cast<int>(phi.size()) - 1; }
    cplx eval(cplx zeta) const { return phi.eval(zeta); }
};

struct Linearize1DParams {
    int order = 40;
    double resonance_tol = 1e-10;
    double residual_tol = 1e-9;
    int residual_samples = 64;
    double min_unstable = 1e-6;
    double cross_check_tol = 1e-8;  // series vs direct limit agreement
};

// Koenigs coefficient recursion for g^period o phi(zeta) = phi(lambda zeta)
// at cycle point `index`, phi'(0) = 1 before normalization; the certified
// radius shrinks until the independently evaluated direct limit agrees.
Linearizer1D linearizer_1d(const Polynomial1D& g, const Cycle1D& cycle,
                           int index = 0, const Linearize1DParams& lp = {});

// Direct-limit evaluation g^{period*j}(base + scale * lambda^{-j} zeta); the
// two constructions of the same germ must agree where both converge.
cplx koenigs_limit_eval(const Polynomial1D& g, const Linearizer1D& lin,
                        cplx zeta, int j);

// Worst relative gap between the recursion-built series and the pull-back
// direct limit (at self-selected depth) over sample angles on |zeta| = r.
double direct_limit_disagreement(const Polynomial1D& g,
                                 const Linearizer1D& lin, double r);

// Green value along the linearizer; beyond the certified disk the argument
// is pulled back through zeta / lambda and the value rescaled by d^period
// per pull-back (exact functional equation, no truncation loss).
GreenAlong green_along_1d(const Polynomial1D& g, const Linearizer1D& lin,
                          const GreenParams& gp = {}, int j_cap = 40);
double extended_capacity_1d(const Linearizer1D& lin, int j_cap = 40);

// Rescale zeta so that max_{|zeta|<=1} G(phi(zeta)) = t.
NormalizationRecord normalize_1d(const Polynomial1D& g, Linearizer1D& lin,
                                 double t, const NormalizeParams& np = {});

// Per-step multiplier: |lambda_step| solves m_{g(x)}(s) = d * t, the
// argument comes from the derivative of phi_gx^{-1} o g o phi_x at 0.
StepMultiplier step_multiplier_1d(const Polynomial1D& g,
                                  const Linearizer1D& lin_x,
                                  const Linearizer1D& lin_gx,
                                  const NormalizeParams& np = {});

struct Certify1DParams {
    double t = 1.0;
    double margin = 0.05;
    std::vector<double> radius_grid;  // default {0.5, 1, 2}
    double r0 = 2.0, r1 = 0.5, r2 = 2.0;
    double c5_slack = 1e-9;
    // 0 = certify every repelling cycle point.  Otherwise keep whole cycles
    // in increasing order of |multiplier|^{1/period} until the budget is
    // reached: the sample min kappa over a subsample only upper-bounds the
    // full-sample min, so a FAIL on the subsample is a FAIL a fortiori.
    int point_budget = 0;
    Linearize1DParams lin;
    // 1-D circle maxima are low-frequency; 64 angular samples plus the
    // refinement pass hold the same tolerances at a quarter of the cost.
    NormalizeParams norm{1e-11, MFunctionParams{64, 1e-8, GreenParams{}}};
    GreenParams green;
};

struct CyclePointData1D {
    int cycle_index = -1;
    int point_index = 0;
    int period = 0;
    cplx point{0.0};
    bool excluded = false;
    std::string exclusion_reason;
    Linearizer1D lin;
    NormalizationRecord norm_rec;
    MFunction profile;
    bool grid_truncated = false;
    StepRecord step;
};

struct Certify1DResult {
    Certificate cert;
    std::vector<CyclePointData1D> points;
    std::vector<OrbitAudit> orbits;
};

Certify1DResult certify_1d(const Polynomial1D& g,
                           const std::vector<Cycle1D>& catalog,
                           const Certify1DParams& cp = {});

struct SemiHypParams {
    int period_bound = 8;          // parabolic scan depth
    double parabolic_band = 1e-6;  // distance to a root of unity
    int root_order_max = 20;
    int orbit_steps = 10000;
    double recurrence_threshold = 1e-3;
    double attracting_band = 1e-6;
    GreenParams green;
    CycleSearchParams search;
};

struct CriticalRecurrence {
    cplx c{0.0};
    bool escapes = false;        // orbit escapes: c is not in K
    bool attracted = false;      // tail converges to an attracting cycle
    double min_distance = 0.0;   // min over the orbit tail of |z_k - c|
    bool recurrent = false;      // bounded, not attracted, distance <= thr
};

struct SemiHypVerdict {
    std::string verdict;  // YES | NO | UNKNOWN
    std::string rationale;
    bool parabolic_found = false;
    Cycle1D parabolic_witness;
    bool unrecognized_indifferent = false;
    std::vector<CriticalRecurrence> critical;
    double eta = 0.0, A = 0.0;  // fitted ball-growth constants (evidence)
    bool eta_fit_ok = false;
};

// Parabolic scan over cycles up to the period bound plus critical-orbit
// recurrence distances; YES needs no parabolic witness and every bounded,
// non-attracted critical orbit to keep its distance; indifferent cycles not
// matching a low-order root of unity give UNKNOWN.
SemiHypVerdict semi_hyperbolic_verdict(const Polynomial1D& g,
                                       const SemiHypParams& sp = {});

}  // namespace qx
