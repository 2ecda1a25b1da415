#pragma once
// Level metrics ||.||^(L) from the component of {G+ o psi < L} around 0
// (Koebe interval bounds on the density), the level-change relation as
// interval overlap, cocycles / coboundary checks along saddle orbits, and
// the closed-form strip / sector lower bounds for real maps.

#include <string>
#include <vector>

#include "qx/certify.hpp"
#include "qx/manifold.hpp"

namespace qx {

struct Ival {
    double lo = 0.0, hi = 0.0;
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool overlaps(const Ival& o) const { return lo <= o.hi && o.lo <= hi; }
    double width() const { return hi - lo; }
};
Ival operator+(const Ival& a, const Ival& b);
Ival operator-(const Ival& a, const Ival& b);
// Distance from 0 to the interval (0 when the interval contains 0).
double dist_zero(const Ival& a);

struct MetricInterval {
    double L = 0.0;
    double inradius = 0.0;      // exact level radius (circle-max bisection)
    double ray_inradius = 0.0;  // 64-ray first-crossing estimate
    double lower = 0.0;         // density interval [1/(4 delta), 1/delta]
    double upper = 0.0;
    bool star_ok = true;  // circular sweep at delta/2 stayed below the level
    int rays = 0;
};

struct MetricParams {
    int rays = 64;
    double ray_tol = 1e-8;
    double solve_rel_tol = 1e-11;
    MFunctionParams mf;
};

// Density interval of the canonical metric ||v||^(L) = |v| / |chi'(0)| at
// the base point, measured in the zeta chart of psi.
MetricInterval metric_L_interval(const HenonMap& m,
                                 const UnstableParametrization& psi,
                                 const GreenFn& green, double L,
                                 const MetricParams& mp = {});

// ||v||^(L)_x = ||Df v||^(dL)_{fx} with v = psi_x'(0): interval overlap and
// the inradius ratio (which should reproduce |lambda_x|).
struct LevelRelationCheck {
    Ival at_x, at_fx;
    bool overlap = false;
    double inradius_ratio = 0.0;
};
LevelRelationCheck relation_level_change(const HenonMap& m,
                                         const UnstableParametrization& psi_x,
                                         const UnstableParametrization& psi_fx,
                                         double lambda_mod, const GreenFn& green,
                                         double L, const MetricParams& mp = {});

enum class MetricFamily { Hash, LevelL };

struct CocycleStep {
    int index = 0;
    Ival value;  // degenerate interval for the # family
    bool ok = true;
};
struct CocycleSample {
    MetricFamily family = MetricFamily::Hash;
    double L = 0.0;
    std::vector<CocycleStep> steps;
    std::vector<Ival> partial;  // c(x_0, n): exact telescoping partial sums
    bool truncated = false;
};

// Per-step cocycle values along one certified orbit: c^#(x,1) = log|lambda_x|
// for the # family; for the L family the interval of
// log ||v||^(L/d)_x - log ||v||^(L)_x from the two metric intervals.
CocycleSample cocycle_series(const HenonMap& m, const CertifyResult& res,
                             int orbit_index, MetricFamily family, double L,
                             int n_steps, const MetricParams& mp = {});

// Max over steps of the distance from 0 of
// (c1 - c2)(x_j, 1) - (a12(x_{j+1}) - a12(x_j)); a12 wraps cyclically.
double coboundary_residual(const std::vector<Ival>& c1,
                           const std::vector<Ival>& c2,
                           const std::vector<Ival>& a12);

struct StripBound {
    double bound = 0.0;  // log d, or 2 log d in the half-line case
    bool half_line = false;
    double L = 0.0;
    double phi_deriv0 = 0.0;        // measured disk->strip derivative (4/pi)
    double composite_deriv = 0.0;   // measured composite derivative at 0
    double composite_target = 0.0;  // 1/d (strip) or 1/d^2 (half-line)
    std::string map_formula;
};

// Lower bound for c^(L)(x,1) at a real saddle whose local unstable slice of
// the Julia set lies on the real line: log d via the strip comparison, 2log d
// via the sector (half-line) comparison, with the conformal maps measured.
StripBound strip_cocycle_bound(const HenonMap& m,
                               const UnstableParametrization& psi, double L,
                               bool half_line);

}  // namespace qx
