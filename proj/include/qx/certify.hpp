#pragma once
// Quasi-expansion certificate over a saddle sample: per-step multipliers,
// kappa / beta / C, the five equivalent-condition reports, the power-law
// lower bound, local-variety area, annulus-modulus sanity bound, backward
// contraction and Lyapunov audit.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qx/manifold.hpp"

namespace qx {

struct CertifyParams {
    double t = 1.0;
    double margin = 0.05;             // PASS needs kappa >= 1 + margin
    std::vector<double> radius_grid;  // profile grid; default set in code
    double r0 = 2.0;                  // condition (2) radius
    double r1 = 0.5, r2 = 2.0;        // condition (3) radii
    std::vector<double> law_radii;    // transformation-law check; default in code
    double law_tol = 1e-5;
    double c5_slack = 1e-9;
    LinearizeParams lin;
    NormalizeParams norm;
    GreenParams green;
};

struct StepRecord {
    bool ok = false;
    StepMultiplier mult;
    double law_residual_max = 0.0;  // max_r |d m_x(r) - m_fx(|l| r)|
    int law_radii_checked = 0;
};

struct SaddlePointData {
    int orbit_index = -1;
    int point_index = 0;
    int period = 0;
    ComplexPoint point;
    bool excluded = false;
    std::string exclusion_reason;
    UnstableParametrization psi;  // normalized at level t when !excluded
    NormalizationRecord norm_rec;
    MFunction profile;            // on the (possibly truncated) radius grid
    bool grid_truncated = false;
    StepRecord step;              // multiplier toward the next cycle point
};

struct ConditionReport {
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

struct Certificate {
    std::string map_digest;
    double t = 1.0;
    double margin = 0.05;
    int sample_size = 0;  // included saddle points
    int exclusions = 0;
    double kappa = 0.0;
    double beta = 0.0;
    double C = 0.0;
    std::array<ConditionReport, 5> conditions;
    std::string verdict;  // PASS | FAIL | INSUFFICIENT_SAMPLE
    std::vector<std::string> caveats;
};

struct OrbitAudit {
    int orbit_index = 0;
    int period = 0;
    double eig_unstable_mod = 0.0;
    double step_product = 0.0;       // prod of per-step moduli
    double product_rel_err = 0.0;    // vs |eig_unstable|
    double lyapunov_exponent = 0.0;  // log|eig_unstable| / period
};

struct CertifyResult {
    Certificate cert;
    std::vector<SaddlePointData> points;
    std::vector<OrbitAudit> orbits;
    double law_residual_max = 0.0;
};

CertifyResult certify_theorem12(const HenonMap& m, const SaddleCatalog& cat,
                                const CertifyParams& cp = {});

// Shared condition assembly for the 2-D and 1-D certifiers: a flat view of
// the sample (profiles + per-step moduli) is enough to evaluate the five
// equivalent conditions and the verdict.
struct SamplePointSummary {
    bool excluded = false;
    MFunction profile;
    bool step_ok = false;
    double step_modulus = 0.0;
};
struct CertificateInputs {
    int degree = 2;
    double t = 1.0;
    double margin = 0.05;
    double r0 = 2.0, r1 = 0.5, r2 = 2.0;
    double c5_slack = 1e-9;
    std::vector<SamplePointSummary> points;
};
Certificate build_certificate(const CertificateInputs& in);

// Lower bound m_x(r) >= t r^beta / d on (0, 1]; beta from the certificate
// kappa unless an override is supplied (sensitivity harness).
struct LowerBoundViolation {
    int point = 0;
    double r = 0.0;
    double m = 0.0;
    double bound = 0.0;
};
struct LowerBoundReport {
    bool pass = false;
    double beta = 0.0;
    double C = 0.0;
    std::vector<LowerBoundViolation> violations;
    int checks = 0;
};
LowerBoundReport check_lower_bound(const HenonMap& m, const CertifyResult& res,
                                   const std::vector<double>& radii,
                                   double slack = 1e-9,
                                   std::optional<double> kappa_override = {});

// Component of psi^{-1}(B(base, eps)) containing 0, traced along rays, and
// its area under the parametrization (integral of |psi'|^2).
struct AreaParams {
    int n_theta = 256;
    int n_rho = 96;
    double ray_tol = 1e-10;  // bisection tolerance along each ray
};
struct AreaReport {
    double eps = 0.0;
    double area = 0.0;
    double rho_min = 0.0;   // inner/outer radii of the traced component
    double rho_max = 0.0;
    std::vector<double> rho;  // per-angle first crossing
    bool star_check = true;   // circular sweep below the inradius stayed inside
};
AreaReport area_of_local_variety(const UnstableParametrization& psi,
                                 double eps, const AreaParams& ap = {});

// Modulus sanity bound for a proper disk datum: the annulus D - C must have
// modulus at least log(R1/R0) / ((A/R1^2)(2 + 1/log(R1/R0))).  The left side
// is bracketed by the concentric annuli contained in / containing D - C.
struct ProperDiskDatum {
    std::vector<double> rho_inner;  // polar trace of the center component C
    std::vector<double> rho_outer;  // polar trace of D
    double area = 0.0;              // area of the proper image (with multiplicity)
    double R0 = 0.0, R1 = 0.0;
};
struct ModulusReport {
    double lhs_lo = 0.0, lhs_hi = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // lhs_lo - rhs
    double rhs_slope = 0.0;  // rhs / log(R1/R0), finite as R0 -> R1
    bool pass = false;
};
ModulusReport modulus_bound_check(const ProperDiskDatum& datum);
// Build the datum from a parametrization (balls centered at psi.base).
ProperDiskDatum proper_disk_datum(const UnstableParametrization& psi,
                                  double R0, double R1,
                                  const AreaParams& ap = {});

// diam and area of f^{-n} V(x, eps) for n = 0..n_max; only runs on top of a
// PASS certificate.
struct ContractionRow {
    int n = 0;
    double diam = 0.0;
    double area = 0.0;
};
struct ContractionReport {
    double eps = 0.0;
    std::vector<ContractionRow> rows;
    double theta_envelope = 0.0;  // max diam_n^{1/n}, n >= 1
    double theta_fit = 0.0;       // least-squares slope of log diam
    bool replay_ok = false;       // diam_n <= theta_envelope^n for all rows
};
ContractionReport backward_contraction(const HenonMap& m,
                                       const Certificate& cert,
                                       const UnstableParametrization& psi,
                                       double eps, int n_max,
                                       const AreaParams& ap = {});

// Per-orbit expansion exponents (1/n) log |lambda+| against log kappa.
struct LyapunovReport {
    std::vector<OrbitAudit> rows;
    double min_exponent = 0.0;
    double log_kappa = 0.0;
    bool pass = false;  // min_exponent >= log kappa - 1e-9
};
LyapunovReport lyapunov_estimate(const CertifyResult& res);

// Growth of max G+ over balls B(x, r) in sampled directions; log-log fit
// evidence for the pointwise expansion estimate.
struct BallGrowthFit {
    double C = 0.0;
    double exponent = 0.0;
    double r2 = 0.0;  // fit quality
    std::vector<double> radii;
    std::vector<double> max_green;
};
BallGrowthFit ball_green_growth(const HenonMap& m, const ComplexPoint& x,
                                const std::vector<double>& radii,
                                int directions = 16,
                                const GreenParams& gp = {});

}  // namespace qx
