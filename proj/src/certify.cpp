#include "qx/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace qx {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
}

double m_at(const GreenAlong& g, double r, double valid,
            const MFunctionParams& mp) {
    return m_function(g, {r}, valid, mp).values.at(0);
}

// Least-squares line y = a + b x; returns {a, b, r^2}.
struct LineFit {
    double a = 0.0, b = 0.0, r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    LineFit f;
    double den = n * sxx - sx * sx;
    if (den == 0.0) return f;
    f.b = (n * sxy - sx * sy) / den;
    f.a = (sy - f.b * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (size_t i = 0; i < n; ++i) {
        double e = ys[i] - (f.a + f.b * xs[i]);
        ss_res += e * e;
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

}  // namespace

CertifyResult certify_theorem12(const HenonMap& m, const SaddleCatalog& cat,
                                const CertifyParams& cp) {
    m.validate();
    CertifyParams p = cp;
    if (p.radius_grid.empty())
        p.radius_grid = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
    if (p.law_radii.empty()) p.law_radii = {0.2, 0.4, 0.6, 0.8, 1.0};

    GreenFn green = [&m, &p](const ComplexPoint& q) {
        return green_plus(m, q, p.green);
    };
    const int d = m.degree();

    CertifyResult res;
    int skipped_non_saddle = 0;
    int failed_steps = 0;
    int truncated_grids = 0;

    for (size_t oi = 0; oi < cat.orbits.size(); ++oi) {
        const PeriodicOrbit& orb = cat.orbits[oi];
        if (orb.classification != OrbitClass::Saddle) {
            ++skipped_non_saddle;
            continue;
        }
        const int n = orb.period;
        const size_t first = res.points.size();
        for (int j = 0; j < n; ++j) {
            SaddlePointData dpt;
            dpt.orbit_index = static_cast<int>(oi);
            dpt.point_index = j;
            dpt.period = n;
            dpt.point = orb.points[j];
            try {
                dpt.psi = linearize_unstable(m, orb, j, p.lin);
                dpt.norm_rec = normalize(m, dpt.psi, green, p.t, p.norm);
            } catch (const QxError& e) {
                dpt.excluded = true;
                dpt.exclusion_reason = e.what();
            }
            res.points.push_back(std::move(dpt));
        }

        OrbitAudit audit;
        audit.orbit_index = static_cast<int>(oi);
        audit.period = n;
        audit.eig_unstable_mod = std::abs(orb.eig_unstable);
        audit.lyapunov_exponent = std::log(audit.eig_unstable_mod) / n;
        bool all_steps = true;
        double prod = 1.0;

        for (int j = 0; j < n; ++j) {
            SaddlePointData& dj = res.points[first + j];
            if (dj.excluded) {
                all_steps = false;
                continue;
            }
            const double cap_j = extended_capacity(dj.psi);
            std::vector<double> grid;
            for (double r : p.radius_grid) {
                if (r <= cap_j)
                    grid.push_back(r);
                else
                    dj.grid_truncated = true;
            }
            if (dj.grid_truncated) ++truncated_grids;
            GreenAlong gj = green_along(m, dj.psi, green);
            dj.profile = m_function(gj, grid, cap_j, p.norm.mf);

            SaddlePointData& dk = res.points[first + (j + 1) % n];
            if (dk.excluded) {
                all_steps = false;
                continue;
            }
            try {
                dj.step.mult = step_multiplier(m, dj.psi, dk.psi, green, p.norm);
                dj.step.ok = true;
                prod *= dj.step.mult.modulus;
                GreenAlong gk = green_along(m, dk.psi, green);
                const double cap_k = extended_capacity(dk.psi);
                const double lam = dj.step.mult.modulus;
                for (double r : p.law_radii) {
                    if (r > cap_j || lam * r > cap_k) continue;
                    double lhs = d * m_at(gj, r, cap_j, p.norm.mf);
                    double rhs = m_at(gk, lam * r, cap_k, p.norm.mf);
                    dj.step.law_residual_max =
                        std::max(dj.step.law_residual_max, std::abs(lhs - rhs));
                    ++dj.step.law_radii_checked;
                }
                res.law_residual_max =
                    std::max(res.law_residual_max, dj.step.law_residual_max);
            } catch (const QxError& e) {
                dj.step.ok = false;
                all_steps = false;
                ++failed_steps;
                if (dj.exclusion_reason.empty())
                    dj.exclusion_reason = std::string("step: ") + e.what();
            }
        }
        if (all_steps) {
            audit.step_product = prod;
            audit.product_rel_err =
                std::abs(prod - audit.eig_unstable_mod) / audit.eig_unstable_mod;
        } else {
            audit.product_rel_err = std::numeric_limits<double>::quiet_NaN();
        }
        res.orbits.push_back(audit);
    }

    CertificateInputs ci;
    ci.degree = d;
    ci.t = p.t;
    ci.margin = p.margin;
    ci.r0 = p.r0;
    ci.r1 = p.r1;
    ci.r2 = p.r2;
    ci.c5_slack = p.c5_slack;
    for (const auto& pt : res.points) {
        SamplePointSummary sps;
        sps.excluded = pt.excluded;
        sps.profile = pt.profile;
        sps.step_ok = pt.step.ok;
        sps.step_modulus = pt.step.mult.modulus;
        ci.points.push_back(std::move(sps));
    }
    res.cert = build_certificate(ci);
    Certificate& c = res.cert;
    if (skipped_non_saddle > 0)
        c.caveats.push_back(std::to_string(skipped_non_saddle) +
                            " non-saddle orbit(s) ignored by the sample");
    if (failed_steps > 0)
        c.caveats.push_back(std::to_string(failed_steps) +
                            " per-step multiplier(s) unavailable");
    if (truncated_grids > 0)
        c.caveats.push_back(std::to_string(truncated_grids) +
                            " profile grid(s) truncated to the certified disk");
    c.caveats.push_back("max transformation-law residual " +
                        fmt(res.law_residual_max));
    return res;
}

Certificate build_certificate(const CertificateInputs& in) {
    Certificate c;
    c.t = in.t;
    c.margin = in.margin;
    int included = 0, excluded = 0;
    for (const auto& pt : in.points) (pt.excluded ? excluded : included)++;
    c.sample_size = included;
    c.exclusions = excluded;

    // Sample-sup profile M(r) over the union of point grids.
    std::map<double, double> mprof;
    bool profile_finite = included > 0;
    for (const auto& pt : in.points) {
        if (pt.excluded) continue;
        for (size_t i = 0; i < pt.profile.radii.size(); ++i) {
            double v = pt.profile.values[i];
            if (!std::isfinite(v)) profile_finite = false;
            auto it = mprof.find(pt.profile.radii[i]);
            if (it == mprof.end())
                mprof[pt.profile.radii[i]] = v;
            else
                it->second = std::max(it->second, v);
        }
    }

    {  // condition (1): m bounded on compacts over the sample
        ConditionReport& r1 = c.conditions[0];
        double worst = 0.0;
        std::ostringstream os;
        for (auto& kv : mprof) {
            worst = std::max(worst, kv.second);
            os << "M(" << fmt(kv.first) << ")=" << fmt(kv.second) << " ";
        }
        r1.value = worst;
        r1.pass = included > 0 && profile_finite && !mprof.empty();
        r1.detail = "sample-sup of m_x on the radius grid: " + os.str();
    }
    {  // condition (2): M(r0) finite
        ConditionReport& r2 = c.conditions[1];
        auto it = mprof.lower_bound(in.r0 - 1e-12);
        bool found = it != mprof.end() && std::abs(it->first - in.r0) < 1e-9;
        r2.pass = found && std::isfinite(it->second);
        r2.value = found ? it->second : 0.0;
        r2.detail = found ? "M(r0=" + fmt(in.r0) + ") over the sample"
                          : "r0=" + fmt(in.r0) + " beyond every certified disk";
    }
    {  // condition (3): uniform ratio bound m_x(r2)/m_x(r1)
        ConditionReport& r3 = c.conditions[2];
        double worst = 0.0;
        int have = 0;
        for (const auto& pt : in.points) {
            if (pt.excluded) continue;
            double v1 = -1, v2 = -1;
            for (size_t i = 0; i < pt.profile.radii.size(); ++i) {
                if (std::abs(pt.profile.radii[i] - in.r1) < 1e-9)
                    v1 = pt.profile.values[i];
                if (std::abs(pt.profile.radii[i] - in.r2) < 1e-9)
                    v2 = pt.profile.values[i];
            }
            if (v1 > 0 && v2 >= 0) {
                worst = std::max(worst, v2 / v1);
                ++have;
            }
        }
        r3.value = worst;
        r3.pass = have > 0 && std::isfinite(worst);
        r3.detail = "sup m_x(" + fmt(in.r2) + ")/m_x(" + fmt(in.r1) +
                    ") over " + std::to_string(have) + " points";
    }
    int steps_ok = 0;
    double kappa = std::numeric_limits<double>::infinity();
    for (const auto& pt : in.points) {
        if (pt.excluded || !pt.step_ok) continue;
        kappa = std::min(kappa, pt.step_modulus);
        ++steps_ok;
    }
    if (steps_ok == 0) kappa = 0.0;
    c.kappa = kappa;
    {  // condition (4): uniform per-step expansion
        ConditionReport& r4 = c.conditions[3];
        r4.value = kappa;
        r4.pass = steps_ok > 0 && kappa >= 1.0 + in.margin;
        r4.detail = "kappa = min per-step |lambda| over " +
                    std::to_string(steps_ok) + " steps; margin " +
                    fmt(in.margin);
    }
    {  // condition (5): power-law upper bound m_x(r) <= t C r^beta, r >= 1
        ConditionReport& r5 = c.conditions[4];
        if (kappa > 1.0) {
            c.beta = std::log(static_cast<double>(in.degree)) / std::log(kappa);
            c.C = std::pow(kappa, c.beta);
            double worst_ratio = 0.0;
            int checks = 0;
            for (const auto& pt : in.points) {
                if (pt.excluded) continue;
                for (size_t i = 0; i < pt.profile.radii.size(); ++i) {
                    double r = pt.profile.radii[i];
                    if (r < 1.0 - 1e-12) continue;
                    double bound = in.t * c.C * std::pow(r, c.beta);
                    worst_ratio =
                        std::max(worst_ratio, pt.profile.values[i] / bound);
                    ++checks;
                }
            }
            r5.value = c.C;
            r5.pass = checks > 0 && worst_ratio <= 1.0 + in.c5_slack;
            r5.detail = "beta=" + fmt(c.beta) + ", max m/(t C r^beta)=" +
                        fmt(worst_ratio) + " over " + std::to_string(checks) +
                        " checks";
        } else {
            r5.pass = false;
            r5.detail = "kappa <= 1: no power law available";
        }
    }

    if (included == 0 || steps_ok == 0) {
        c.verdict = "INSUFFICIENT_SAMPLE";
    } else {
        bool all = true;
        for (const auto& cr : c.conditions) all = all && cr.pass;
        c.verdict = all ? "PASS" : "FAIL";
    }

    c.caveats.push_back(
        "finite-sample certificate: conditions verified on the computed "
        "periodic sample only, not on the full invariant set");
    if (excluded > 0)
        c.caveats.push_back(std::to_string(excluded) +
                            " point(s) excluded (see per-point reasons)");
    return c;
}

LowerBoundReport check_lower_bound(const HenonMap& m, const CertifyResult& res,
                                   const std::vector<double>& radii,
                                   double slack,
                                   std::optional<double> kappa_override) {
    double kappa = kappa_override.value_or(res.cert.kappa);
    if (!(kappa > 1.0))
        throw PreconditionError("lower bound needs kappa > 1");
    const int d = m.degree();
    LowerBoundReport rep;
    rep.beta = std::log(static_cast<double>(d)) / std::log(kappa);
    rep.C = d;  // kappa^beta
    GreenFn green = [&m](const ComplexPoint& q) { return green_plus(m, q); };
    MFunctionParams mp;
    int idx = -1;
    for (const auto& pt : res.points) {
        ++idx;
        if (pt.excluded) continue;
        GreenAlong g = green_along(m, pt.psi, green);
        const double cap = extended_capacity(pt.psi);
        for (double r : radii) {
            if (r <= 0.0 || r > 1.0 + 1e-12 || r > cap) continue;
            double v = m_at(g, r, cap, mp);
            double bound = pt.psi.t_level * std::pow(r, rep.beta) / rep.C;
            ++rep.checks;
            if (v < bound - slack * (1.0 + bound)) {
                LowerBoundViolation viol;
                viol.point = idx;
                viol.r = r;
                viol.m = v;
                viol.bound = bound;
                rep.violations.push_back(viol);
            }
        }
    }
    rep.pass = rep.checks > 0 && rep.violations.empty();
    return rep;
}

namespace {

// First crossing of ||psi(rho e^{i theta}) - base||_2 = eps along one ray.
double ray_crossing(const UnstableParametrization& psi, double theta,
                    double eps, double ray_tol) {
    const cplx dir = std::polar(1.0, theta);
    auto dist = [&](double rho) {
        ComplexPoint q = psi.eval(rho * dir);
        return norm_2(q - psi.base);
    };
    double lo = 0.0;
    double hi = std::min(psi.valid_radius, 1e-3 * psi.valid_radius + 1e-12);
    // march outward geometrically until the sphere is crossed
    while (dist(hi) < eps) {
        lo = hi;
        hi *= 1.35;
        if (hi > psi.valid_radius) {
            if (dist(psi.valid_radius) < eps)
                throw CapacityError(
                    "local variety: ball is not compactly contained in the "
                    "certified disk");
            hi = psi.valid_radius;
            break;
        }
    }
    while (hi - lo > ray_tol * hi) {
        double mid = 0.5 * (lo + hi);
        (dist(mid) < eps ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

AreaReport area_of_local_variety(const UnstableParametrization& psi,
                                 double eps, const AreaParams& ap) {
    if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
    if (!(psi.valid_radius > 0.0))
        throw PreconditionError("parametrization carries no certified disk");
    AreaReport rep;
    rep.eps = eps;
    rep.rho.resize(ap.n_theta);
    rep.rho_min = std::numeric_limits<double>::infinity();
    rep.rho_max = 0.0;
    for (int k = 0; k < ap.n_theta; ++k) {
        double th = 2.0 * M_PI * k / ap.n_theta;
        double rho = ray_crossing(psi, th, eps, ap.ray_tol);
        rep.rho[k] = rho;
        rep.rho_min = std::min(rep.rho_min, rho);
        rep.rho_max = std::max(rep.rho_max, rho);
    }
    // Star check: the circle below the inradius must stay inside the ball.
    for (int k = 0; k < 4 * ap.n_theta; ++k) {
        double th = 2.0 * M_PI * k / (4 * ap.n_theta);
        ComplexPoint q = psi.eval(0.9 * rep.rho_min * std::polar(1.0, th));
        if (norm_2(q - psi.base) >= eps) {
            rep.star_check = false;
            break;
        }
    }
    // Area of the image with multiplicity: integral of |psi'|^2 over the
    // traced component, in polar coordinates with Simpson along each ray.
    int nr = ap.n_rho + (ap.n_rho % 2);  // even interval count
    double area = 0.0;
    for (int k = 0; k < ap.n_theta; ++k) {
        double th = 2.0 * M_PI * k / ap.n_theta;
        cplx dir = std::polar(1.0, th);
        double R = rep.rho[k];
        double h = R / nr;
        double ray = 0.0;
        for (int i = 0; i <= nr; ++i) {
            double rho = i * h;
            ComplexPoint dp = psi.deriv(rho * dir);
            double g = (norm_2(dp) * norm_2(dp)) * rho;
            double w = (i == 0 || i == nr) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            ray += w * g;
        }
        area += ray * h / 3.0;
    }
    rep.area = area * (2.0 * M_PI / ap.n_theta);
    return rep;
}

ProperDiskDatum proper_disk_datum(const UnstableParametrization& psi,
                                  double R0, double R1, const AreaParams& ap) {
    if (!(0.0 < R0 && R0 < R1))
        throw PreconditionError("need 0 < R0 < R1");
    ProperDiskDatum d;
    d.R0 = R0;
    d.R1 = R1;
    AreaReport inner = area_of_local_variety(psi, R0, ap);
    AreaReport outer = area_of_local_variety(psi, R1, ap);
    d.rho_inner = inner.rho;
    d.rho_outer = outer.rho;
    d.area = outer.area;
    return d;
}

ModulusReport modulus_bound_check(const ProperDiskDatum& datum) {
    if (datum.rho_inner.size() != datum.rho_outer.size() ||
        datum.rho_inner.empty())
        throw PreconditionError("mismatched polar traces");
    double in_max = 0.0, in_min = std::numeric_limits<double>::infinity();
    double out_max = 0.0, out_min = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < datum.rho_inner.size(); ++i) {
        double ri = datum.rho_inner[i], ro = datum.rho_outer[i];
        if (!(0.0 < ri && ri < ro))
            throw PreconditionError("traces do not bound an annulus");
        in_max = std::max(in_max, ri);
        in_min = std::min(in_min, ri);
        out_max = std::max(out_max, ro);
        out_min = std::min(out_min, ro);
    }
    ModulusReport rep;
    // Concentric bracket for the modulus of the in-between annulus (values
    // may be non-positive when the traces overlap radially; reported as-is).
    rep.lhs_lo = std::log(out_min / in_max);
    rep.lhs_hi = std::log(out_max / in_min);
    double L = std::log(datum.R1 / datum.R0);
    if (L <= 0.0) throw PreconditionError("need R1 > R0");
    // L / ((A/R1^2) (2 + 1/L)) with the 1/L cleared: L^2 R1^2 / (A (2L + 1)).
    rep.rhs = L * L * datum.R1 * datum.R1 / (datum.area * (2.0 * L + 1.0));
    rep.rhs_slope = rep.rhs / L;
    rep.margin = rep.lhs_lo - rep.rhs;
    rep.pass = rep.lhs_lo >= rep.rhs;
    return rep;
}

ContractionReport backward_contraction(const HenonMap& m,
                                       const Certificate& cert,
                                       const UnstableParametrization& psi,
                                       double eps, int n_max,
                                       const AreaParams& ap) {
    if (cert.verdict != "PASS")
        throw PreconditionError(
            "backward contraction requires a PASS certificate");
    if (n_max < 1) throw PreconditionError("n_max must be >= 1");
    ContractionReport rep;
    rep.eps = eps;
    AreaReport ar = area_of_local_variety(psi, eps, ap);

    // Boundary sample of the traced component; the squared distance between
    // curve points is subharmonic in each argument, so the diameter is
    // attained on the boundary.
    int K = std::max(ap.n_theta, 192);
    std::vector<ComplexPoint> pts(K);
    for (int k = 0; k < K; ++k) {
        double th = 2.0 * M_PI * k / K;
        // interpolate the polar trace
        double pos = th / (2.0 * M_PI) * ap.n_theta;
        int i0 = static_cast<int>(pos) % ap.n_theta;
        int i1 = (i0 + 1) % ap.n_theta;
        double fr = pos - std::floor(pos);
        double rho = (1.0 - fr) * ar.rho[i0] + fr * ar.rho[i1];
        pts[k] = psi.eval(rho * std::polar(1.0, th));
    }
    auto diam_of = [](const std::vector<ComplexPoint>& v) {
        double best = 0.0;
        for (size_t i = 0; i < v.size(); ++i)
            for (size_t j = i + 1; j < v.size(); ++j)
                best = std::max(best, norm_2(v[i] - v[j]));
        return best;
    };

    // Quadrature nodes carrying point + transported tangent for the
    // backward areas: d/dzeta (f^{-n} o psi) = Df^{-n} psi', so the area of
    // f^{-n} V is the integral of the transported tangent norm squared.
    struct Node {
        ComplexPoint q;
        ComplexPoint v;  // psi'(zeta) transported by Df^{-1} at each level
        double w;        // rho * simpson weight * h/3 * dtheta
    };
    std::vector<Node> nodes;
    int nr = ap.n_rho + (ap.n_rho % 2);
    for (int k = 0; k < ap.n_theta; ++k) {
        double th = 2.0 * M_PI * k / ap.n_theta;
        cplx dir = std::polar(1.0, th);
        double R = ar.rho[k];
        double h = R / nr;
        for (int i = 0; i <= nr; ++i) {
            double rho = i * h;
            double w = (i == 0 || i == nr) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            Node nd;
            nd.q = psi.eval(rho * dir);
            nd.v = psi.deriv(rho * dir);
            nd.w = rho * w * (h / 3.0) * (2.0 * M_PI / ap.n_theta);
            nodes.push_back(nd);
        }
    }

    ContractionRow row0;
    row0.n = 0;
    row0.diam = diam_of(pts);
    row0.area = ar.area;
    rep.rows.push_back(row0);

    rep.theta_envelope = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        for (auto& q : pts) q = inverse(m, q);
        ContractionRow row;
        row.n = n;
        row.diam = diam_of(pts);
        double area = 0.0;
        for (auto& nd : nodes) {
            nd.v = jacobian_inverse(m, nd.q).apply(nd.v);
            nd.q = inverse(m, nd.q);
            area += (norm_2(nd.v) * norm_2(nd.v)) * nd.w;
        }
        row.area = area;
        rep.rows.push_back(row);
        rep.theta_envelope =
            std::max(rep.theta_envelope, std::pow(row.diam, 1.0 / n));
    }

    std::vector<double> xs, ys;
    for (const auto& r : rep.rows) {
        if (r.diam > 0) {
            xs.push_back(r.n);
            ys.push_back(std::log(r.diam));
        }
    }
    LineFit lf = fit_line(xs, ys);
    rep.theta_fit = std::exp(lf.b);
    rep.replay_ok = true;
    for (const auto& r : rep.rows) {
        if (r.n >= 1 &&
            r.diam > std::pow(rep.theta_envelope, r.n) * (1.0 + 1e-12))
            rep.replay_ok = false;
    }
    return rep;
}

LyapunovReport lyapunov_estimate(const CertifyResult& res) {
    LyapunovReport rep;
    rep.rows = res.orbits;
    rep.log_kappa = res.cert.kappa > 0 ? std::log(res.cert.kappa)
                                       : -std::numeric_limits<double>::infinity();
    rep.min_exponent = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.rows)
        rep.min_exponent = std::min(rep.min_exponent, r.lyapunov_exponent);
    rep.pass = !rep.rows.empty() && rep.min_exponent >= rep.log_kappa - 1e-9;
    return rep;
}

BallGrowthFit ball_green_growth(const HenonMap& m, const ComplexPoint& x,
                                const std::vector<double>& radii,
                                int directions, const GreenParams& gp) {
    if (radii.size() < 2 || directions < 1)
        throw PreconditionError("need >= 2 radii and >= 1 direction");
    auto rng = seeded_rng(0xba11c0deull, "ball-growth-directions");
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<ComplexPoint> dirs;
    for (int j = 0; j < directions; ++j) {
        ComplexPoint v;
        if (j % 2 == 0) {
            double phi = M_PI * j / directions;
            v = ComplexPoint{cplx(std::cos(phi), 0.0), cplx(std::sin(phi), 0.0)};
        } else {
            v = ComplexPoint{cplx(unif(rng), unif(rng)),
                             cplx(unif(rng), unif(rng))};
        }
        double nv = norm_2(v);
        if (nv == 0.0) continue;
        dirs.push_back((1.0 / nv) * v);
    }
    BallGrowthFit fitrep;
    std::vector<double> xs, ys;
    for (double r : radii) {
        double best = 0.0;
        for (const auto& v : dirs) {
            GreenEstimate g = green_plus(m, x + r * v, gp);
            if (g.reliable()) best = std::max(best, g.value);
        }
        fitrep.radii.push_back(r);
        fitrep.max_green.push_back(best);
        if (best > 0.0) {
            xs.push_back(std::log(r));
            ys.push_back(std::log(best));
        }
    }
    if (xs.size() < 2)
        throw PreconditionError("insufficient positive Green samples for fit");
    LineFit lf = fit_line(xs, ys);
    fitrep.C = std::exp(lf.a);
    fitrep.exponent = lf.b;
    fitrep.r2 = lf.r2;
    return fitrep;
}

}  // namespace qx
