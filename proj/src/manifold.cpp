#include "qx/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace qx {

ComplexPoint UnstableParametrization::eval(cplx zeta) const {
    ComplexPoint acc{cplx{0.0}, cplx{0.0}};
    for (std::size_t k = coeffs.size(); k-- > 0;) {
        acc.x = acc.x * zeta + coeffs[k].x;
        acc.y = acc.y * zeta + coeffs[k].y;
    }
    return {base.x + zeta * acc.x, base.y + zeta * acc.y};
}

ComplexPoint UnstableParametrization::deriv(cplx zeta) const {
    ComplexPoint acc{cplx{0.0}, cplx{0.0}};
    for (std::size_t k = coeffs.size(); k-- > 0;) {
        double w = static_cast<double>(k + 1);
        acc.x = acc.x * zeta + w * coeffs[k].x;
        acc.y = acc.y * zeta + w * coeffs[k].y;
    }
    return acc;
}

Series2 UnstableParametrization::as_series() const {
    Series2 s(coeffs.size() + 1);
    s.x.c[0] = base.x;
    s.y.c[0] = base.y;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        s.x.c[k + 1] = coeffs[k].x;
        s.y.c[k + 1] = coeffs[k].y;
    }
    return s;
}

namespace {

Series2 apply_map_n(const HenonMap& m, Series2 s, int period, bool inverse_map) {
    for (int j = 0; j < period; ++j)
        s = inverse_map ? apply_map_inverse(m, s) : apply_map(m, s);
    return s;
}

ComplexPoint iterate_n(const HenonMap& m, ComplexPoint q, int period,
                       bool inverse_map) {
    return iterate(m, q, inverse_map ? -period : period);
}

// Canonical phase: rotate the eigenvector so its largest component is real
// positive.  Keeps real maps real and makes reports reproducible.
ComplexPoint canonical_phase(const ComplexPoint& v) {
    cplx lead = std::abs(v.x) >= std::abs(v.y) ? v.x : v.y;
    double mag = std::abs(lead);
    if (mag == 0.0) return v;
    cplx rot = std::conj(lead) / mag;
    return rot * v;
}

struct EngineResult {
    std::vector<ComplexPoint> coeffs;
    double valid_radius;
    double residual;
};

// Order-by-order Taylor solve of F(psi(zeta)) = psi(lambda zeta) where F is
// f^period (or its inverse).  At order k the unknown a_k enters through
// (lambda^k I - A) a_k = T_k with A = DF(base) and T_k the zeta^k coefficient
// of F applied to the lower-order part.
EngineResult solve_linearizer(const HenonMap& m, const ComplexPoint& base,
                              int period, bool inverse_map, cplx lambda,
                              const ComplexPoint& direction,
                              const LinearizeParams& lp) {
    const int N = lp.order;
    Series2 psi(N + 1);
    psi.x.c[0] = base.x;
    psi.y.c[0] = base.y;
    psi.x.c[1] = direction.x;
    psi.y.c[1] = direction.y;

    Mat2 A = Mat2::identity();
    {
        ComplexPoint q = base;
        for (int j = 0; j < period; ++j) {
            A = (inverse_map ? jacobian_inverse(m, q) : jacobian(m, q)) * A;
            q = inverse_map ? inverse(m, q) : evaluate(m, q);
        }
    }
    Eigen2 eg = eigen2(A);

    cplx lam_pow = lambda;
    for (int k = 2; k <= N; ++k) {
        lam_pow *= lambda;
        for (cplx eig : {eg.lambda1, eg.lambda2}) {
            double den = std::abs(lam_pow - eig);
            if (den < lp.resonance_tol)
                throw ResonanceError(
                    "linearizer resonance: |lambda^k - eig| below tolerance at k=" +
                        std::to_string(k),
                    k, den);
        }
        Series2 lhs = apply_map_n(m, psi, period, inverse_map);
        ComplexPoint tk = lhs.coeff(k);
        // Solve (lambda^k I - A) a_k = tk.
        Mat2 sys{lam_pow - A.a, -A.b, -A.c, lam_pow - A.d};
        ComplexPoint ak = solve2(sys, tk);
        psi.x.c[k] = ak.x;
        psi.y.c[k] = ak.y;
    }

    EngineResult er;
    er.coeffs.resize(N);
    for (int k = 1; k <= N; ++k) er.coeffs[k - 1] = psi.coeff(k);

    // Certify a working disk by measuring the true dynamics residual on a
    // geometric radius ladder; keep the largest radius that stays below the
    // (relative) tolerance.
    double rho_cap = 0.0;
    for (int k = N / 2; k <= N; ++k) {
        double mag = norm_2(psi.coeff(k));
        if (mag <= 0.0) continue;
        double est = std::pow(mag, -1.0 / k);
        rho_cap = rho_cap == 0.0 ? est : std::min(rho_cap, est);
    }
    if (rho_cap == 0.0) rho_cap = 1.0;
    rho_cap *= 2.0;

    auto residual_at = [&](double r) {
        double worst = 0.0;
        double scale_ref = 1.0;
        for (int i = 0; i < lp.residual_samples; ++i) {
            cplx zeta = std::polar(r, 2.0 * M_PI * i / lp.residual_samples);
            ComplexPoint via_map = base, via_series;
            {
                ComplexPoint acc{cplx{0.0}, cplx{0.0}};
                for (std::size_t k = er.coeffs.size(); k-- > 0;) {
                    acc.x = acc.x * zeta + er.coeffs[k].x;
                    acc.y = acc.y * zeta + er.coeffs[k].y;
                }
                via_series = {base.x + zeta * acc.x, base.y + zeta * acc.y};
            }
            via_map = iterate_n(m, via_series, period, inverse_map);
            cplx lz = lambda * zeta;
            ComplexPoint acc{cplx{0.0}, cplx{0.0}};
            for (std::size_t k = er.coeffs.size(); k-- > 0;) {
                acc.x = acc.x * lz + er.coeffs[k].x;
                acc.y = acc.y * lz + er.coeffs[k].y;
            }
            ComplexPoint shifted{base.x + lz * acc.x, base.y + lz * acc.y};
            worst = std::max(worst, norm_2(via_map - shifted));
            scale_ref = std::max(scale_ref, norm_2(shifted - base));
        }
        return worst / scale_ref;
    };

    double best = 0.0, best_res = 0.0;
    const int ladder = 48;
    for (int j = 0; j < ladder; ++j) {
        double r = rho_cap * std::pow(10.0, -4.0 * (ladder - 1 - j) / (ladder - 1));
        double res = residual_at(r);
        if (res <= lp.residual_tol) {
            best = r;
            best_res = res;
        }
    }
    if (best == 0.0)
        throw CapacityError("linearizer: no radius passed the residual test");
    er.valid_radius = best;
    er.residual = best_res;
    return er;
}

}  // namespace

UnstableParametrization linearize_unstable(const HenonMap& m,
                                           const PeriodicOrbit& orbit,
                                           int index,
                                           const LinearizeParams& lp) {
    if (orbit.classification != OrbitClass::Saddle)
        throw PreconditionError("linearize_unstable: orbit is not a saddle");
    if (std::abs(orbit.eig_unstable) <= 1.0 + lp.min_unstable)
        throw PreconditionError(
            "linearize_unstable: unstable eigenvalue too close to 1");
    ComplexPoint base = orbit.points[index % orbit.period];

    Mat2 A = jacobian_product(m, base, orbit.period);
    Eigen2 eg = eigen2(A);
    ComplexPoint dir = canonical_phase(eg.v1);
    cplx lambda = eg.lambda1;

    EngineResult er = solve_linearizer(m, base, orbit.period, false, lambda,
                                       dir, lp);
    UnstableParametrization psi;
    psi.base = base;
    psi.period = orbit.period;
    psi.multiplier = lambda;
    psi.coeffs = std::move(er.coeffs);
    psi.valid_radius = er.valid_radius;
    psi.residual_bound = er.residual;
    return psi;
}

UnstableParametrization linearize_stable(const HenonMap& m,
                                         const PeriodicOrbit& orbit, int index,
                                         const LinearizeParams& lp) {
    if (orbit.classification != OrbitClass::Saddle)
        throw PreconditionError("linearize_stable: orbit is not a saddle");
    ComplexPoint base = orbit.points[index % orbit.period];

    // Unstable data of the inverse map: Df^{-period} = (Df^period)^{-1}, so
    // the expanding eigenvalue is 1/eig_stable with the same eigenvector.
    Mat2 A = Mat2::identity();
    {
        ComplexPoint q = base;
        for (int j = 0; j < orbit.period; ++j) {
            A = jacobian_inverse(m, q) * A;
            q = inverse(m, q);
        }
    }
    Eigen2 eg = eigen2(A);
    if (std::abs(eg.lambda1) <= 1.0 + lp.min_unstable)
        throw PreconditionError(
            "linearize_stable: contracting eigenvalue too close to 1");
    ComplexPoint dir = canonical_phase(eg.v1);

    EngineResult er = solve_linearizer(m, base, orbit.period, true,
                                       eg.lambda1, dir, lp);
    UnstableParametrization psi;
    psi.base = base;
    psi.period = -orbit.period;  // negative period marks the inverse dynamics
    psi.multiplier = eg.lambda1;
    psi.coeffs = std::move(er.coeffs);
    psi.valid_radius = er.valid_radius;
    psi.residual_bound = er.residual;
    return psi;
}

UnstableParametrization push_forward(const HenonMap& m,
                                     const UnstableParametrization& psi,
                                     const LinearizeParams& lp) {
    bool inv = psi.period < 0;
    int period = std::abs(psi.period);
    Series2 s = psi.as_series();
    s = inv ? apply_map_inverse(m, s) : apply_map(m, s);

    UnstableParametrization out;
    out.base = {s.x.c[0], s.y.c[0]};
    out.period = psi.period;
    out.multiplier = psi.multiplier;
    out.coeffs.resize(psi.coeffs.size());
    for (std::size_t k = 1; k < s.x.size(); ++k)
        out.coeffs[k - 1] = {s.x.c[k], s.y.c[k]};
    out.scale = psi.scale;

    // Re-measure the certified disk for the pushed series.
    double worst = 0.0, scale_ref = 1.0;
    double r = psi.valid_radius;
    for (int i = 0; i < lp.residual_samples; ++i) {
        cplx zeta = std::polar(r, 2.0 * M_PI * i / lp.residual_samples);
        ComplexPoint via_map =
            iterate_n(m, out.eval(zeta), period, inv);
        ComplexPoint shifted = out.eval(psi.multiplier * zeta);
        worst = std::max(worst, norm_2(via_map - shifted));
        scale_ref = std::max(scale_ref, norm_2(shifted - out.base));
    }
    double res = worst / scale_ref;
    while (res > lp.residual_tol && r > 1e-12) {
        r *= 0.5;
        worst = 0.0;
        scale_ref = 1.0;
        for (int i = 0; i < lp.residual_samples; ++i) {
            cplx zeta = std::polar(r, 2.0 * M_PI * i / lp.residual_samples);
            ComplexPoint via_map =
                iterate_n(m, out.eval(zeta), period, inv);
            ComplexPoint shifted = out.eval(psi.multiplier * zeta);
            worst = std::max(worst, norm_2(via_map - shifted));
            scale_ref = std::max(scale_ref, norm_2(shifted - out.base));
        }
        res = worst / scale_ref;
    }
    out.valid_radius = r;
    out.residual_bound = res;
    return out;
}

double functional_residual(const HenonMap& m,
                           const UnstableParametrization& psi, double r,
                           int samples, std::uint64_t seed) {
    bool inv = psi.period < 0;
    int period = std::abs(psi.period);
    auto rng = seeded_rng(seed, "functional-residual");
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> rad(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        cplx zeta = i < samples / 2
                        ? std::polar(r, 2.0 * M_PI * i / (samples / 2))
                        : std::polar(r * std::sqrt(rad(rng)), ang(rng));
        ComplexPoint via_map = iterate_n(m, psi.eval(zeta), period, inv);
        ComplexPoint shifted = psi.eval(psi.multiplier * zeta);
        worst = std::max(worst, norm_2(via_map - shifted));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// m-function machinery (shared with the 1-D pipeline through GreenAlong).

GreenAlong green_along(const HenonMap& m, const UnstableParametrization& psi,
                       const GreenFn& green, int j_cap) {
    // Factor picked up by one application of the functional equation.
    const double dpow =
        std::pow(static_cast<double>(m.degree()), std::abs(psi.period));
    return [psi, green, j_cap, dpow](cplx zeta) -> GreenEstimate {
        cplx z = zeta;
        int j = 0;
        while (std::abs(z) > psi.valid_radius && j < j_cap) {
            z /= psi.multiplier;
            ++j;
        }
        if (std::abs(z) > psi.valid_radius)
            throw CapacityError(
                "green_along: zeta beyond the extended evaluation domain");
        GreenEstimate ge = green(psi.eval(z));
        if (j > 0) {
            double factor = std::pow(dpow, j);
            ge.value *= factor;
            ge.error_bound *= factor;
        }
        return ge;
    };
}

double extended_capacity(const UnstableParametrization& psi, int j_cap) {
    double cap =
        psi.valid_radius * std::pow(std::abs(psi.multiplier), j_cap);
    return std::min(cap, 1e12);
}

CircleMax circle_max_green(const GreenAlong& g, double r,
                           const MFunctionParams& mp) {
    const int K = mp.circle_samples;
    std::vector<double> u(K);
    CircleMax out;
    out.reliable = true;
    int best = 0;
    for (int j = 0; j < K; ++j) {
        GreenEstimate ge = g(std::polar(r, 2.0 * M_PI * j / K));
        if (!ge.reliable()) out.reliable = false;
        u[j] = ge.value;
        if (u[j] > u[best]) best = j;
    }
    double grid_max = u[best];

    auto eval_theta = [&](double th) {
        GreenEstimate ge = g(std::polar(r, th));
        if (!ge.reliable()) out.reliable = false;
        return ge.value;
    };

    // Refine every candidate arc whose grid sample comes close to the grid
    // winner; the golden-section pass removes the O((2pi/K)^2) alignment
    // error of a bare grid max.  The drop window is relative so that long
    // flat zero arcs (bounded directions) are never treated as candidates.
    double h = 2.0 * M_PI / K;
    out.value = grid_max;
    out.theta = best * h;
    if (grid_max <= 0.0) return out;  // whole circle in the zero set
    double drop = 0.05 * grid_max;
    for (int j = 0; j < K; ++j) {
        double um = u[(j + K - 1) % K], uc = u[j], up = u[(j + 1) % K];
        if (uc < um || uc < up) continue;        // not a local max
        if (uc < grid_max - drop) continue;      // hopeless arc
        double a = (j - 1) * h, b = (j + 1) * h;
        const double gr = 0.6180339887498949;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = eval_theta(x1), f2 = eval_theta(x2);
        while (b - a > mp.refine_theta_tol) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = eval_theta(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = eval_theta(x1);
            }
        }
        double fm = std::max(std::max(f1, f2), uc);
        if (fm > out.value) {
            out.value = fm;
            out.theta = 0.5 * (a + b);
        }
    }
    return out;
}

MFunction m_function(const GreenAlong& g, const std::vector<double>& radii,
                     double valid_radius, const MFunctionParams& mp) {
    MFunction mf;
    mf.circle_samples = mp.circle_samples;
    for (double r : radii) {
        if (r <= 0.0)
            throw PreconditionError("m_function: radii must be positive");
        if (r > valid_radius)
            throw CapacityError(
                "m_function: radius exceeds the certified disk");
        CircleMax cm = circle_max_green(g, r, mp);
        mf.radii.push_back(r);
        mf.values.push_back(cm.value);
        mf.reliable.push_back(cm.reliable);
    }
    return mf;
}

double solve_m_radius(const GreenAlong& g, double target, double lo,
                      double hi_cap, double rel_tol,
                      const MFunctionParams& mp) {
    auto m_at = [&](double r) { return circle_max_green(g, r, mp).value; };

    double a = lo, fa = m_at(a);
    while (fa > target) {
        a *= 0.5;
        if (a < 1e-14)
            throw CapacityError("solve_m_radius: no lower bracket");
        fa = m_at(a);
    }
    double b = std::min(2.0 * a, hi_cap), fb = m_at(b);
    while (fb < target) {
        if (b >= hi_cap)
            throw CapacityError(
                "solve_m_radius: level not attained inside the certified disk");
        b = std::min(b * 1.7, hi_cap);
        fb = m_at(b);
    }
    while ((b - a) > rel_tol * b) {
        double mid = 0.5 * (a + b);
        double fm = m_at(mid);
        if (fm < target)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

NormalizationRecord normalize(const HenonMap& m, UnstableParametrization& psi,
                              const GreenFn& green, double t,
                              const NormalizeParams& np) {
    if (t <= 0.0) throw PreconditionError("normalize: t must be positive");
    GreenAlong g = green_along(m, psi, green);
    double s = solve_m_radius(g, t, std::min(1.0, 0.5 * psi.valid_radius),
                              extended_capacity(psi), np.rel_tol, np.mf);
    // zeta -> s * zeta
    cplx pw{1.0};
    for (auto& c : psi.coeffs) {
        pw *= s;
        c = pw * c;
    }
    psi.valid_radius /= s;
    psi.scale *= s;
    psi.normalized = true;
    psi.t_level = t;

    NormalizationRecord rec;
    rec.scale = s;
    rec.t = t;
    rec.achieved =
        circle_max_green(green_along(m, psi, green), 1.0, np.mf).value;
    return rec;
}

StepMultiplier step_multiplier(const HenonMap& m,
                               const UnstableParametrization& psi_x,
                               const UnstableParametrization& psi_fx,
                               const GreenFn& green,
                               const NormalizeParams& np) {
    if (!psi_x.normalized || !psi_fx.normalized ||
        psi_x.t_level != psi_fx.t_level)
        throw PreconditionError(
            "step_multiplier: both parametrizations must share a level t");
    double t = psi_x.t_level;
    int d = m.degree();

    GreenAlong g_fx = green_along(m, psi_fx, green);
    double modulus = solve_m_radius(g_fx, d * t, 1.0,
                                    extended_capacity(psi_fx), np.rel_tol,
                                    np.mf);

    // Argument (and a cross-check on the modulus) from the local germ
    // psi_fx^{-1} o f o psi_x, derivative at 0 by central differences.
    Series2 sfx = psi_fx.as_series();
    bool use_x = std::abs(psi_fx.coeffs[0].x) >= std::abs(psi_fx.coeffs[0].y);
    Series w = use_x ? sfx.x : sfx.y;
    w.c[0] = 0.0;  // subtract the base; now w(0)=0, w'(0)!=0
    Series winv = series_invert(w);

    bool inv = psi_x.period < 0;
    auto germ = [&](cplx h) {
        ComplexPoint p = psi_x.eval(h);
        p = inv ? inverse(m, p) : evaluate(m, p);
        cplx coord = use_x ? (p.x - psi_fx.base.x) : (p.y - psi_fx.base.y);
        return winv.eval(coord);
    };
    const double h = 1e-6;
    cplx fd = (germ(cplx{h, 0.0}) - germ(cplx{-h, 0.0})) / (2.0 * h);

    StepMultiplier sm;
    sm.modulus = modulus;
    sm.fd_modulus = std::abs(fd);
    sm.lambda = std::polar(modulus, std::arg(fd));
    return sm;
}

}  // namespace qx
