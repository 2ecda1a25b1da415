#include "qx/poly1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qx {

namespace {

bool lex_less(cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

std::string fmt1(double v) {
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
}

// g^n and (g^n)' at z by chain-rule accumulation.
struct IterVal {
    cplx v, dv;
};
IterVal iter_with_deriv(const Polynomial1D& g, cplx z, int n) {
    IterVal r{z, cplx{1.0}};
    for (int i = 0; i < n; ++i) {
        r.dv *= g.deriv(r.v);
        r.v = g.eval(r.v);
    }
    return r;
}

// Newton polish of g^n(z) = z.  Runs on a step-size criterion, not a
// residual one: near a parabolic the residual (z - root)^2 fools a residual
// break long before the points of a merging pair are distinguishable.
cplx newton_cycle_point(const Polynomial1D& g, cplx z, int n,
                        const CycleSearchParams& sp, bool mult2) {
    for (int it = 0; it < sp.newton_iters; ++it) {
        IterVal iv = iter_with_deriv(g, z, n);
        cplx h = iv.v - z, dh = iv.dv - 1.0;
        if (std::abs(dh) == 0.0) break;
        cplx step = h / dh;
        z -= mult2 ? 2.0 * step : step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
            std::abs(z) > 1e9)
            return cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
        if (std::abs(step) <= sp.newton_tol * (1.0 + std::abs(z))) break;
    }
    return z;
}

// Sorted-by-real tolerance dedup; input order does not matter.
std::vector<cplx> dedup_points(std::vector<cplx> raw, double tol) {
    std::sort(raw.begin(), raw.end(), lex_less);
    std::vector<cplx> out;
    for (cplx z : raw) {
        bool dup = false;
        for (auto it = out.rbegin();
             it != out.rend() && z.real() - it->real() <= tol; ++it)
            if (std::abs(*it - z) <= tol) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(z);
    }
    return out;
}

std::vector<cplx> canonical_rotation_1d(std::vector<cplx> pts) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < pts.size(); ++j)
        if (lex_less(pts[j], pts[best])) best = j;
    std::rotate(pts.begin(), pts.begin() + best, pts.end());
    return pts;
}

// First and second derivatives of g^n along an orbit (chain-rule
// recurrences D1 <- g' D1, D2 <- g'' D1^2 + g' D2).
struct OrbitDerivs {
    cplx d1{1.0}, d2{0.0};
};

cplx poly_deriv2(const Polynomial1D& g, cplx z) {
    cplx acc{0.0};
    for (std::size_t k = g.coeffs.size(); k-- > 2;)
        acc = acc * z +
              static_cast<double>(k) * static_cast<double>(k - 1) * g.coeffs[k];
    return acc;
}

OrbitDerivs orbit_derivs(const Polynomial1D& g, cplx z, int n) {
    OrbitDerivs od;
    for (int s = 0; s < n; ++s) {
        cplx dp = g.deriv(z);
        od.d2 = poly_deriv2(g, z) * od.d1 * od.d1 + dp * od.d2;
        od.d1 = dp * od.d1;
        z = g.eval(z);
    }
    return od;
}

// A parabolic cycle is a double root of h(z) = g^n(z) - z: inside the
// resulting cluster of width ~sqrt(ulp) the computed h is pure rounding
// noise (every double there satisfies the cycle equation exactly), so plain
// Newton deposits copies further apart than the dedup tolerance and no
// h-based step can collapse them.  The multiplier stays well conditioned:
// h'(z) = (g^n)'(z) - 1 has a simple root at the parabolic point, so when
// the measured multiplier is within 1e-6 of 1 we snap to the nearby root of
// h' and keep the result if the cycle equation still holds there.
cplx refine_near_parabolic(const Polynomial1D& g, cplx z, int n,
                           const CycleSearchParams& sp) {
    std::vector<cplx> orbit{z};
    for (int s = 1; s < n; ++s) orbit.push_back(g.eval(orbit.back()));
    if (std::abs(g.cycle_multiplier(orbit) - 1.0) > 1e-6) return z;
    cplx zr = z;
    for (int it = 0; it < 6; ++it) {
        OrbitDerivs od = orbit_derivs(g, zr, n);
        if (std::abs(od.d2) == 0.0) return z;
        cplx step = (od.d1 - 1.0) / od.d2;
        if (!(std::abs(step) <= 1e-3)) return z;
        zr -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(zr))) break;
    }
    if (std::abs(zr - z) > 1e-3) return z;
    if (std::abs(g.iterate(zr, n) - zr) > sp.accept_tol) return z;
    return zr;
}

}  // namespace

Polynomial1D::Polynomial1D(std::vector<cplx> c) : coeffs(std::move(c)) {
    if (coeffs.size() < 3)
        throw PreconditionError("Polynomial1D: degree >= 2 required");
    if (std::abs(coeffs.back() - 1.0) > 1e-12)
        throw PreconditionError("Polynomial1D: monic polynomial required");
}

cplx Polynomial1D::eval(cplx z) const {
    cplx acc{0.0};
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
    return acc;
}

cplx Polynomial1D::deriv(cplx z) const {
    cplx acc{0.0};
    for (std::size_t k = coeffs.size(); k-- > 1;)
        acc = acc * z + static_cast<double>(k) * coeffs[k];
    return acc;
}

cplx Polynomial1D::iterate(cplx z, int n) const {
    for (int i = 0; i < n; ++i) z = eval(z);
    return z;
}

cplx Polynomial1D::cycle_multiplier(const std::vector<cplx>& pts) const {
    cplx m{1.0};
    for (cplx p : pts) m *= deriv(p);
    return m;
}

double Polynomial1D::escape_radius() const {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < coeffs.size(); ++k)
        s += std::abs(coeffs[k]);
    // |g(z)| >= |z|^{d-1}(|z| - s) >= 2|z| once |z| >= max(1, s + 2).
    return std::max(1.0, s + 2.0);
}

std::vector<cplx> Polynomial1D::critical_points() const {
    const int dd = degree() - 1;  // degree of g'
    std::vector<cplx> q(dd + 1);
    double dscale = 0.0;
    for (int k = 1; k <= degree(); ++k) {
        q[k - 1] = static_cast<double>(k) * coeffs[k];
        dscale += std::abs(q[k - 1]);
    }
    cplx lead = q[dd];
    for (auto& c : q) c /= lead;
    double rad = 1.0;
    for (int k = 0; k < dd; ++k) rad = std::max(rad, std::abs(q[k]));
    rad += 1.0;

    std::vector<cplx> roots(dd);
    cplx w{0.4, 0.9}, p{1.0};
    for (int i = 0; i < dd; ++i) {
        p *= w;
        roots[i] = rad * p;
    }
    for (int it = 0; it < 400; ++it) {  // Durand-Kerner sweep
        double moved = 0.0;
        for (int i = 0; i < dd; ++i) {
            cplx num{0.0};
            for (int k = dd; k >= 0; --k) num = num * roots[i] + q[k];
            cplx den{1.0};
            for (int j = 0; j < dd; ++j)
                if (j != i) den *= roots[i] - roots[j];
            if (std::abs(den) == 0.0) continue;
            cplx delta = num / den;
            roots[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved <= 1e-15 * rad) break;
    }
    for (cplx r : roots)
        if (std::abs(deriv(r)) > 1e-10 * std::max(1.0, dscale))
            throw QxError("critical_points: derivative root failed its 1e-10 "
                          "verification");
    std::sort(roots.begin(), roots.end(), lex_less);
    return roots;
}

Polynomial1D quadratic_1d(cplx c) { return Polynomial1D({c, cplx{0.0}, cplx{1.0}}); }

GreenEstimate green_1d(const Polynomial1D& g, cplx z, const GreenParams& gp) {
    if (gp.tol <= 0.0) throw PreconditionError("green_1d: tol must be positive");
    const int d = g.degree();
    const double R = g.escape_radius();
    double S = 0.0;
    for (std::size_t k = 0; k + 1 < g.coeffs.size(); ++k)
        S += std::abs(g.coeffs[k]);
    const double big = std::pow(10.0, 280.0 / d);
    double scale = 1.0;
    GreenEstimate est;
    for (int n = 0; n <= gp.budget; ++n) {
        double mag = std::abs(z);
        if (mag >= R) {
            // |log(g(z)/z^d)| <= 2 S / |z| once |z| >= 2R >= 2S, and the
            // modulus at least doubles per step: geometric tail.
            double slack = 2.0 * S / mag;
            double tail = scale / d * slack / (1.0 - 1.0 / (2.0 * d));
            if ((tail <= gp.tol && mag >= 2.0 * R) || mag >= big) {
                est.value = scale * std::log(mag);
                est.error_bound = tail;
                est.iterations_used = n;
                est.status = GreenStatus::Escaped;
                return est;
            }
        }
        if (n == gp.budget) break;
        z = g.eval(z);
        scale /= d;
    }
    if (std::abs(z) <= R) {
        est.value = 0.0;
        est.error_bound = scale * (std::log(R) + 2.0 * std::log(2.0 + S));
        est.iterations_used = gp.budget;
        est.status = GreenStatus::Bounded;
        return est;
    }
    est.value = 0.0;
    est.error_bound = std::numeric_limits<double>::infinity();
    est.iterations_used = gp.budget;
    est.status = GreenStatus::Inconclusive;
    return est;
}

std::vector<Cycle1D> find_cycles_1d(const Polynomial1D& g, int n_max,
                                    const CycleSearchParams& sp) {
    if (n_max < 1) throw PreconditionError("find_cycles_1d: n_max >= 1");
    const double R = g.escape_radius();
    const int d = g.degree();
    auto rng = seeded_rng(sp.seed, "one-d-cycle-search");
    std::uniform_real_distribution<double> uang(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> urad(0.0, 1.0);

    std::vector<Cycle1D> out;
    for (int n = 1; n <= n_max; ++n) {
        std::vector<cplx> found;  // solutions of g^n(z) = z
        auto polish = [&](const std::vector<cplx>& batch) {
            for (cplx s : batch) {
                for (int pass = 0; pass < 2; ++pass) {
                    cplx z = newton_cycle_point(g, s, n, sp, pass == 1);
                    if (std::isfinite(z.real()) && std::abs(z) <= R + 1.0 &&
                        std::abs(g.iterate(z, n) - z) <= sp.accept_tol) {
                        found.push_back(refine_near_parabolic(g, z, n, sp));
                        break;
                    }
                }
            }
            found = dedup_points(std::move(found), sp.dedup_tol);
        };

        std::vector<cplx> seeds;
        if (d == 2 && n < 63) {
            // Inverse branches of z^2 + b z + c: each itinerary of n symbols,
            // pulled back cyclically, converges to the periodic point that
            // realizes it; this resolves near-degenerate pairs a seed grid
            // cannot separate.
            cplx b = g.coeffs[1], c0 = g.coeffs[0];
            for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
                cplx z{R, 0.0};
                for (int step = 0; step < sp.inverse_burn * n; ++step) {
                    cplx s = std::sqrt(b * b - 4.0 * (c0 - z));
                    z = 0.5 * (-b + (((mask >> (step % n)) & 1u) ? s : -s));
                }
                seeds.push_back(z);
            }
        }
        for (int ci = 1; ci <= 3; ++ci)
            for (int k = 0; k < sp.circle_grid; ++k)
                seeds.push_back(std::polar(
                    0.3 * ci * R,
                    2.0 * M_PI * (k + 0.25 * ci) / sp.circle_grid));
        polish(seeds);

        const double algebraic = std::pow(static_cast<double>(d), n);
        for (int round = 0; round < sp.reseed_rounds &&
                            static_cast<double>(found.size()) < algebraic;
             ++round) {
            std::vector<cplx> extra;
            for (int i = 0; i < sp.reseed_batch; ++i)
                extra.push_back(std::polar(R * std::sqrt(urad(rng)), uang(rng)));
            std::size_t before = found.size();
            polish(extra);
            if (found.size() == before) break;
        }

        // Keep exact period n, then group solutions into cycles through
        // their forward orbits; the canonical rotation collapses the n
        // rotated copies of each cycle.
        std::vector<Cycle1D> cycles_n;
        for (cplx z : found) {
            // Polished points satisfy their cycle equation to ~1e-12, so the
            // divisor test can be far tighter than the separation between
            // distinct deep cycles (which shrinks like 4^-n near +/-2).
            bool divisor = false;
            for (int m = 1; m < n && !divisor; ++m)
                if (n % m == 0 && std::abs(g.iterate(z, m) - z) <= sp.accept_tol)
                    divisor = true;
            if (divisor) continue;
            std::vector<cplx> orbit{z};
            for (int s = 1; s < n; ++s) orbit.push_back(g.eval(orbit.back()));
            orbit = canonical_rotation_1d(std::move(orbit));
            // Compare whole orbits up to cyclic rotation.  The canonical
            // starting point alone is not reliable: when two orbit points tie
            // in the lex order (the period-4 cycle of z^2 on the unit circle
            // holds conjugate points with equal real parts), rounding decides
            // the rotation and two copies of one cycle can canonicalize
            // differently.  Distinct cycles still separate at every
            // alignment, even the two period-n families of z^2 - 2 that get
            // within ~4^-n of each other near the fixed point 2.
            bool known = false;
            for (const auto& cyc : cycles_n) {
                double best = 1e300;
                for (int off = 0; off < n; ++off) {
                    double sep = 0.0;
                    for (int s = 0; s < n; ++s)
                        sep = std::max(
                            sep, std::abs(cyc.points[static_cast<std::size_t>(
                                              (s + off) % n)] -
                                          orbit[static_cast<std::size_t>(s)]));
                    best = std::min(best, sep);
                }
                if (best <= sp.dedup_tol) {
                    known = true;
                    break;
                }
            }
            if (known) continue;
            Cycle1D cyc;
            cyc.points = std::move(orbit);
            cyc.period = n;
            cyc.multiplier = g.cycle_multiplier(cyc.points);
            cyc.residual = std::abs(g.eval(cyc.points.back()) - cyc.points[0]);
            cyc.repelling = std::abs(cyc.multiplier) > 1.0 + sp.repelling_band;
            cycles_n.push_back(std::move(cyc));
        }
        std::sort(cycles_n.begin(), cycles_n.end(),
                  [](const Cycle1D& a, const Cycle1D& b) {
                      return lex_less(a.points[0], b.points[0]);
                  });
        for (auto& c : cycles_n) out.push_back(std::move(c));
    }
    return out;
}

std::vector<Cycle1D> repelling_cycles(const Polynomial1D& g, int n_max,
                                      const CycleSearchParams& sp) {
    std::vector<Cycle1D> all = find_cycles_1d(g, n_max, sp);
    std::vector<Cycle1D> rep;
    for (auto& c : all)
        if (c.repelling) rep.push_back(std::move(c));
    return rep;
}

Cycle1D cycle_from_itinerary(const Polynomial1D& g,
                             const std::vector<int>& symbols,
                             const CycleSearchParams& sp) {
    if (g.degree() != 2)
        throw PreconditionError(
            "cycle_from_itinerary: inverse branches implemented for degree 2");
    if (symbols.empty())
        throw PreconditionError("cycle_from_itinerary: empty itinerary");
    const int n = static_cast<int>(symbols.size());
    const cplx b = g.coeffs[1], c0 = g.coeffs[0];
    cplx z{g.escape_radius(), 0.0};
    for (int step = 0; step < sp.inverse_burn * n; ++step) {
        cplx s = std::sqrt(b * b - 4.0 * (c0 - z));
        z = 0.5 * (-b + (symbols[step % n] ? s : -s));
    }
    // The cycle residual scales like |multiplier| * step size, and targeted
    // itineraries exist to reach strongly expanding deep cycles: polish to
    // machine step size regardless of the catalog-wide setting.
    CycleSearchParams tight = sp;
    tight.newton_tol = std::min(sp.newton_tol, 1e-15);
    z = newton_cycle_point(g, z, n, tight, false);
    if (!std::isfinite(z.real()) ||
        std::abs(g.iterate(z, n) - z) > sp.accept_tol)
        throw QxError("cycle_from_itinerary: Newton polish missed the "
                      "residual target");
    for (int m = 1; m < n; ++m)
        if (n % m == 0 && std::abs(g.iterate(z, m) - z) <= 1e-7)
            throw PreconditionError(
                "cycle_from_itinerary: point has lower exact period");
    Cycle1D cyc;
    cyc.points.push_back(z);
    for (int s = 1; s < n; ++s) cyc.points.push_back(g.eval(cyc.points.back()));
    cyc.points = canonical_rotation_1d(std::move(cyc.points));
    cyc.period = n;
    cyc.multiplier = g.cycle_multiplier(cyc.points);
    cyc.residual = std::abs(g.eval(cyc.points.back()) - cyc.points[0]);
    cyc.repelling = std::abs(cyc.multiplier) > 1.0 + sp.repelling_band;
    return cyc;
}

namespace {

// Functional residual of g^n o phi = phi(lambda .) on |zeta| = r, measured
// relative to max(1, curve extent): on a small disk the curve extent is far
// below the rounding floor of iterating g^n in doubles (u * |lambda|), and
// what downstream Green evaluation needs is absolute accuracy in z.
double koenigs_residual(const Polynomial1D& g, const Series& phi, cplx base,
                        cplx lam, int n, double r, int samples) {
    double worst = 0.0, extent = 0.0;
    for (int i = 0; i < samples; ++i) {
        cplx zeta = std::polar(r, 2.0 * M_PI * (i + 0.3) / samples);
        cplx a = g.iterate(phi.eval(zeta), n);
        cplx b = phi.eval(lam * zeta);
        double diff = std::abs(a - b);
        if (!std::isfinite(diff)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, diff);
        extent = std::max(extent, std::abs(phi.eval(zeta) - base));
    }
    return worst / std::max(extent, 1.0);
}

// Direct-limit evaluation with the pull-back depth balancing truncation
// against rounding amplification; returns the best stabilized value.
cplx direct_limit_best(const Polynomial1D& g, const Linearizer1D& lin,
                       cplx zeta, double* stability) {
    double lam = std::abs(lin.multiplier);
    double A = 0.0;  // size of the dropped nonlinear part of phi
    if (lin.phi.size() > 2) A += std::abs(lin.phi.c[2]) * std::norm(zeta);
    if (lin.phi.size() > 3)
        A += std::abs(lin.phi.c[3]) * std::norm(zeta) * std::abs(zeta);
    double u = 2.2e-16 * (1.0 + std::abs(lin.base));
    int jstar = static_cast<int>(
        std::lround(std::log(std::max(A, 1e-30) / u) / (2.0 * std::log(lam))));
    // Perturbation must stay far above the ulp of the base point.
    double pert_floor = 1e-13 * (1.0 + std::abs(lin.base));
    double pert0 = std::abs(lin.scale) * std::abs(zeta);
    int jmax = pert0 > pert_floor
                   ? static_cast<int>(std::log(pert0 / pert_floor) /
                                      std::log(lam))
                   : 1;
    jmax = std::min(jmax, 4000);
    jstar = std::max(1, std::min(jstar, jmax));

    cplx best{0.0};
    double best_diff = std::numeric_limits<double>::infinity();
    cplx prev = koenigs_limit_eval(g, lin, zeta, std::max(1, jstar - 1));
    for (int j = jstar; j <= std::min(jstar + 2, jmax + 1); ++j) {
        cplx cur = koenigs_limit_eval(g, lin, zeta, j);
        double diff = std::abs(cur - prev);
        if (std::isfinite(diff) && diff < best_diff) {
            best_diff = diff;
            best = cur;
        }
        prev = cur;
    }
    if (stability) *stability = best_diff;
    return best;
}

}  // namespace

double direct_limit_disagreement(const Polynomial1D& g,
                                 const Linearizer1D& lin, double r) {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        cplx zeta = std::polar(r, 2.0 * M_PI * (i + 0.41) / 3.0);
        cplx series = lin.eval(zeta);
        cplx direct = direct_limit_best(g, lin, zeta, nullptr);
        double err =
            std::abs(series - direct) / std::max(1.0, std::abs(series));
        worst = std::max(worst, err);
    }
    return worst;
}

cplx koenigs_limit_eval(const Polynomial1D& g, const Linearizer1D& lin,
                        cplx zeta, int j) {
    cplx z = lin.base + lin.scale * zeta / std::pow(lin.multiplier, j);
    for (int i = 0; i < lin.period * j; ++i) {
        z = g.eval(z);
        if (!std::isfinite(z.real()) || std::abs(z) > 1e120) return z;
    }
    return z;
}

Linearizer1D linearizer_1d(const Polynomial1D& g, const Cycle1D& cycle,
                           int index, const Linearize1DParams& lp) {
    if (cycle.points.empty())
        throw PreconditionError("linearizer_1d: empty cycle");
    const int n = cycle.period;
    const cplx lam = cycle.multiplier;
    if (std::abs(lam) <= 1.0 + lp.min_unstable)
        throw PreconditionError("linearizer_1d: cycle is not repelling");

    Linearizer1D lin;
    lin.base = cycle.points[((index % n) + n) % n];
    lin.period = n;
    lin.multiplier = lam;

    const int N = lp.order;
    Series phi(N + 1);
    phi.c[0] = lin.base;
    phi.c[1] = 1.0;
    for (int k = 2; k <= N; ++k) {
        // T_k = [zeta^k] g^n(phi_low) with a_k still 0; then the functional
        // equation gives (lambda^k - lambda) a_k = T_k.
        Series comp = phi;
        for (int s = 0; s < n; ++s)
            comp = poly_on_series(g.coeffs, comp,
                                  static_cast<std::size_t>(k) + 1);
        cplx den = std::pow(lam, k) - lam;
        if (std::abs(den) <= lp.resonance_tol * std::abs(lam))
            throw ResonanceError("linearizer_1d: resonant multiplier power", k,
                                 std::abs(den));
        phi.c[k] = comp.coeff(k) / den;
    }
    lin.phi = phi;

    // Certified radius: start from the coefficient-decay cap and descend
    // until the measured relative residual passes.
    double rho_cap = std::numeric_limits<double>::infinity();
    for (int k = N / 2; k <= N; ++k) {
        double a = std::abs(phi.coeff(k));
        if (a > 0.0)
            rho_cap = std::min(rho_cap, std::pow(a, -1.0 / k));
    }
    if (!std::isfinite(rho_cap)) rho_cap = 1.0;
    rho_cap *= 2.0;

    bool certified = false;
    // The residual compares against phi(lambda zeta), so the usable radius
    // can sit a factor |lambda| below the series disk; widen the descent
    // accordingly for strongly expanding cycles.
    const double decades =
        4.0 + std::max(0.0, std::log10(std::abs(lam)));
    const int rungs = static_cast<int>(12.0 * decades) + 1;
    for (int i = 0; i < rungs; ++i) {
        double r = rho_cap * std::pow(10.0, -decades * i / (rungs - 1.0));
        double res = koenigs_residual(g, phi, lin.base, lam, n, r,
                                      lp.residual_samples);
        if (res <= lp.residual_tol) {
            lin.valid_radius = r;
            lin.residual_bound = res;
            certified = true;
            break;
        }
    }
    if (!certified)
        throw QxError("linearizer_1d: no radius certified the functional "
                      "equation");

    // Independent construction of the same germ: the direct iteration limit
    // must agree with the series; disagreement shrinks the certified disk.
    for (int attempt = 0; attempt < 8; ++attempt) {
        lin.cross_check_err =
            direct_limit_disagreement(g, lin, 0.5 * lin.valid_radius);
        if (lin.cross_check_err <= lp.cross_check_tol) break;
        lin.valid_radius *= 0.6;
    }
    if (lin.cross_check_err > lp.cross_check_tol)
        throw QxError(
            "linearizer_1d: series and direct-limit evaluations disagree");
    return lin;
}

GreenAlong green_along_1d(const Polynomial1D& g, const Linearizer1D& lin,
                          const GreenParams& gp, int j_cap) {
    const double dpow =
        std::pow(static_cast<double>(g.degree()), lin.period);
    return [g, lin, gp, j_cap, dpow](cplx zeta) -> GreenEstimate {
        cplx z = zeta;
        int j = 0;
        while (std::abs(z) > lin.valid_radius && j < j_cap) {
            z /= lin.multiplier;
            ++j;
        }
        if (std::abs(z) > lin.valid_radius)
            throw CapacityError(
                "green_along_1d: zeta beyond the extended evaluation domain");
        GreenEstimate ge = green_1d(g, lin.eval(z), gp);
        if (j > 0) {
            double factor = std::pow(dpow, j);
            ge.value *= factor;
            ge.error_bound *= factor;
        }
        return ge;
    };
}

double extended_capacity_1d(const Linearizer1D& lin, int j_cap) {
    double cap =
        lin.valid_radius * std::pow(std::abs(lin.multiplier), j_cap);
    return std::min(cap, 1e12);
}

NormalizationRecord normalize_1d(const Polynomial1D& g, Linearizer1D& lin,
                                 double t, const NormalizeParams& np) {
    if (t <= 0.0) throw PreconditionError("normalize_1d: t must be positive");
    GreenAlong ga = green_along_1d(g, lin, np.mf.green);
    double s =
        solve_m_radius(ga, t, std::min(1.0, 0.5 * lin.valid_radius),
                       extended_capacity_1d(lin), np.rel_tol, np.mf);
    lin.phi = series_rescale(lin.phi, s);
    lin.valid_radius /= s;
    lin.scale *= s;
    lin.normalized = true;
    lin.t_level = t;

    NormalizationRecord rec;
    rec.scale = s;
    rec.t = t;
    rec.achieved =
        circle_max_green(green_along_1d(g, lin, np.mf.green), 1.0, np.mf)
            .value;
    return rec;
}

StepMultiplier step_multiplier_1d(const Polynomial1D& g,
                                  const Linearizer1D& lin_x,
                                  const Linearizer1D& lin_gx,
                                  const NormalizeParams& np) {
    if (!lin_x.normalized || !lin_gx.normalized ||
        lin_x.t_level != lin_gx.t_level)
        throw PreconditionError(
            "step_multiplier_1d: both linearizers must share a level t");
    const double t = lin_x.t_level;
    const int d = g.degree();

    GreenAlong gfx = green_along_1d(g, lin_gx, np.mf.green);
    double modulus = solve_m_radius(gfx, d * t, 1.0,
                                    extended_capacity_1d(lin_gx), np.rel_tol,
                                    np.mf);

    Series w = lin_gx.phi;
    w.c[0] = 0.0;
    Series winv = series_invert(w);
    auto germ = [&](cplx h) {
        return winv.eval(g.eval(lin_x.eval(h)) - lin_gx.base);
    };
    const double h = 1e-6;
    cplx fd = (germ(cplx{h, 0.0}) - germ(cplx{-h, 0.0})) / (2.0 * h);

    StepMultiplier sm;
    sm.modulus = modulus;
    sm.fd_modulus = std::abs(fd);
    sm.lambda = std::polar(modulus, std::arg(fd));
    return sm;
}

Certify1DResult certify_1d(const Polynomial1D& g,
                           const std::vector<Cycle1D>& catalog,
                           const Certify1DParams& cp) {
    if (catalog.empty()) throw PreconditionError("certify_1d: empty catalog");
    Certify1DParams p = cp;
    if (p.radius_grid.empty()) p.radius_grid = {0.5, 1.0, 2.0};
    const int d = g.degree();

    // Optional targeted subsample: order cycles by per-step expansion rate
    // |multiplier|^{1/period} and keep whole cycles until the point budget;
    // a subsample min only over-estimates the full min, so FAIL transfers.
    std::vector<std::size_t> sel(catalog.size());
    std::iota(sel.begin(), sel.end(), std::size_t{0});
    bool subsampled = false;
    if (p.point_budget > 0) {
        std::stable_sort(sel.begin(), sel.end(),
                         [&](std::size_t a, std::size_t b) {
                             double ra = std::pow(std::abs(catalog[a].multiplier),
                                                  1.0 / catalog[a].period);
                             double rb = std::pow(std::abs(catalog[b].multiplier),
                                                  1.0 / catalog[b].period);
                             return ra < rb;
                         });
        std::vector<std::size_t> keep;
        int used = 0;
        for (std::size_t idx : sel) {
            if (used > 0 && used + catalog[idx].period > p.point_budget) break;
            keep.push_back(idx);
            used += catalog[idx].period;
        }
        subsampled = keep.size() < catalog.size();
        std::sort(keep.begin(), keep.end());
        sel = std::move(keep);
    }

    Certify1DResult res;
    int skipped_non_repelling = 0;
    int failed_steps = 0;
    int truncated_grids = 0;

    for (std::size_t idx : sel) {
        const Cycle1D& cyc = catalog[idx];
        if (!cyc.repelling) {
            ++skipped_non_repelling;
            continue;
        }
        const int n = cyc.period;
        const std::size_t first = res.points.size();
        for (int j = 0; j < n; ++j) {
            CyclePointData1D dpt;
            dpt.cycle_index = static_cast<int>(idx);
            dpt.point_index = j;
            dpt.period = n;
            dpt.point = cyc.points[j];
            try {
                dpt.lin = linearizer_1d(g, cyc, j, p.lin);
                dpt.norm_rec = normalize_1d(g, dpt.lin, p.t, p.norm);
            } catch (const QxError& e) {
                dpt.excluded = true;
                dpt.exclusion_reason = e.what();
            }
            res.points.push_back(std::move(dpt));
        }

        OrbitAudit audit;
        audit.orbit_index = static_cast<int>(idx);
        audit.period = n;
        audit.eig_unstable_mod = std::abs(cyc.multiplier);
        audit.lyapunov_exponent = std::log(audit.eig_unstable_mod) / n;
        bool all_steps = true;
        double prod = 1.0;

        for (int j = 0; j < n; ++j) {
            CyclePointData1D& dj = res.points[first + j];
            if (dj.excluded) {
                all_steps = false;
                continue;
            }
            const double cap_j = extended_capacity_1d(dj.lin);
            std::vector<double> grid;
            for (double r : p.radius_grid) {
                if (r <= cap_j)
                    grid.push_back(r);
                else
                    dj.grid_truncated = true;
            }
            if (dj.grid_truncated) ++truncated_grids;
            GreenAlong gj = green_along_1d(g, dj.lin, p.norm.mf.green);
            dj.profile = m_function(gj, grid, cap_j, p.norm.mf);

            CyclePointData1D& dk = res.points[first + (j + 1) % n];
            if (dk.excluded) {
                all_steps = false;
                continue;
            }
            try {
                dj.step.mult = step_multiplier_1d(g, dj.lin, dk.lin, p.norm);
                dj.step.ok = true;
                prod *= dj.step.mult.modulus;
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
                std::abs(prod - audit.eig_unstable_mod) /
                audit.eig_unstable_mod;
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
    if (skipped_non_repelling > 0)
        c.caveats.push_back(std::to_string(skipped_non_repelling) +
                            " non-repelling cycle(s) ignored by the sample");
    if (failed_steps > 0)
        c.caveats.push_back(std::to_string(failed_steps) +
                            " per-step multiplier(s) unavailable");
    if (truncated_grids > 0)
        c.caveats.push_back(std::to_string(truncated_grids) +
                            " profile grid(s) truncated to the certified disk");
    if (subsampled)
        c.caveats.push_back(
            "targeted subsample of " + std::to_string(sel.size()) + "/" +
            std::to_string(catalog.size()) +
            " cycles (smallest per-step expansion first); the sample kappa "
            "upper-bounds the full-catalog kappa, so FAIL transfers");
    return res;
}

namespace {

bool near_root_of_unity(cplx mu, int q_max, double band, int* q_out,
                        int* p_out) {
    for (int q = 1; q <= q_max; ++q)
        for (int p = 0; p < q; ++p)
            if (std::abs(mu - std::polar(1.0, 2.0 * M_PI * p / q)) <= band) {
                if (q_out) *q_out = q;
                if (p_out) *p_out = p;
                return true;
            }
    return false;
}

// Does the tail point sit on (or converge to) an attracting cycle?
bool tail_attracted(const Polynomial1D& g, cplx z, const SemiHypParams& sp) {
    cplx w = z;
    for (int q = 1; q <= sp.root_order_max; ++q) {
        w = g.eval(w);
        if (std::abs(w - z) <= 1e-6 * std::max(1.0, std::abs(z))) {
            cplx mu{1.0};
            cplx v = z;
            for (int i = 0; i < q; ++i) {
                mu *= g.deriv(v);
                v = g.eval(v);
            }
            return std::abs(mu) < 1.0 - sp.attracting_band;
        }
    }
    return false;
}

}  // namespace

SemiHypVerdict semi_hyperbolic_verdict(const Polynomial1D& g,
                                       const SemiHypParams& sp) {
    SemiHypVerdict v;
    std::ostringstream why;

    // Parabolic scan: any cycle multiplier inside the band around a root of
    // unity of low order is a definite witness against semi-hyperbolicity.
    std::vector<Cycle1D> cycles = find_cycles_1d(g, sp.period_bound, sp.search);
    for (const auto& cyc : cycles) {
        double mod = std::abs(cyc.multiplier);
        if (std::abs(mod - 1.0) > sp.parabolic_band) continue;
        int q = 0, p = 0;
        if (near_root_of_unity(cyc.multiplier, sp.root_order_max,
                               sp.parabolic_band, &q, &p)) {
            if (!v.parabolic_found) {
                v.parabolic_found = true;
                v.parabolic_witness = cyc;
                why << "parabolic cycle of period " << cyc.period
                    << " (multiplier within " << fmt1(sp.parabolic_band)
                    << " of e^{2 pi i " << p << "/" << q << "}); ";
            }
        } else {
            v.unrecognized_indifferent = true;
        }
    }

    // Critical-orbit recurrence: an orbit that stays bounded, is not
    // attracted to an attracting cycle, and re-approaches its own critical
    // point within the threshold contradicts semi-hyperbolicity.
    const double R = g.escape_radius();
    bool recurrent_found = false;
    for (cplx c : g.critical_points()) {
        CriticalRecurrence cr;
        cr.c = c;
        cr.min_distance = std::numeric_limits<double>::infinity();
        cplx z = c;
        bool escaped = false;
        for (int k = 0; k < sp.orbit_steps; ++k) {
            z = g.eval(z);
            if (std::abs(z) > R) {
                escaped = true;
                break;
            }
            if (k >= sp.orbit_steps / 2)
                cr.min_distance = std::min(cr.min_distance, std::abs(z - c));
        }
        cr.escapes = escaped;
        if (!escaped) {
            cr.attracted = tail_attracted(g, z, sp);
            cr.recurrent = !cr.attracted &&
                           cr.min_distance <= sp.recurrence_threshold;
            recurrent_found = recurrent_found || cr.recurrent;
        }
        v.critical.push_back(cr);
    }

    // Ball-growth constants (evidence only): fit max G over B(x, r) against
    // r at sampled repelling points.
    {
        std::vector<cplx> xs;
        for (const auto& cyc : cycles) {
            if (!cyc.repelling) continue;
            xs.push_back(cyc.points[0]);
            if (xs.size() >= 6) break;
        }
        const std::vector<double> radii{1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
        std::vector<double> lx, ly;
        for (double r : radii) {
            double val = std::numeric_limits<double>::infinity();
            for (cplx x : xs) {
                double mx = 0.0;
                for (int k = 0; k < 16; ++k) {
                    GreenEstimate ge = green_1d(
                        g, x + std::polar(r, 2.0 * M_PI * k / 16.0), sp.green);
                    if (ge.reliable()) mx = std::max(mx, ge.value);
                }
                val = std::min(val, mx);
            }
            if (std::isfinite(val) && val > 0.0) {
                lx.push_back(std::log(r));
                ly.push_back(std::log(val));
            }
        }
        if (lx.size() >= 2) {
            double n = static_cast<double>(lx.size());
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < lx.size(); ++i) {
                sx += lx[i];
                sy += ly[i];
                sxx += lx[i] * lx[i];
                sxy += lx[i] * ly[i];
            }
            double denom = n * sxx - sx * sx;
            if (denom > 0) {
                v.A = (n * sxy - sx * sy) / denom;
                v.eta = std::exp((sy - v.A * sx) / n);
                v.eta_fit_ok = true;
            }
        }
    }

    if (v.parabolic_found) {
        v.verdict = "NO";
    } else if (recurrent_found) {
        v.verdict = "NO";
        why << "critical orbit numerically recurrent (finite-sample: min tail "
               "distance <= "
            << fmt1(sp.recurrence_threshold) << "); ";
    } else if (v.unrecognized_indifferent) {
        v.verdict = "UNKNOWN";
        why << "indifferent cycle away from low-order roots of unity; the "
               "exact dichotomy is unresolved at this resolution; ";
    } else {
        v.verdict = "YES";
        why << "no parabolic cycle up to period " << sp.period_bound
            << "; every bounded critical orbit is attracted or keeps distance "
            << "> " << fmt1(sp.recurrence_threshold)
            << " from its critical point; ";
    }
    v.rationale = why.str();
    return v;
}

}  // namespace qx
