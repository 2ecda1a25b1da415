#include "qx/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qx/folding.hpp"
#include "qx/metrics.hpp"

namespace qx {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// CSV cells never carry commas or raw newlines; free-text fields (exclusion
// reasons, error notes) are sanitized instead of quoted.
std::string csv_text(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

cplx parse_cplx(const ordered_json& j, const char* what) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    throw PreconditionError(std::string("config: ") + what +
                            " must be a number or a [re, im] pair");
}

ordered_json cplx_json(const cplx& z) {
    return ordered_json::array({z.real(), z.imag()});
}

ordered_json point_json(const ComplexPoint& p) {
    return ordered_json::array(
        {p.x.real(), p.x.imag(), p.y.real(), p.y.imag()});
}

void check_keys(const ordered_json& j,
                std::initializer_list<const char*> allowed,
                const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw PreconditionError("config: unknown key \"" + it.key() +
                                    "\" in " + where);
    }
}

GridAxis parse_axis(const ordered_json& j, const char* what) {
    if (!j.is_array() || j.size() != 3)
        throw PreconditionError(std::string("config: ") + what +
                                " must be [lo, hi, count]");
    GridAxis ax;
    ax.lo = j[0].get<double>();
    ax.hi = j[1].get<double>();
    ax.count = j[2].get<int>();
    return ax;
}

// ---------------------------------------------------------------------------
// Artifact sink: every write goes through here, in call order, binary mode.

struct Sink {
    std::filesystem::path dir;
    std::vector<std::string>* names = nullptr;

    void write_text(const std::string& name, const std::string& content) const {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        const auto path = dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw QxError("report: cannot open " + path.string() +
                          " for writing");
        out << content;
        out.flush();
        if (!out) throw QxError("report: write failure on " + path.string());
        names->push_back(name);
    }
    void write_json(const std::string& name, const ordered_json& j) const {
        write_text(name, j.dump(2) + "\n");
    }
};

ordered_json provenance_json(const Provenance& p) {
    ordered_json j;
    j["map_digest"] = p.map_digest;
    j["config_digest"] = p.config_digest;
    j["tool_version"] = p.tool_version;
    j["seed"] = p.seed;
    return j;
}

std::string csv_header(const Provenance& p, const std::string& columns) {
    return "# map=" + p.map_digest + " config=" + p.config_digest + " tool=" +
           p.tool_version + " seed=" + std::to_string(p.seed) + "\n" +
           columns + "\n";
}

// ---------------------------------------------------------------------------
// Parameter plumbing: config tolerances map onto the analysis parameter
// structs; everything not configured keeps the library default.

SaddleSearchParams search_params_from(const RunConfig& cfg) {
    SaddleSearchParams sp;
    sp.newton_tol = cfg.newton_tol;
    sp.accept_tol = cfg.accept_tol;
    sp.seed = cfg.seed;
    return sp;
}

CertifyParams certify_params_from(const RunConfig& cfg) {
    CertifyParams cp;
    cp.t = cfg.t;
    cp.margin = cfg.margin;
    cp.lin.residual_tol = cfg.residual_tol;
    cp.green.tol = cfg.green_tol;
    cp.norm.mf.green.tol = cfg.green_tol;
    return cp;
}

CycleSearchParams cycle_params_from(const RunConfig& cfg) {
    CycleSearchParams sp;
    sp.newton_tol = cfg.newton_tol;
    sp.accept_tol = cfg.accept_tol;
    sp.seed = cfg.seed;
    return sp;
}

Certify1DParams certify1d_params_from(const RunConfig& cfg) {
    Certify1DParams cp;
    cp.t = cfg.t;
    cp.margin = cfg.margin;
    cp.point_budget = cfg.point_budget;
    cp.lin.residual_tol = cfg.residual_tol;
    cp.green.tol = cfg.green_tol;
    cp.norm.mf.green.tol = cfg.green_tol;
    return cp;
}

void filter_periods(SaddleCatalog& cat, int period_min) {
    if (period_min <= 1) return;
    std::vector<PeriodicOrbit> kept;
    for (auto& o : cat.orbits)
        if (o.period >= period_min) kept.push_back(std::move(o));
    cat.orbits = std::move(kept);
}

// ---------------------------------------------------------------------------
// Catalog cache serialization.

OrbitClass class_from_string(const std::string& s) {
    if (s == "saddle") return OrbitClass::Saddle;
    if (s == "attracting") return OrbitClass::Attracting;
    if (s == "repelling") return OrbitClass::Repelling;
    if (s == "indifferent") return OrbitClass::Indifferent;
    throw QxError("catalog cache: unknown classification \"" + s + "\"");
}

std::string catalog_cache_key(const HenonMap& m, int period_max,
                              const SaddleSearchParams& sp) {
    std::string s = "catalog;" + map_content_digest(m) +
                    ";nmax=" + std::to_string(period_max) +
                    ";grid=" + std::to_string(sp.grid_per_axis) +
                    ";jitter=" + fmt17(sp.imag_jitter) +
                    ";iters=" + std::to_string(sp.newton_max_iter) +
                    ";ntol=" + fmt17(sp.newton_tol) +
                    ";atol=" + fmt17(sp.accept_tol) +
                    ";dtol=" + fmt17(sp.dedup_tol) +
                    ";iband=" + fmt17(sp.indifferent_band) +
                    ";seed=" + std::to_string(sp.seed);
    return digest_hex(s);
}

ordered_json catalog_json(const SaddleCatalog& cat, const std::string& key) {
    ordered_json j;
    j["cache_key"] = key;
    j["tool_version"] = kToolVersion;
    j["period_max"] = cat.period_max;
    j["status"] = cat.status;
    ordered_json orbits = ordered_json::array();
    for (const auto& o : cat.orbits) {
        ordered_json oj;
        oj["period"] = o.period;
        oj["classification"] = to_string(o.classification);
        oj["eig_unstable"] = cplx_json(o.eig_unstable);
        oj["eig_stable"] = cplx_json(o.eig_stable);
        oj["residual"] = o.residual;
        ordered_json pts = ordered_json::array();
        for (const auto& p : o.points) pts.push_back(point_json(p));
        oj["points"] = pts;
        orbits.push_back(oj);
    }
    j["orbits"] = orbits;
    return j;
}

SaddleCatalog catalog_from_json(const ordered_json& j) {
    SaddleCatalog cat;
    cat.period_max = j.at("period_max").get<int>();
    cat.status = j.at("status").get<std::string>();
    for (const auto& oj : j.at("orbits")) {
        PeriodicOrbit o;
        o.period = oj.at("period").get<int>();
        o.classification =
            class_from_string(oj.at("classification").get<std::string>());
        o.eig_unstable = parse_cplx(oj.at("eig_unstable"), "eig_unstable");
        o.eig_stable = parse_cplx(oj.at("eig_stable"), "eig_stable");
        o.residual = oj.at("residual").get<double>();
        for (const auto& pj : oj.at("points")) {
            if (!pj.is_array() || pj.size() != 4)
                throw QxError("catalog cache: malformed point");
            o.points.push_back({cplx(pj[0].get<double>(), pj[1].get<double>()),
                                cplx(pj[2].get<double>(), pj[3].get<double>())});
        }
        cat.orbits.push_back(std::move(o));
    }
    return cat;
}

std::string catalog_cache_file(const RunConfig& cfg, const HenonMap& m,
                               const SaddleSearchParams& sp,
                               bool allow_explicit) {
    if (allow_explicit && !cfg.catalog_path.empty()) return cfg.catalog_path;
    if (cfg.cache_dir.empty()) return "";
    return cfg.cache_dir + "/catalog-" +
           catalog_cache_key(m, cfg.period_max, sp) + ".json";
}

// ---------------------------------------------------------------------------
// Certificate and verdict serialization (shared by the 2-D and 1-D paths).

ordered_json certificate_json(const Certificate& c, const Provenance& prov) {
    ordered_json j;
    j["provenance"] = provenance_json(prov);
    j["map_digest"] = c.map_digest;
    j["t"] = c.t;
    j["margin"] = c.margin;
    j["sample_size"] = c.sample_size;
    j["exclusions"] = c.exclusions;
    j["kappa"] = c.kappa;
    j["beta"] = c.beta;
    j["C"] = c.C;
    ordered_json conds;
    for (int i = 0; i < 5; ++i) {
        const ConditionReport& cr = c.conditions[static_cast<std::size_t>(i)];
        ordered_json e;
        e["verdict"] = cr.pass ? "PASS" : "FAIL";
        e["value"] = cr.value;
        e["evidence"] = cr.detail;
        conds["c" + std::to_string(i + 1)] = e;
    }
    j["conditions"] = conds;
    j["verdict"] = c.verdict;
    j["caveats"] = c.caveats;
    return j;
}

ordered_json semihyp_json(const SemiHypVerdict& v) {
    ordered_json j;
    j["verdict"] = v.verdict;
    j["rationale"] = v.rationale;
    j["parabolic_found"] = v.parabolic_found;
    if (v.parabolic_found) {
        ordered_json w;
        w["period"] = v.parabolic_witness.period;
        w["multiplier"] = cplx_json(v.parabolic_witness.multiplier);
        ordered_json pts = ordered_json::array();
        for (const cplx& z : v.parabolic_witness.points)
            pts.push_back(cplx_json(z));
        w["points"] = pts;
        j["parabolic_witness"] = w;
    }
    j["unrecognized_indifferent"] = v.unrecognized_indifferent;
    ordered_json crit = ordered_json::array();
    for (const auto& cr : v.critical) {
        ordered_json e;
        e["c"] = cplx_json(cr.c);
        e["escapes"] = cr.escapes;
        e["attracted"] = cr.attracted;
        e["min_distance"] = cr.min_distance;
        e["recurrent"] = cr.recurrent;
        crit.push_back(e);
    }
    j["critical_orbits"] = crit;
    ordered_json fit;
    fit["eta"] = v.eta;
    fit["A"] = v.A;
    fit["fit_ok"] = v.eta_fit_ok;
    j["ball_growth"] = fit;
    return j;
}

// ---------------------------------------------------------------------------
// CSV emitters for the certify bundle.

std::string saddles_certify_csv(const HenonMap& /*m*/, const CertifyResult& res,
                                const Provenance& prov) {
    std::string csv = csv_header(
        prov,
        "orbit,point,period,x_re,x_im,y_re,y_im,unstable_mod,step_mod,area,"
        "lyapunov,excluded,reason");
    // Orbit audits are per cycle; index them for row lookups.
    std::vector<const OrbitAudit*> audit;
    for (const auto& oa : res.orbits) {
        if (static_cast<int>(audit.size()) <= oa.orbit_index)
            audit.resize(static_cast<std::size_t>(oa.orbit_index) + 1, nullptr);
        audit[static_cast<std::size_t>(oa.orbit_index)] = &oa;
    }
    for (const auto& pt : res.points) {
        const OrbitAudit* oa =
            (pt.orbit_index >= 0 &&
             pt.orbit_index < static_cast<int>(audit.size()))
                ? audit[static_cast<std::size_t>(pt.orbit_index)]
                : nullptr;
        csv += std::to_string(pt.orbit_index) + "," +
               std::to_string(pt.point_index) + "," +
               std::to_string(pt.period) + "," + fmt17(pt.point.x.real()) +
               "," + fmt17(pt.point.x.imag()) + "," +
               fmt17(pt.point.y.real()) + "," + fmt17(pt.point.y.imag()) + ",";
        csv += oa ? fmt17(oa->eig_unstable_mod) : std::string();
        csv += ",";
        if (!pt.excluded && pt.step.ok) csv += fmt17(pt.step.mult.modulus);
        csv += ",";
        if (!pt.excluded) {
            // Area of the image of the certified disk (capped at the
            // normalized unit disk) under the local parametrization.
            try {
                AreaReport ar = area_of_local_variety(
                    pt.psi, std::min(1.0, pt.psi.valid_radius));
                csv += fmt17(ar.area);
            } catch (const QxError&) {
            }
        }
        csv += ",";
        csv += oa ? fmt17(oa->lyapunov_exponent) : std::string();
        csv += ",";
        csv += pt.excluded ? "1" : "0";
        csv += "," + csv_text(pt.exclusion_reason) + "\n";
    }
    return csv;
}

std::string mfunction_certify_csv(const CertifyResult& res,
                                  const Provenance& prov) {
    std::string csv = csv_header(prov, "orbit,point,r,m,reliable");
    for (const auto& pt : res.points) {
        if (pt.excluded) continue;
        for (std::size_t i = 0; i < pt.profile.radii.size(); ++i)
            csv += std::to_string(pt.orbit_index) + "," +
                   std::to_string(pt.point_index) + "," +
                   fmt17(pt.profile.radii[i]) + "," +
                   fmt17(pt.profile.values[i]) + "," +
                   (pt.profile.reliable[i] ? "1" : "0") + "\n";
    }
    return csv;
}

std::string mfunction_1d_csv(const Certify1DResult& res,
                             const Provenance& prov) {
    std::string csv = csv_header(prov, "orbit,point,r,m,reliable");
    for (const auto& pt : res.points) {
        if (pt.excluded) continue;
        for (std::size_t i = 0; i < pt.profile.radii.size(); ++i)
            csv += std::to_string(pt.cycle_index) + "," +
                   std::to_string(pt.point_index) + "," +
                   fmt17(pt.profile.radii[i]) + "," +
                   fmt17(pt.profile.values[i]) + "," +
                   (pt.profile.reliable[i] ? "1" : "0") + "\n";
    }
    return csv;
}

void append_cocycle_rows(std::string& csv, const CocycleSample& cs,
                         int orbit_index, const char* family) {
    for (std::size_t i = 0; i < cs.steps.size(); ++i) {
        const CocycleStep& st = cs.steps[i];
        csv += std::to_string(orbit_index) + "," + family + "," +
               std::to_string(st.index) + "," + fmt17(st.value.lo) + "," +
               fmt17(st.value.hi) + "," + (st.ok ? "1" : "0") + ",";
        if (i < cs.partial.size())
            csv += fmt17(cs.partial[i].lo) + std::string(",") +
                   fmt17(cs.partial[i].hi);
        else
            csv += ",";
        csv += "\n";
    }
}

std::string cocycles_csv(const HenonMap& m, const CertifyResult& res,
                         double L, bool with_level_family,
                         const Provenance& prov) {
    std::string csv = csv_header(
        prov, "orbit,family,step,lo,hi,ok,partial_lo,partial_hi");
    for (const auto& oa : res.orbits) {
        try {
            CocycleSample cs = cocycle_series(m, res, oa.orbit_index,
                                              MetricFamily::Hash, L, oa.period);
            append_cocycle_rows(csv, cs, oa.orbit_index, "hash");
        } catch (const QxError&) {
            // Orbit fully excluded from the sample: no rows to emit.
        }
        if (!with_level_family) continue;
        try {
            CocycleSample cs = cocycle_series(
                m, res, oa.orbit_index, MetricFamily::LevelL, L, oa.period);
            append_cocycle_rows(csv, cs, oa.orbit_index, "level");
        } catch (const QxError&) {
        }
    }
    return csv;
}

// ---------------------------------------------------------------------------
// Analysis drivers.  Each returns the top-level verdict string recorded in
// the bundle.

std::string run_certify(const RunConfig& cfg, const Sink& sink,
                        const Provenance& prov) {
    SaddleSearchParams sp = search_params_from(cfg);
    SaddleCatalog cat = load_or_build_catalog(
        cfg.map, cfg.period_max, sp,
        catalog_cache_file(cfg, cfg.map, sp, true));
    filter_periods(cat, cfg.period_min);
    CertifyResult res = certify_theorem12(cfg.map, cat, certify_params_from(cfg));
    res.cert.map_digest = prov.map_digest;
    sink.write_json("certificate.json", certificate_json(res.cert, prov));
    sink.write_text("saddles.csv", saddles_certify_csv(cfg.map, res, prov));
    sink.write_text("mfunction.csv", mfunction_certify_csv(res, prov));
    sink.write_text("cocycles.csv",
                    cocycles_csv(cfg.map, res, cfg.t, false, prov));
    return res.cert.verdict;
}

std::string run_saddles(const RunConfig& cfg, const Sink& sink,
                        const Provenance& prov) {
    SaddleSearchParams sp = search_params_from(cfg);
    SaddleCatalog cat = load_or_build_catalog(
        cfg.map, cfg.period_max, sp,
        catalog_cache_file(cfg, cfg.map, sp, true));
    filter_periods(cat, cfg.period_min);
    std::string csv = csv_header(
        prov,
        "orbit,point,period,x_re,x_im,y_re,y_im,class,unstable_mod,stable_mod,"
        "residual");
    for (std::size_t oi = 0; oi < cat.orbits.size(); ++oi) {
        const PeriodicOrbit& o = cat.orbits[oi];
        for (std::size_t pi = 0; pi < o.points.size(); ++pi) {
            const ComplexPoint& p = o.points[pi];
            csv += std::to_string(oi) + "," + std::to_string(pi) + "," +
                   std::to_string(o.period) + "," + fmt17(p.x.real()) + "," +
                   fmt17(p.x.imag()) + "," + fmt17(p.y.real()) + "," +
                   fmt17(p.y.imag()) + "," + to_string(o.classification) +
                   "," + fmt17(std::abs(o.eig_unstable)) + "," +
                   fmt17(std::abs(o.eig_stable)) + "," + fmt17(o.residual) +
                   "\n";
        }
    }
    sink.write_text("saddles.csv", csv);
    return cat.status;
}

std::string run_manifold(const RunConfig& cfg, const Sink& sink,
                         const Provenance& prov) {
    SaddleSearchParams sp = search_params_from(cfg);
    SaddleCatalog cat = load_or_build_catalog(
        cfg.map, cfg.period_max, sp,
        catalog_cache_file(cfg, cfg.map, sp, true));
    filter_periods(cat, cfg.period_min);
    GreenFn green = [&cfg](const ComplexPoint& q) {
        GreenParams gp;
        gp.tol = cfg.green_tol;
        return green_plus(cfg.map, q, gp);
    };
    LinearizeParams lp;
    lp.residual_tol = cfg.residual_tol;
    NormalizeParams np;
    np.mf.green.tol = cfg.green_tol;

    ordered_json entries = ordered_json::array();
    std::string mcsv = csv_header(prov, "orbit,point,r,m,reliable");
    const std::vector<double> grid = {0.1, 0.2, 0.3, 0.4, 0.5,
                                      0.6, 0.7, 0.8, 0.9, 1.0};
    int included = 0, excluded = 0;
    std::vector<const PeriodicOrbit*> saddles = cat.saddles();
    for (std::size_t oi = 0; oi < saddles.size(); ++oi) {
        const PeriodicOrbit& o = *saddles[oi];
        for (int pi = 0; pi < o.period; ++pi) {
            ordered_json e;
            e["orbit"] = oi;
            e["point"] = pi;
            e["period"] = o.period;
            e["base"] = point_json(o.points[static_cast<std::size_t>(pi)]);
            try {
                UnstableParametrization psi =
                    linearize_unstable(cfg.map, o, pi, lp);
                NormalizationRecord nr = normalize(cfg.map, psi, green, cfg.t, np);
                e["multiplier"] = cplx_json(psi.multiplier);
                e["valid_radius"] = psi.valid_radius;
                e["residual_bound"] = psi.residual_bound;
                e["scale"] = psi.scale;
                e["t_level"] = psi.t_level;
                e["achieved"] = nr.achieved;
                ordered_json coeffs = ordered_json::array();
                for (const auto& a : psi.coeffs) coeffs.push_back(point_json(a));
                e["coeffs"] = coeffs;

                GreenAlong ga = green_along(cfg.map, psi, green);
                double cap = extended_capacity(psi);
                std::vector<double> radii;
                for (double r : grid)
                    if (r <= cap) radii.push_back(r);
                MFunctionParams mp;
                mp.green.tol = cfg.green_tol;
                MFunction prof = m_function(ga, radii, psi.valid_radius, mp);
                for (std::size_t i = 0; i < prof.radii.size(); ++i)
                    mcsv += std::to_string(oi) + "," + std::to_string(pi) +
                            "," + fmt17(prof.radii[i]) + "," +
                            fmt17(prof.values[i]) + "," +
                            (prof.reliable[i] ? "1" : "0") + "\n";
                ++included;
            } catch (const QxError& err) {
                e["excluded"] = true;
                e["reason"] = err.what();
                ++excluded;
            }
            entries.push_back(e);
        }
    }
    ordered_json j;
    j["provenance"] = provenance_json(prov);
    j["t"] = cfg.t;
    j["included"] = included;
    j["exclusions"] = excluded;
    j["parametrizations"] = entries;
    sink.write_json("manifold.json", j);
    sink.write_text("mfunction.csv", mcsv);
    return included > 0 ? "OK" : "INSUFFICIENT_SAMPLE";
}

std::string run_metrics(const RunConfig& cfg, const Sink& sink,
                        const Provenance& prov) {
    SaddleSearchParams sp = search_params_from(cfg);
    SaddleCatalog cat = load_or_build_catalog(
        cfg.map, cfg.period_max, sp,
        catalog_cache_file(cfg, cfg.map, sp, true));
    filter_periods(cat, cfg.period_min);
    CertifyResult res = certify_theorem12(cfg.map, cat, certify_params_from(cfg));
    res.cert.map_digest = prov.map_digest;
    GreenFn green = [&cfg](const ComplexPoint& q) {
        GreenParams gp;
        gp.tol = cfg.green_tol;
        return green_plus(cfg.map, q, gp);
    };
    MetricParams mp;
    mp.mf.green.tol = cfg.green_tol;
    const double L = cfg.t;

    // First included point of each orbit: metric interval, level-change
    // relation toward the next cycle point, and (for real saddles of a real
    // map) the strip / half-line comparison bounds.
    ordered_json entries = ordered_json::array();
    for (const auto& oa : res.orbits) {
        const SaddlePointData* at = nullptr;
        for (const auto& pt : res.points)
            if (pt.orbit_index == oa.orbit_index && !pt.excluded) {
                at = &pt;
                break;
            }
        if (!at) continue;
        ordered_json e;
        e["orbit"] = oa.orbit_index;
        e["point"] = at->point_index;
        e["period"] = oa.period;
        e["L"] = L;
        try {
            MetricInterval mi = metric_L_interval(cfg.map, at->psi, green, L, mp);
            ordered_json im;
            im["inradius"] = mi.inradius;
            im["ray_inradius"] = mi.ray_inradius;
            im["lower"] = mi.lower;
            im["upper"] = mi.upper;
            im["star_ok"] = mi.star_ok;
            im["rays"] = mi.rays;
            e["interval"] = im;
        } catch (const QxError& err) {
            e["interval_error"] = err.what();
        }
        const SaddlePointData* next = nullptr;
        for (const auto& pt : res.points)
            if (pt.orbit_index == oa.orbit_index && !pt.excluded &&
                pt.point_index == (at->point_index + 1) % oa.period) {
                next = &pt;
                break;
            }
        if (next && at->step.ok) {
            try {
                LevelRelationCheck rel = relation_level_change(
                    cfg.map, at->psi, next->psi, at->step.mult.modulus, green,
                    L, mp);
                ordered_json rj;
                rj["at_x"] = ordered_json::array({rel.at_x.lo, rel.at_x.hi});
                rj["at_fx"] = ordered_json::array({rel.at_fx.lo, rel.at_fx.hi});
                rj["overlap"] = rel.overlap;
                rj["inradius_ratio"] = rel.inradius_ratio;
                rj["step_mod"] = at->step.mult.modulus;
                e["level_relation"] = rj;
            } catch (const QxError& err) {
                e["level_relation_error"] = err.what();
            }
        }
        const ComplexPoint& b = at->point;
        if (cfg.map.real_flag && std::abs(b.x.imag()) < 1e-9 &&
            std::abs(b.y.imag()) < 1e-9) {
            for (bool half : {false, true}) {
                try {
                    StripBound sb =
                        strip_cocycle_bound(cfg.map, at->psi, L, half);
                    ordered_json sj;
                    sj["bound"] = sb.bound;
                    sj["phi_deriv0"] = sb.phi_deriv0;
                    sj["composite_deriv"] = sb.composite_deriv;
                    sj["composite_target"] = sb.composite_target;
                    sj["map_formula"] = sb.map_formula;
                    e[half ? "half_line_bound" : "strip_bound"] = sj;
                } catch (const QxError& err) {
                    e[half ? "half_line_bound_error" : "strip_bound_error"] =
                        err.what();
                }
            }
        }
        entries.push_back(e);
    }
    ordered_json j;
    j["provenance"] = provenance_json(prov);
    j["t"] = cfg.t;
    j["L"] = L;
    j["verdict"] = res.cert.verdict;
    j["kappa"] = res.cert.kappa;
    j["orbits"] = entries;
    sink.write_json("metrics.json", j);
    sink.write_text("cocycles.csv", cocycles_csv(cfg.map, res, L, true, prov));
    return res.cert.verdict;
}

std::string run_folding(const RunConfig& cfg, const Sink& sink,
                        const Provenance& prov) {
    SaddleSearchParams sp = search_params_from(cfg);
    SaddleCatalog cat = load_or_build_catalog(
        cfg.map, cfg.period_max, sp,
        catalog_cache_file(cfg, cfg.map, sp, true));
    filter_periods(cat, cfg.period_min);
    CertifyResult res = certify_theorem12(cfg.map, cat, certify_params_from(cfg));
    LinearizeParams lp;
    lp.residual_tol = cfg.residual_tol;

    ordered_json entries = ordered_json::array();
    for (const auto& pt : res.points) {
        if (pt.excluded) continue;
        ordered_json e;
        e["orbit"] = pt.orbit_index;
        e["point"] = pt.point_index;
        e["period"] = pt.period;
        TaylorJet jet = jet_of(pt.psi);
        OrderReport ord = order_of(jet);
        e["order"] = ord.order;
        e["degenerate"] = ord.degenerate;
        if (!jet.coeffs.empty()) {
            // Mapping degree of the projection onto the tangent direction
            // over the half-radius circle; 1 = locally injective chart.
            ComplexPoint dir = jet.coeffs.front();
            double n = norm_2(dir);
            if (n > 0.0) {
                dir = cplx(1.0 / n, 0.0) * dir;
                // Probe inside the normalized level disk (radius ~1), not the
                // residual-certified disk, which can be much larger than the
                // locally injective regime.
                DegreeReport dr = projection_degree(
                    jet, dir, 0.5 * std::min(1.0, pt.psi.valid_radius));
                ordered_json dj;
                dj["degree"] = dr.degree;
                dj["radius"] = dr.radius;
                dj["min_modulus"] = dr.min_modulus;
                dj["ok"] = dr.ok;
                dj["samples"] = dr.samples;
                e["tangent_degree"] = dj;
            }
        }
        // The push-forward of the previous cycle point's parametrization
        // lands on the same germ: contact diagnostics against it.
        const SaddlePointData* prev = nullptr;
        for (const auto& q : res.points)
            if (q.orbit_index == pt.orbit_index && !q.excluded &&
                q.point_index == (pt.point_index + pt.period - 1) % pt.period) {
                prev = &q;
                break;
            }
        if (prev) {
            try {
                UnstableParametrization pf = push_forward(cfg.map, prev->psi, lp);
                TaylorJet other = jet_of(pf);
                TangencyReport tr = tangency_order(other, jet);
                ordered_json tj;
                tj["tau"] = tr.tau;
                tj["germ_coincidence"] = tr.germ_coincidence;
                tj["first_diff_index"] = tr.first_diff_index;
                tj["diff_magnitude"] = tr.diff_magnitude;
                tj["ok"] = tr.ok;
                e["pushforward_contact"] = tj;
                GammaReport gr = gamma_k({jet, other}, 1);
                ordered_json gj;
                gj["gamma"] = gr.gamma;
                gj["metric_factor"] = gr.metric_factor;
                gj["stratum_mismatch"] = gr.stratum_mismatch;
                e["gamma_1"] = gj;
            } catch (const QxError& err) {
                e["pushforward_error"] = err.what();
            }
        }
        entries.push_back(e);
    }
    ordered_json j;
    j["provenance"] = provenance_json(prov);
    j["sample_size"] = res.cert.sample_size;
    j["exclusions"] = res.cert.exclusions;
    j["jets"] = entries;
    sink.write_json("folding.json", j);
    return entries.empty() ? "INSUFFICIENT_SAMPLE" : "OK";
}

std::string run_poly1d(const RunConfig& cfg, const Sink& sink,
                       const Provenance& prov) {
    Polynomial1D g(cfg.coeffs1d);
    CycleSearchParams sp = cycle_params_from(cfg);
    std::vector<Cycle1D> cat = repelling_cycles(g, cfg.period_max, sp);
    if (cfg.period_min > 1) {
        std::vector<Cycle1D> kept;
        for (auto& c : cat)
            if (c.period >= cfg.period_min) kept.push_back(std::move(c));
        cat = std::move(kept);
    }
    Certify1DResult res = certify_1d(g, cat, certify1d_params_from(cfg));
    res.cert.map_digest = prov.map_digest;

    SemiHypParams shp;
    shp.period_bound = std::max(1, std::min(cfg.period_max, 8));
    shp.green.tol = cfg.green_tol;
    shp.search = sp;
    SemiHypVerdict sv = semi_hyperbolic_verdict(g, shp);

    ordered_json j = certificate_json(res.cert, prov);
    j["semi_hyperbolicity"] = semihyp_json(sv);
    sink.write_json("certificate.json", j);

    std::string csv = csv_header(
        prov, "cycle,point,period,z_re,z_im,per_step_mod,repelling,residual");
    for (std::size_t ci = 0; ci < cat.size(); ++ci) {
        const Cycle1D& c = cat[ci];
        double per_step = std::pow(std::abs(c.multiplier), 1.0 / c.period);
        for (std::size_t pi = 0; pi < c.points.size(); ++pi)
            csv += std::to_string(ci) + "," + std::to_string(pi) + "," +
                   std::to_string(c.period) + "," +
                   fmt17(c.points[pi].real()) + "," +
                   fmt17(c.points[pi].imag()) + "," + fmt17(per_step) + "," +
                   (c.repelling ? "1" : "0") + "," + fmt17(c.residual) + "\n";
    }
    sink.write_text("cycles.csv", csv);
    sink.write_text("mfunction.csv", mfunction_1d_csv(res, prov));
    return res.cert.verdict + "/" + sv.verdict;
}

std::string run_survey(const RunConfig& cfg, const Sink& sink,
                       const Provenance& prov) {
    std::string csv = csv_header(
        prov, "a,c,verdict,kappa,beta,C,sample_size,exclusions,note");
    int pass = 0, cells = 0;
    for (int ia = 0; ia < cfg.survey.a.count; ++ia) {
        for (int ic = 0; ic < cfg.survey.c.count; ++ic) {
            SurveyRow row =
                survey_cell(cfg, cfg.survey.a.at(ia), cfg.survey.c.at(ic));
            csv += fmt17(row.a) + "," + fmt17(row.c) + "," + row.verdict +
                   "," + fmt17(row.kappa) + "," + fmt17(row.beta) + "," +
                   fmt17(row.C) + "," + std::to_string(row.sample_size) + "," +
                   std::to_string(row.exclusions) + "," + csv_text(row.note) +
                   "\n";
            ++cells;
            if (row.verdict == "PASS") ++pass;
        }
    }
    sink.write_text("survey.csv", csv);
    return std::to_string(pass) + "/" + std::to_string(cells) + " PASS";
}

}  // namespace

// ---------------------------------------------------------------------------

Analysis analysis_from_name(const std::string& name) {
    if (name == "certify") return Analysis::Certify;
    if (name == "saddles") return Analysis::Saddles;
    if (name == "manifold") return Analysis::Manifold;
    if (name == "metrics") return Analysis::Metrics;
    if (name == "folding") return Analysis::Folding;
    if (name == "poly1d") return Analysis::Poly1D;
    if (name == "survey") return Analysis::Survey;
    throw PreconditionError("config: unknown analysis \"" + name + "\"");
}

std::string analysis_name(Analysis a) {
    switch (a) {
        case Analysis::Certify: return "certify";
        case Analysis::Saddles: return "saddles";
        case Analysis::Manifold: return "manifold";
        case Analysis::Metrics: return "metrics";
        case Analysis::Folding: return "folding";
        case Analysis::Poly1D: return "poly1d";
        case Analysis::Survey: return "survey";
    }
    return "?";
}

double GridAxis::at(int i) const {
    if (count <= 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) /
                    static_cast<double>(count - 1);
}

void RunConfig::validate() const {
    if (!(t > 0.0)) throw PreconditionError("config: t must be positive");
    if (!(margin > 0.0))
        throw PreconditionError("config: margin must be positive");
    if (!(newton_tol > 0.0) || !(accept_tol > 0.0) || !(residual_tol > 0.0) ||
        !(green_tol > 0.0))
        throw PreconditionError("config: tolerances must be positive");
    if (period_min < 1)
        throw PreconditionError("config: periods must start at 1 or above");
    if (point_budget < 0)
        throw PreconditionError("config: point_budget must be >= 0");
    if (out_dir.empty())
        throw PreconditionError("config: output directory must be set");
    if (analysis == Analysis::Poly1D) {
        if (coeffs1d.size() < 3)
            throw PreconditionError(
                "config: poly1d needs map_1d.coeffs of degree >= 2");
    } else if (analysis == Analysis::Survey) {
        for (const GridAxis* ax : {&survey.a, &survey.c}) {
            if (ax->count < 1)
                throw PreconditionError("config: survey axis count must be >= 1");
            if (ax->hi < ax->lo)
                throw PreconditionError("config: survey axis has hi < lo");
        }
    } else if (!have_map) {
        throw PreconditionError("config: a 2-D analysis needs a map block");
    }
}

RunConfig parse_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw PreconditionError(std::string("config: JSON parse failure: ") +
                                e.what());
    }
    if (!j.is_object())
        throw PreconditionError("config: top level must be an object");
    check_keys(j,
               {"analysis", "map", "map_1d", "periods", "t", "margin", "seed",
                "out", "cache", "catalog", "tolerances", "point_budget",
                "survey"},
               "the top level");
    RunConfig cfg;
    try {
        if (j.contains("analysis"))
            cfg.analysis = analysis_from_name(j["analysis"].get<std::string>());
        if (j.contains("map")) {
            const auto& m = j["map"];
            check_keys(m, {"p", "a", "real"}, "map");
            if (!m.contains("p") || !m["p"].is_array() || m["p"].size() < 3)
                throw PreconditionError(
                    "config: map.p must list coefficients low to high, degree "
                    ">= 2");
            cfg.map.p_coeffs.clear();
            for (const auto& e : m["p"])
                cfg.map.p_coeffs.push_back(parse_cplx(e, "map.p[]"));
            if (m.contains("a")) cfg.map.a = parse_cplx(m["a"], "map.a");
            if (m.contains("real")) cfg.map.real_flag = m["real"].get<bool>();
            cfg.map.validate();
            cfg.have_map = true;
        }
        if (j.contains("map_1d")) {
            const auto& m = j["map_1d"];
            check_keys(m, {"coeffs"}, "map_1d");
            if (!m.contains("coeffs") || !m["coeffs"].is_array())
                throw PreconditionError(
                    "config: map_1d.coeffs must be an array");
            for (const auto& e : m["coeffs"])
                cfg.coeffs1d.push_back(parse_cplx(e, "map_1d.coeffs[]"));
        }
        if (j.contains("periods")) {
            const auto& p = j["periods"];
            if (p.is_number_integer()) {
                cfg.period_min = 1;
                cfg.period_max = p.get<int>();
            } else if (p.is_array() && p.size() == 2) {
                cfg.period_min = p[0].get<int>();
                cfg.period_max = p[1].get<int>();
            } else {
                throw PreconditionError(
                    "config: periods must be an integer max or [min, max]");
            }
        }
        if (j.contains("t")) cfg.t = j["t"].get<double>();
        if (j.contains("margin")) cfg.margin = j["margin"].get<double>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
        if (j.contains("cache")) cfg.cache_dir = j["cache"].get<std::string>();
        if (j.contains("catalog"))
            cfg.catalog_path = j["catalog"].get<std::string>();
        if (j.contains("tolerances")) {
            const auto& tj = j["tolerances"];
            check_keys(tj, {"newton", "accept", "residual", "green"},
                       "tolerances");
            if (tj.contains("newton"))
                cfg.newton_tol = tj["newton"].get<double>();
            if (tj.contains("accept"))
                cfg.accept_tol = tj["accept"].get<double>();
            if (tj.contains("residual"))
                cfg.residual_tol = tj["residual"].get<double>();
            if (tj.contains("green")) cfg.green_tol = tj["green"].get<double>();
        }
        if (j.contains("point_budget"))
            cfg.point_budget = j["point_budget"].get<int>();
        if (j.contains("survey")) {
            const auto& sj = j["survey"];
            check_keys(sj, {"a", "c"}, "survey");
            if (sj.contains("a")) cfg.survey.a = parse_axis(sj["a"], "survey.a");
            if (sj.contains("c")) cfg.survey.c = parse_axis(sj["c"], "survey.c");
        }
    } catch (const ordered_json::exception& e) {
        throw PreconditionError(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw QxError("config: cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_overrides(RunConfig& cfg, const ConfigOverrides& ov) {
    if (ov.catalog) cfg.catalog_path = *ov.catalog;
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    if (ov.period_min) cfg.period_min = *ov.period_min;
    if (ov.period_max) cfg.period_max = *ov.period_max;
    if (ov.t) cfg.t = *ov.t;
    if (ov.margin) cfg.margin = *ov.margin;
    if (ov.seed) cfg.seed = *ov.seed;
}

std::string canonical_config_json(const RunConfig& cfg) {
    // Covers every field that influences computed values.  Filesystem
    // destinations (out, cache, catalog) are deliberately excluded: where a
    // bundle lands must not change its bytes.
    ordered_json j;
    j["analysis"] = analysis_name(cfg.analysis);
    if (cfg.have_map) {
        ordered_json m;
        ordered_json p = ordered_json::array();
        for (const auto& c : cfg.map.p_coeffs) p.push_back(cplx_json(c));
        m["p"] = p;
        m["a"] = cplx_json(cfg.map.a);
        m["real"] = cfg.map.real_flag;
        j["map"] = m;
    }
    if (!cfg.coeffs1d.empty()) {
        ordered_json arr = ordered_json::array();
        for (const auto& c : cfg.coeffs1d) arr.push_back(cplx_json(c));
        j["map_1d"] = ordered_json{{"coeffs", arr}};
    }
    j["periods"] = ordered_json::array({cfg.period_min, cfg.period_max});
    j["t"] = cfg.t;
    j["margin"] = cfg.margin;
    j["seed"] = cfg.seed;
    ordered_json tol;
    tol["newton"] = cfg.newton_tol;
    tol["accept"] = cfg.accept_tol;
    tol["residual"] = cfg.residual_tol;
    tol["green"] = cfg.green_tol;
    j["tolerances"] = tol;
    j["point_budget"] = cfg.point_budget;
    if (cfg.analysis == Analysis::Survey) {
        ordered_json s;
        s["a"] = ordered_json::array(
            {cfg.survey.a.lo, cfg.survey.a.hi, cfg.survey.a.count});
        s["c"] = ordered_json::array(
            {cfg.survey.c.lo, cfg.survey.c.hi, cfg.survey.c.count});
        j["survey"] = s;
    }
    return j.dump();
}

std::string map_content_digest(const HenonMap& m) {
    std::string s = "henon;p=";
    for (const auto& c : m.p_coeffs)
        s += fmt17(c.real()) + std::string(",") + fmt17(c.imag()) + ";";
    s += "a=" + std::string(fmt17(m.a.real())) + "," + fmt17(m.a.imag());
    s += ";real=" + std::string(m.real_flag ? "1" : "0");
    return digest_hex(s);
}

std::string map_content_digest(const std::vector<cplx>& coeffs1d) {
    std::string s = "poly1d;c=";
    for (const auto& c : coeffs1d)
        s += fmt17(c.real()) + std::string(",") + fmt17(c.imag()) + ";";
    return digest_hex(s);
}

SaddleCatalog load_or_build_catalog(const HenonMap& m, int period_max,
                                    const SaddleSearchParams& sp,
                                    const std::string& cache_file,
                                    bool* cache_hit) {
    if (cache_hit) *cache_hit = false;
    const std::string key = catalog_cache_key(m, period_max, sp);
    if (!cache_file.empty()) {
        std::ifstream in(cache_file, std::ios::binary);
        if (in) {
            try {
                ordered_json j = ordered_json::parse(in);
                if (j.at("cache_key").get<std::string>() == key) {
                    SaddleCatalog cat = catalog_from_json(j);
                    if (cache_hit) *cache_hit = true;
                    return cat;
                }
            } catch (const std::exception&) {
                // Stale or corrupt cache: fall through and rebuild.
            }
        }
    }
    SaddleCatalog cat = find_periodic_orbits(m, period_max, sp);
    if (!cache_file.empty()) {
        std::filesystem::path p(cache_file);
        std::error_code ec;
        if (p.has_parent_path())
            std::filesystem::create_directories(p.parent_path(), ec);
        std::ofstream out(cache_file, std::ios::binary | std::ios::trunc);
        if (out) out << catalog_json(cat, key).dump(2) << "\n";
    }
    return cat;
}

SurveyRow survey_cell(const RunConfig& cfg, double a, double c) {
    SurveyRow row;
    row.a = a;
    row.c = c;
    try {
        HenonMap m = quadratic_henon(cplx(c, 0.0), cplx(a, 0.0), true);
        SaddleSearchParams sp = search_params_from(cfg);
        // Explicit catalog paths are single files; grid cells would thrash
        // one another's key, so cells only use the digest-named cache_dir.
        SaddleCatalog cat = load_or_build_catalog(
            m, cfg.period_max, sp, catalog_cache_file(cfg, m, sp, false));
        filter_periods(cat, cfg.period_min);
        CertifyResult res = certify_theorem12(m, cat, certify_params_from(cfg));
        row.verdict = res.cert.verdict;
        row.kappa = res.cert.kappa;
        row.beta = res.cert.beta;
        row.C = res.cert.C;
        row.sample_size = res.cert.sample_size;
        row.exclusions = res.cert.exclusions;
    } catch (const std::exception& e) {
        row.verdict = "ERROR";
        row.note = e.what();
    }
    return row;
}

ReportBundle run(const RunConfig& cfg) {
    cfg.validate();
    ReportBundle b;
    b.out_dir = cfg.out_dir;
    b.provenance.tool_version = kToolVersion;
    b.provenance.seed = cfg.seed;
    b.provenance.config_digest = digest_hex(canonical_config_json(cfg));
    switch (cfg.analysis) {
        case Analysis::Poly1D:
            b.provenance.map_digest = map_content_digest(cfg.coeffs1d);
            break;
        case Analysis::Survey: {
            std::string s = "survey;x^2+c;a=" +
                            std::string(fmt17(cfg.survey.a.lo)) + "," +
                            fmt17(cfg.survey.a.hi) + "," +
                            std::to_string(cfg.survey.a.count) +
                            ";c=" + fmt17(cfg.survey.c.lo) + "," +
                            fmt17(cfg.survey.c.hi) + "," +
                            std::to_string(cfg.survey.c.count);
            b.provenance.map_digest = digest_hex(s);
            break;
        }
        default:
            b.provenance.map_digest = map_content_digest(cfg.map);
            break;
    }
    Sink sink{cfg.out_dir, &b.files};
    sink.write_json("provenance.json", provenance_json(b.provenance));
    switch (cfg.analysis) {
        case Analysis::Certify:
            b.verdict = run_certify(cfg, sink, b.provenance);
            break;
        case Analysis::Saddles:
            b.verdict = run_saddles(cfg, sink, b.provenance);
            break;
        case Analysis::Manifold:
            b.verdict = run_manifold(cfg, sink, b.provenance);
            break;
        case Analysis::Metrics:
            b.verdict = run_metrics(cfg, sink, b.provenance);
            break;
        case Analysis::Folding:
            b.verdict = run_folding(cfg, sink, b.provenance);
            break;
        case Analysis::Poly1D:
            b.verdict = run_poly1d(cfg, sink, b.provenance);
            break;
        case Analysis::Survey:
            b.verdict = run_survey(cfg, sink, b.provenance);
            break;
    }
    return b;
}

}  // namespace qx
