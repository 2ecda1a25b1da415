#pragma once
// Run configuration, orchestration and deterministic artifact emission.
// A run is described by one JSON document; command-line flags override
// single fields.  Every artifact (JSON or CSV) carries a provenance block
// (map digest, config digest, tool version, seed) and is written through a
// sequential sink with fixed formatting, so identical configs reproduce
// byte-identical bundles.  A failed certificate is a result, not an error:
// run() still returns normally and the verdict lands in the artifacts.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qx/certify.hpp"
#include "qx/henon.hpp"
#include "qx/poly1d.hpp"
#include "qx/saddles.hpp"

namespace qx {

inline constexpr const char* kToolVersion = "qxlab 1.0.0";

enum class Analysis {
    Certify,   // full 2-D certificate bundle
    Saddles,   // periodic-orbit catalog only
    Manifold,  // unstable parametrizations + m-function curves
    Metrics,   // level metrics, cocycles, strip bounds
    Folding,   // jet order / degree / tangency diagnostics
    Poly1D,    // one-variable certificate + semi-hyperbolicity verdict
    Survey,    // certify over an (a, c) parameter grid
};
Analysis analysis_from_name(const std::string& name);
std::string analysis_name(Analysis a);

// Inclusive linear grid along one survey axis.
struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;
    double at(int i) const;
};

struct SurveySpec {
    GridAxis a{0.1, 0.1, 1};    // Jacobian parameter of (p(x) - a y, x)
    GridAxis c{-6.0, -4.0, 3};  // constant term of p(x) = x^2 + c
};

struct RunConfig {
    Analysis analysis = Analysis::Certify;
    HenonMap map;          // 2-D analyses; ignored by poly1d
    bool have_map = false;
    std::vector<cplx> coeffs1d;  // 1-D polynomial, low -> high, monic
    int period_min = 1;
    int period_max = 6;
    double t = 1.0;
    double margin = 0.05;
    std::uint64_t seed = 0x5eedull;
    std::string out_dir = "out";
    std::string cache_dir;     // empty: catalog caching off
    std::string catalog_path;  // explicit cache file; overrides cache_dir
    // Tolerances (all must be positive).
    double newton_tol = 1e-12;
    double accept_tol = 1e-9;
    double residual_tol = 1e-9;
    double green_tol = 1e-12;
    int point_budget = 0;  // poly1d sample cap, 0 = whole catalog
    SurveySpec survey;

    void validate() const;  // PreconditionError on out-of-range fields
};

// One optional per flag; each set field replaces exactly one config field.
struct ConfigOverrides {
    std::optional<std::string> catalog;
    std::optional<std::string> out_dir;
    std::optional<int> period_min;
    std::optional<int> period_max;
    std::optional<double> t;
    std::optional<double> margin;
    std::optional<std::uint64_t> seed;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
void apply_overrides(RunConfig& cfg, const ConfigOverrides& ov);

// Canonical JSON rendering: the digest base for provenance and cache keys,
// so every override shows up in every downstream digest.
std::string canonical_config_json(const RunConfig& cfg);
std::string map_content_digest(const HenonMap& m);
std::string map_content_digest(const std::vector<cplx>& coeffs1d);

struct Provenance {
    std::string map_digest;
    std::string config_digest;
    std::string tool_version = kToolVersion;
    std::uint64_t seed = 0;
};

struct ReportBundle {
    std::string out_dir;
    std::vector<std::string> files;  // artifact names in emission order
    std::string verdict;             // top-level verdict where one exists
    Provenance provenance;
};

// Catalog reuse keyed by the content digest of map + search parameters +
// period range.  A file whose recorded key differs (or that fails to parse)
// is stale: the catalog is rebuilt and the file rewritten.  Empty path:
// always build.
SaddleCatalog load_or_build_catalog(const HenonMap& m, int period_max,
                                    const SaddleSearchParams& sp,
                                    const std::string& cache_file,
                                    bool* cache_hit = nullptr);

// Orchestrate the configured analysis and write its artifacts under
// cfg.out_dir.  Throws QxError for unusable input (bad config, unreadable
// map); per-item capacity failures are recorded inside the artifacts.
ReportBundle run(const RunConfig& cfg);

// Certify one survey cell p(x) = x^2 + c with Jacobian parameter a; errors
// are captured in the row, never thrown.
struct SurveyRow {
    double a = 0.0;
    double c = 0.0;
    std::string verdict;  // PASS | FAIL | INSUFFICIENT_SAMPLE | ERROR
    double kappa = 0.0;
    double beta = 0.0;
    double C = 0.0;
    int sample_size = 0;
    int exclusions = 0;
    std::string note;
};
SurveyRow survey_cell(const RunConfig& cfg, double a, double c);

}  // namespace qx
