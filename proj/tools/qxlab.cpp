// qxlab: command-line laboratory for quasi-expansion analysis of complex
// Henon maps and one-variable polynomials.  Each subcommand selects an
// analysis; a JSON config supplies the map and parameters, and flags
// override single config fields.  A FAIL verdict is a computed result and
// exits 0; unusable input (bad config, unreadable files) exits nonzero.

#include <cstdio>
#include <exception>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "qx/report.hpp"

namespace {

// "MAX" or "MIN:MAX".
void parse_periods(const std::string& text, qx::ConfigOverrides& ov) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            ov.period_min = 1;
            ov.period_max = std::stoi(text);
        } else {
            ov.period_min = std::stoi(text.substr(0, colon));
            ov.period_max = std::stoi(text.substr(colon + 1));
        }
    } catch (const std::exception&) {
        throw qx::PreconditionError("--periods expects MAX or MIN:MAX, got \"" +
                                    text + "\"");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasi-expansion laboratory for complex Henon maps"};
    app.require_subcommand(1);

    std::string config_path, catalog, out, periods;
    double t = 0.0, margin = 0.0;
    std::uint64_t seed = 0;

    const std::pair<const char*, const char*> subs[] = {
        {"certify", "expansion certificate over a saddle sample"},
        {"saddles", "periodic-orbit catalog"},
        {"manifold", "unstable parametrizations and m-function curves"},
        {"metrics", "level metrics, cocycles and strip bounds"},
        {"folding", "jet order / degree / contact diagnostics"},
        {"poly1d", "one-variable certificate and semi-hyperbolicity verdict"},
        {"survey", "certificates over an (a, c) parameter grid"},
    };
    for (const auto& [name, desc] : subs) {
        CLI::App* s = app.add_subcommand(name, desc);
        s->add_option("--config", config_path, "JSON run configuration");
        s->add_option("--catalog", catalog, "saddle catalog cache file");
        s->add_option("--out", out, "output directory");
        s->add_option("--periods", periods, "period range MAX or MIN:MAX");
        s->add_option("--t", t, "normalization level");
        s->add_option("--margin", margin, "PASS margin: kappa >= 1 + margin");
        s->add_option("--seed", seed, "sampling seed");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();
        qx::RunConfig cfg;
        if (!config_path.empty()) cfg = qx::load_config(config_path);
        cfg.analysis = qx::analysis_from_name(sub->get_name());

        qx::ConfigOverrides ov;
        if (sub->count("--catalog") > 0) ov.catalog = catalog;
        if (sub->count("--out") > 0) ov.out_dir = out;
        if (sub->count("--periods") > 0) parse_periods(periods, ov);
        if (sub->count("--t") > 0) ov.t = t;
        if (sub->count("--margin") > 0) ov.margin = margin;
        if (sub->count("--seed") > 0) ov.seed = seed;
        qx::apply_overrides(cfg, ov);

        qx::ReportBundle bundle = qx::run(cfg);
        std::printf("%s: %s (%zu artifact%s in %s)\n",
                    qx::analysis_name(cfg.analysis).c_str(),
                    bundle.verdict.c_str(), bundle.files.size(),
                    bundle.files.size() == 1 ? "" : "s",
                    bundle.out_dir.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "qxlab: error: %s\n", e.what());
        return 1;
    }
}
