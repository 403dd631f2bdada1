#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hamcenter/render.hpp"
#include "hamcenter/report.hpp"

using namespace hamcenter;
using nlohmann::json;

namespace {

struct Flags {
    std::string map;
    std::string box;
    int grid = 64;
    double h_max = 0.0;
    double tol = 1e-6;
    std::uint64_t seed = 42;
    int max_winding = 3;
    bool extended = false;
    bool timings = false;
    std::string out;
    std::string levels;
    std::string figures;
};

RunConfig to_config(const Flags& f) {
    RunConfig cfg;
    cfg.map_source = f.map;
    if (!f.box.empty()) cfg.box = parse_box(f.box);
    cfg.grid_n = f.grid;
    if (f.h_max != 0.0) cfg.h_max = f.h_max;
    cfg.tol = f.tol;
    cfg.seed = f.seed;
    cfg.max_winding = f.max_winding;
    cfg.enable_extended = f.extended;
    cfg.timings = f.timings;
    return cfg;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot write " + path);
    os << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_levels(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || !(v > 0.0)) throw InputError("bad level '" + item + "'");
        out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Fractions of the smallest annulus estimate, so every default curve is a closed orbit.
std::vector<double> default_levels(const PipelineResult& r) {
    double ell = 0.0;
    for (const auto& c : r.centers) {
        if (!c.annulus) continue;
        const double e = c.annulus->hi_is_budget ? c.annulus->h_max : c.annulus->ell_lo;
        if (ell == 0.0 || e < ell) ell = e;
    }
    if (ell == 0.0) return {};
    return {0.1 * ell, 0.25 * ell, 0.5 * ell, 0.75 * ell, 0.95 * ell};
}

Scene portrait_of(const PipelineResult& r, const std::vector<double>& levels) {
    std::vector<CenterRecord> centers;
    std::vector<AnnulusReport> reports;
    for (const auto& c : r.centers) {
        centers.push_back(c.center);
        if (c.annulus) reports.push_back(*c.annulus);
    }
    return plane_portrait(r.map, centers, reports, levels, r.box);
}

int exit_for(const PipelineResult& r) { return r.inconclusive() ? kExitInconclusive : kExitOk; }

json centers_block(const PipelineResult& r) {
    json cs = json::array();
    for (const auto& c : r.centers) cs.push_back(center_json(c));
    return cs;
}

json partial_report(const PipelineResult& r) {
    json j;
    j["config"] = config_json(r.config, r.box);
    j["map"] = map_json(r.map);
    j["zero_search"] = r.zeros.summary();
    j["centers"] = centers_block(r);
    j["warnings"] = r.warnings;
    j["timings"] = r.timings;
    return j;
}

int cmd_centers(const Flags& f) {
    const PipelineResult r = run_pipeline(to_config(f), Stage::centers);
    emit(dump(partial_report(r)), f.out);
    return kExitOk;
}

int cmd_annulus(const Flags& f) {
    const PipelineResult r = run_pipeline(to_config(f), Stage::annulus);
    emit(dump(partial_report(r)), f.out);
    return exit_for(r);
}

int cmd_global_check(const Flags& f) {
    const PipelineResult r = run_pipeline(to_config(f), Stage::annulus);
    json j;
    j["map"] = r.map.name();
    json vs = json::array();
    for (const auto& c : r.centers) {
        std::string v = to_string(c.global.verdict);
        if (c.global.up_to_budget) v += "(up-to-budget)";
        vs.push_back({{"location", {c.center.location.x, c.center.location.y}},
                      {"verdict", v},
                      {"reasons", c.global.reasons}});
    }
    j["centers"] = vs;
    j["warnings"] = r.warnings;
    emit(dump(j), f.out);
    return exit_for(r);
}

int cmd_portrait(const Flags& f) {
    const PipelineResult r = run_pipeline(to_config(f), Stage::annulus);
    const std::vector<double> levels = f.levels.empty() ? default_levels(r) : parse_levels(f.levels);
    const Scene s = portrait_of(r, levels);
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
    emit(to_svg(s), f.out);
    return exit_for(r);
}

int cmd_disc(const Flags& f) {
    const PlanarMap map = resolve_map(f.map, f.extended);
    const DiscRequest req = disc_portrait_for(map);
    if (!req.scene) {
        std::cout << dump(json{{"error", "disc portrait refused"}, {"reason", req.refusal}});
        return kExitInput;
    }
    for (const auto& w : req.scene->warnings) std::cerr << "warning: " << w << "\n";
    emit(to_svg(*req.scene), f.out);
    return kExitOk;
}

int cmd_report(const Flags& f) {
    const PipelineResult r = run_pipeline(to_config(f), Stage::full);
    const json rep = report_json(r);
    const auto errs = validate_report(json::parse(rep.dump()));
    if (!errs.empty()) {
        for (const auto& e : errs) std::cerr << "schema: " << e << "\n";
        return kExitSchema;
    }
    emit(dump(rep), f.out);
    if (!f.figures.empty()) {
        std::filesystem::create_directories(f.figures);
        const std::filesystem::path dir(f.figures);
        emit(to_svg(portrait_of(r, default_levels(r))), (dir / "portrait.svg").string());
        const DiscRequest req = disc_portrait_for(r.map);
        if (req.scene) emit(to_svg(*req.scene), (dir / "disc.svg").string());
    }
    return exit_for(r);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Global center analysis for planar Hamiltonian fields f = grad H_f perp"};
    app.require_subcommand(1);
    Flags f;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--map", f.map, "builtin:NAME or a map-spec file")->required();
        sub->add_option("--box", f.box, "working box xmin,xmax,ymin,ymax");
        sub->add_option("--grid", f.grid, "seed grid size per axis");
        sub->add_option("--h-max", f.h_max, "largest energy probed (default from the box boundary)");
        sub->add_option("--tol", f.tol, "bisection tolerance on ell");
        sub->add_option("--seed", f.seed, "RNG seed");
        sub->add_option("--max-winding", f.max_winding, "winding budget per orbit");
        sub->add_option("--out", f.out, "output file (stdout when omitted)");
        sub->add_flag("--enable-extended", f.extended, "allow the gated pinchuk200 fixture");
        sub->add_flag("--timings", f.timings, "record wall-clock timings in the report");
    };

    std::vector<std::pair<CLI::App*, int (*)(const Flags&)>> subs;
    auto add = [&](const char* name, const char* help, int (*fn)(const Flags&)) {
        CLI::App* sub = app.add_subcommand(name, help);
        common(sub);
        subs.emplace_back(sub, fn);
        return sub;
    };
    add("centers", "find the non-degenerate zeros of f", cmd_centers);
    add("annulus", "estimate the period annulus bound ell per center", cmd_annulus);
    add("global-check", "decide whether each center is global", cmd_global_check);
    add("portrait", "SVG phase portrait in the plane", cmd_portrait)
        ->add_option("--levels", f.levels, "comma-separated energies (default: fractions of ell)");
    add("disc", "SVG portrait on the Poincare disc", cmd_disc);
    add("report", "full pipeline as JSON", cmd_report)->add_option("--figures", f.figures, "directory for SVG figures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        for (auto& [sub, fn] : subs) {
            if (sub->parsed()) return fn(f);
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const PreconditionError& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return kExitInconclusive;
    } catch (const InconclusiveError& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return kExitInconclusive;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitInput;
}
