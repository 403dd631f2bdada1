#include "hamcenter/report.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace hamcenter {

using nlohmann::json;

void validate_config(const RunConfig& cfg) {
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
    if (cfg.grid_n < 8) throw std::invalid_argument("--grid must be at least 8");
    if (cfg.h_max && !(*cfg.h_max > 0.0)) throw std::invalid_argument("--h-max must be positive");
    if (cfg.max_winding < 1) throw std::invalid_argument("--max-winding must be at least 1");
    if (cfg.box && !cfg.box->valid()) throw std::invalid_argument("--box must satisfy xmin < xmax and ymin < ymax");
}

Box parse_box(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            throw InputError("bad number '" + item + "' in --box");
        }
        if (used != item.size()) throw InputError("bad number '" + item + "' in --box");
        v.push_back(x);
    }
    if (v.size() != 4) throw InputError("--box needs xmin,xmax,ymin,ymax");
    const Box b{v[0], v[1], v[2], v[3]};
    if (!b.valid()) throw InputError("--box is empty");
    return b;
}

bool PipelineResult::inconclusive() const {
    if (zeros.centers.empty()) return true;
    for (const auto& c : centers) {
        if (!c.error.empty() || c.global.verdict == GlobalVerdict::inconclusive) return true;
    }
    if (conti && conti->applicable && !conti->routes_agree) return true;
    return false;
}

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& cfg, Stage stage) {
    try {
        validate_config(cfg);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    PlanarMap map = resolve_map(cfg.map_source, cfg.enable_extended);
    const Box box = cfg.box.value_or(map.domain().working_box());
    PipelineResult r(cfg, map, box);
    auto t0 = std::chrono::steady_clock::now();

    const JacobianSignScan js = scan_jacobian_sign(map, box, 64);
    if (js.sign_change()) {
        r.warnings.push_back("det Df changes sign in the working box; the standing hypothesis det Df != 0 fails and "
                             "global verdicts are demoted to inconclusive");
    }
    if (js.zero_or_tiny > 0) {
        r.warnings.push_back("det Df is numerically zero at " + std::to_string(js.zero_or_tiny) + " sampled points");
    }

    ZeroSearchOptions zopt;
    zopt.seed = cfg.seed;
    r.zeros = find_zeros(map, box, cfg.grid_n, zopt);
    for (const auto& d : r.zeros.degenerate) {
        std::ostringstream os;
        os << "degenerate zero at (" << d.location.x << ", " << d.location.y << ") with det Df = " << d.det_df
           << "; excluded from the center list";
        r.warnings.push_back(os.str());
    }
    if (r.zeros.centers.empty()) r.warnings.push_back("no non-degenerate zero of f found in the box");
    if (cfg.timings) r.timings["centers_ms"] = ms_since(t0);

    for (const auto& c : r.zeros.centers) r.centers.push_back(CenterAnalysis{c, std::nullopt, {}, {}});
    if (stage == Stage::centers) return r;

    t0 = std::chrono::steady_clock::now();
    AnnulusOptions aopt;
    aopt.h_max = cfg.h_max;
    aopt.tol = cfg.tol;
    aopt.trace.box = box;
    aopt.trace.max_winding = cfg.max_winding;
    for (auto& ca : r.centers) {
        try {
            ca.annulus = estimate_ell(map, ca.center, aopt);
            ca.global = global_center_verdict(map, *ca.annulus, box);
        } catch (const AnnulusBelowResolution& e) {
            ca.error = e.what();
            ca.global.reasons.push_back(e.what());
        }
    }
    if (cfg.timings) r.timings["annulus_ms"] = ms_since(t0);
    if (stage == Stage::annulus) return r;

    t0 = std::chrono::steady_clock::now();
    const auto hp = effective_hamiltonian_poly(map);
    r.polynomial = hp.has_value();
    std::vector<GlobalCheck> route;
    for (const auto& ca : r.centers) route.push_back(ca.global);
    if (hp) {
        try {
            r.compactified = build_compactification(*hp);
            r.scan = infinite_singularities(*r.compactified);
            SectorOptions sopt;
            sopt.fan_n = cfg.sector_fan;
            sopt.r = cfg.sector_radius;
            for (auto& p : r.scan.points) classify_sectors(*r.compactified, p, sopt);
        } catch (const PreconditionError& e) {
            r.warnings.push_back(std::string("compactification skipped: ") + e.what());
        }
    }
    if (r.compactified) {
        r.conti = conti_verdict(true, route, r.scan);
    } else {
        r.conti = conti_verdict(false, route, r.scan);
    }
    if (cfg.timings) r.timings["compactify_ms"] = ms_since(t0);
    return r;
}

json config_json(const RunConfig& cfg, const Box& box) {
    json j;
    j["map"] = cfg.map_source;
    j["box"] = {box.xmin, box.xmax, box.ymin, box.ymax};
    j["grid"] = cfg.grid_n;
    j["h_max"] = cfg.h_max ? json(*cfg.h_max) : json("auto");
    j["tol"] = cfg.tol;
    j["max_winding"] = cfg.max_winding;
    j["seed"] = cfg.seed;
    j["enable_extended"] = cfg.enable_extended;
    return j;
}

json map_json(const PlanarMap& map) {
    json j;
    j["name"] = map.name();
    j["f1"] = print_expr(map.f1());
    j["f2"] = print_expr(map.f2());
    j["domain"] = map.domain().to_string();
    if (map.declared_hamiltonian()) j["declared_hamiltonian"] = map.declared_hamiltonian()->to_string();
    return j;
}

json center_json(const CenterAnalysis& c) {
    json j;
    j["location"] = {c.center.location.x, c.center.location.y};
    j["det_df"] = c.center.det_df;
    j["eigen_omega"] = c.center.omega;
    j["isochronous_hint"] = c.center.isochronous_hint;
    j["residual"] = c.center.residual;
    if (c.annulus) {
        const AnnulusReport& a = *c.annulus;
        j["h_max"] = a.h_max;
        j["ell"] = {{"lo", a.ell_lo}, {"hi", a.hi_is_budget ? json("budget") : json(a.ell_hi)}};
        json shape{{"kind", to_string(a.shape.kind)}};
        if (a.shape.kind == ShapeKind::disc) {
            shape["radius"] = a.shape.radius;
            shape["radius_upper"] = a.shape.radius_upper;
        }
        j["image_shape"] = shape;
        json certs = json::array();
        for (const auto& w : a.certificates) {
            json cj{{"h", w.h},
                    {"closed", w.closed},
                    {"winding", w.winding},
                    {"injective", w.injective_on_orbit},
                    {"outcome", to_string(w.outcome)}};
            cj["period"] = w.period ? json(*w.period) : json(nullptr);
            certs.push_back(cj);
        }
        j["certificates"] = certs;
        j["postpass_ok"] = a.postpass_ok;
    }
    if (!c.error.empty()) j["error"] = c.error;
    if (c.annulus || !c.error.empty()) {
        j["global"] = to_string(c.global.verdict);
        j["global_up_to_budget"] = c.global.up_to_budget;
        j["global_reasons"] = c.global.reasons;
    }
    return j;
}

json compactification_json(const PipelineResult& r) {
    if (!r.compactified) {
        json j{{"conti_type", "not-applicable"}};
        j["reason"] = r.polynomial ? "compactification rejected the Hamiltonian" : "H_f is not polynomial";
        return j;
    }
    json j;
    j["degree"] = r.compactified->degree;
    j["equator_polynomial"] = r.compactified->equator.to_string();
    j["equator_singular"] = r.scan.equator_singular;
    json pts = json::array();
    for (const auto& p : r.scan.points) {
        pts.push_back({{"theta", p.theta},
                       {"chart", to_string(p.chart)},
                       {"u", p.u},
                       {"multiplicity", p.multiplicity},
                       {"residual", p.residual},
                       {"classification", to_string(p.classification)},
                       {"confidence", p.confidence},
                       {"evidence",
                        {{"seeds", p.evidence.seeds},
                         {"captured", p.evidence.captured},
                         {"pass_over", p.evidence.pass_over},
                         {"same_side", p.evidence.same_side},
                         {"undecided", p.evidence.undecided},
                         {"discarded", p.evidence.discarded}}}});
    }
    j["infinite_singularities"] = pts;
    if (r.conti) {
        j["conti_type"] = r.conti->type;
        j["routes_agree"] = r.conti->routes_agree;
        j["status"] = r.conti->status;
        json rows = json::array();
        for (const auto& c : r.conti->criteria) rows.push_back({{"id", c.id}, {"holds", to_string(c.holds)}, {"source", c.source}});
        j["criteria"] = rows;
        j["notes"] = r.conti->notes;
    }
    return j;
}

json report_json(const PipelineResult& r) {
    json j;
    j["config"] = config_json(r.config, r.box);
    j["map"] = map_json(r.map);
    j["zero_search"] = {{"summary", r.zeros.summary()},
                        {"seeds", r.zeros.seeds},
                        {"converged", r.zeros.converged},
                        {"singular_abandoned", r.zeros.singular_abandoned},
                        {"failed", r.zeros.failed}};
    json cs = json::array();
    for (const auto& c : r.centers) cs.push_back(center_json(c));
    j["centers"] = cs;
    j["compactification"] = compactification_json(r);
    j["warnings"] = r.warnings;
    j["timings"] = r.timings;
    return j;
}

std::vector<std::string> validate_report(const json& rep) {
    std::vector<std::string> errs;
    auto need = [&](const json& obj, const char* key, const std::string& where) -> const json* {
        if (!obj.is_object() || !obj.contains(key)) {
            errs.push_back(where + ": missing '" + key + "'");
            return nullptr;
        }
        return &obj.at(key);
    };
    auto finite = [&](const json* v, const std::string& where) {
        if (v && !(v->is_number() && std::isfinite(v->get<double>()))) errs.push_back(where + ": not a finite number");
    };
    for (const char* k : {"config", "map", "centers", "compactification", "warnings", "timings"}) need(rep, k, "report");
    if (!errs.empty()) return errs;
    if (!rep["centers"].is_array()) errs.push_back("centers: not an array");
    if (!rep["warnings"].is_array()) errs.push_back("warnings: not an array");
    if (!rep["timings"].is_object()) errs.push_back("timings: not an object");
    int idx = 0;
    for (const json& c : rep["centers"]) {
        const std::string w = "centers[" + std::to_string(idx++) + "]";
        if (const json* loc = need(c, "location", w)) {
            if (!loc->is_array() || loc->size() != 2) {
                errs.push_back(w + ".location: not a pair");
            } else {
                finite(&(*loc)[0], w + ".location[0]");
                finite(&(*loc)[1], w + ".location[1]");
            }
        }
        finite(need(c, "det_df", w), w + ".det_df");
        finite(need(c, "eigen_omega", w), w + ".eigen_omega");
        if (const json* iso = need(c, "isochronous_hint", w); iso && !iso->is_boolean()) errs.push_back(w + ".isochronous_hint: not boolean");
        if (c.contains("error")) continue;
        if (const json* ell = need(c, "ell", w)) {
            finite(need(*ell, "lo", w + ".ell"), w + ".ell.lo");
            if (const json* hi = need(*ell, "hi", w + ".ell"); hi && !(hi->is_string() && *hi == "budget")) finite(hi, w + ".ell.hi");
        }
        if (const json* sh = need(c, "image_shape", w)) {
            const json* kind = need(*sh, "kind", w + ".image_shape");
            if (kind && !(*kind == "disc" || *kind == "plane" || *kind == "unknown")) errs.push_back(w + ".image_shape.kind: bad value");
            if (kind && *kind == "disc") finite(need(*sh, "radius", w + ".image_shape"), w + ".image_shape.radius");
        }
        if (const json* g = need(c, "global", w); g && !(*g == "global" || *g == "not-global" || *g == "inconclusive")) {
            errs.push_back(w + ".global: bad value");
        }
        if (const json* certs = need(c, "certificates", w)) {
            for (const json& ct : *certs) {
                for (const char* k : {"h", "closed", "winding", "injective", "period"}) need(ct, k, w + ".certificates");
                if (ct.contains("h")) finite(&ct["h"], w + ".certificates.h");
                if (ct.contains("period") && !ct["period"].is_null()) finite(&ct["period"], w + ".certificates.period");
            }
        }
    }
    const json& cp = rep["compactification"];
    if (const json* t = need(cp, "conti_type", "compactification")) {
        if (!(*t == "A" || *t == "B" || *t == "not-applicable")) errs.push_back("compactification.conti_type: bad value");
        if (*t != "not-applicable") {
            need(cp, "degree", "compactification");
            need(cp, "routes_agree", "compactification");
            if (const json* pts = need(cp, "infinite_singularities", "compactification")) {
                for (const json& p : *pts) {
                    finite(need(p, "theta", "compactification.infinite_singularities"), "theta");
                    finite(need(p, "confidence", "compactification.infinite_singularities"), "confidence");
                    need(p, "classification", "compactification.infinite_singularities");
                }
            }
        }
    }
    return errs;
}

}  // namespace hamcenter
