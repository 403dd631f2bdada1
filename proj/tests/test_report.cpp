#include <cmath>

#include "doctest.h"
#include "hamcenter/render.hpp"
#include "hamcenter/report.hpp"

using namespace hamcenter;
using nlohmann::json;

namespace {

RunConfig cfg_for(const std::string& name) {
    RunConfig c;
    c.map_source = "builtin:" + name;
    return c;
}

}  // namespace

TEST_CASE("box parsing") {
    const Box b = parse_box("-4,14,-4.5,1e1");
    CHECK(b == Box{-4, 14, -4.5, 10});
    CHECK_THROWS_AS(parse_box("1,2,3"), InputError);
    CHECK_THROWS_AS(parse_box("1,2,3,x"), InputError);
    CHECK_THROWS_AS(parse_box("2,1,0,1"), InputError);
}

TEST_CASE("config invariants") {
    RunConfig c = cfg_for("identity");
    CHECK_NOTHROW(validate_config(c));
    c.tol = 0;
    CHECK_THROWS(validate_config(c));
    c = cfg_for("identity");
    c.grid_n = 7;
    CHECK_THROWS(validate_config(c));
    CHECK_THROWS_AS(run_pipeline(c), InputError);
    CHECK_THROWS_AS(run_pipeline(cfg_for("nope")), InputError);
    CHECK_THROWS_AS(run_pipeline(cfg_for("pinchuk200")), InputError);
}

TEST_CASE("reports are byte-identical across runs") {
    for (const char* name : {"example1", "example2", "identity"}) {
        CAPTURE(name);
        const std::string a = report_json(run_pipeline(cfg_for(name))).dump(2);
        const std::string b = report_json(run_pipeline(cfg_for(name))).dump(2);
        CHECK(a == b);
    }
    const PipelineResult r = run_pipeline(cfg_for("example2"));
    std::vector<CenterRecord> cs;
    std::vector<AnnulusReport> as;
    for (const auto& c : r.centers) {
        cs.push_back(c.center);
        as.push_back(*c.annulus);
    }
    CHECK(to_svg(plane_portrait(r.map, cs, as, {0.1, 0.3}, r.box)) ==
          to_svg(plane_portrait(r.map, cs, as, {0.1, 0.3}, r.box)));
    CHECK(to_svg(*disc_portrait_for(r.map).scene) == to_svg(*disc_portrait_for(r.map).scene));
}

TEST_CASE("report schema") {
    for (const char* name : {"example1", "example2", "example3", "identity", "control_noninjective"}) {
        CAPTURE(name);
        const json rep = report_json(run_pipeline(cfg_for(name)));
        CHECK(validate_report(rep).empty());
        // survives a round trip through text unchanged
        CHECK(json::parse(rep.dump()) == rep);
        CHECK(rep["timings"].empty());
    }

    const json rep = report_json(run_pipeline(cfg_for("example1")));
    CHECK(rep["centers"][0]["global"] == "not-global");
    CHECK(rep["centers"][0]["image_shape"]["kind"] == "disc");
    CHECK(rep["compactification"]["conti_type"] == "not-applicable");

    const json id = report_json(run_pipeline(cfg_for("identity")));
    CHECK(id["centers"][0]["ell"]["hi"] == "budget");
    CHECK(id["compactification"]["conti_type"] == "A");
    CHECK(id["compactification"]["infinite_singularities"].empty());

    json broken = rep;
    broken["centers"][0].erase("det_df");
    CHECK(!validate_report(broken).empty());
    broken = rep;
    broken["centers"][0]["global"] = "maybe";
    CHECK(!validate_report(broken).empty());
    broken = rep;
    broken["centers"][0]["ell"]["lo"] = "0.5";
    CHECK(!validate_report(broken).empty());
    broken = rep;
    broken.erase("warnings");
    CHECK(!validate_report(broken).empty());
}

TEST_CASE("timings are opt-in") {
    RunConfig c = cfg_for("identity");
    c.timings = true;
    const json rep = report_json(run_pipeline(c));
    CHECK(rep["timings"].contains("centers_ms"));
    CHECK(rep["timings"].contains("compactify_ms"));
}

TEST_CASE("stages stop early") {
    const PipelineResult r = run_pipeline(cfg_for("example1"), Stage::centers);
    REQUIRE(r.centers.size() == 1);
    CHECK(!r.centers[0].annulus);
    CHECK(!r.conti);
}

TEST_CASE("inconclusive runs") {
    // x^2 has a degenerate zero and a Jacobian that changes sign
    const PipelineResult r = run_pipeline(cfg_for("control_noninjective"));
    CHECK(r.inconclusive());
    CHECK(!r.warnings.empty());
    CHECK(!run_pipeline(cfg_for("example1")).inconclusive());
}
