#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hamcenter/corpus.hpp"
#include "hamcenter/render.hpp"
#include "svg_check.hpp"

using namespace hamcenter;

TEST_CASE("the checker itself rejects broken documents") {
    CHECK(!check_svg("<svg viewBox=\"0 0 1 1\"><polyline points=\"0,0 1,1\"/>").well_formed);
    CHECK(!check_svg("<svg viewBox=\"0 0 1 1\"><g></svg>").well_formed);
    CHECK(!check_svg("<svg viewBox=\"0 0 1 1\"><polyline points=\"0,0 3,1\"/></svg>").inside_viewbox);
    CHECK(check_svg("<?xml version=\"1.0\"?>\n<svg viewBox=\"0 0 1 1\"><text x=\"0\" y=\"0\">a</text></svg>").well_formed);
}

TEST_CASE("disc projection is monotone along rays") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), rad(0, 50);
    for (int k = 0; k < 500; ++k) {
        const double a = ang(rng), r1 = rad(rng), r2 = rad(rng);
        const Vec2 d{std::cos(a), std::sin(a)};
        const double p1 = norm(disc_project(r1 * d)), p2 = norm(disc_project(r2 * d));
        CHECK(p1 < 1.0);
        if (r1 < r2) CHECK(p1 < p2);
        if (r2 < r1) CHECK(p2 < p1);
    }
}

TEST_CASE("marching squares on the identity") {
    const GridSpec g{{-2, 2, -2, 2}, 101, 101};
    std::vector<double> v(g.nx * g.ny);
    for (int k = 0; k < g.ny; ++k)
        for (int i = 0; i < g.nx; ++i) v[g.index(i, k)] = 0.5 * norm2(g.center(i, k));
    const auto lines = contour_lines(v, g, 0.5);
    REQUIRE(lines.size() == 1);
    for (Vec2 p : lines[0]) CHECK(std::abs(norm(p) - 1.0) <= 2e-3);
    CHECK(norm(lines[0].front() - lines[0].back()) <= 1e-12);
}

TEST_CASE("identity portrait at level 1/2 is a single circle") {
    const PlanarMap m = builtin_map("identity");
    const auto c = classify_center(m, {0, 0}, true);
    const Scene s = plane_portrait(m, {c}, {}, {0.5}, {-2, 2, -2, 2});
    int polylines = 0;
    for (const auto& e : s.elements) {
        if (const auto* p = std::get_if<PolylineEl>(&e)) {
            ++polylines;
            for (Vec2 q : p->points) CHECK(std::abs(norm(q) - 1.0) <= 1e-8);
        }
    }
    CHECK(polylines == 1);
    const SvgCheck chk = check_svg(to_svg(s));
    CHECK(chk.well_formed);
    CHECK(chk.inside_viewbox);
}

TEST_CASE("example 3 portrait") {
    const PlanarMap m = builtin_map("example3");
    const Box b{-3, 3, -8, 8};
    const ZeroSearch zs = find_zeros(m, b, 48);
    REQUIRE(zs.centers.size() == 3);
    const Scene s = plane_portrait(m, zs.centers, {}, {0.1, 0.3, 0.5, 0.8}, b);
    CHECK(s.warnings.empty());
    CHECK(s.curve_count() >= 9);
    const std::string svg = to_svg(s);
    const SvgCheck chk = check_svg(svg);
    CHECK_MESSAGE(chk.well_formed, chk.problem);
    CHECK_MESSAGE(chk.inside_viewbox, chk.problem);
    CHECK(svg == to_svg(plane_portrait(m, zs.centers, {}, {0.1, 0.3, 0.5, 0.8}, b)));
    CHECK_THROWS(plane_portrait(m, zs.centers, {}, {0.5, 0.1}, b));
}

TEST_CASE("example 1 level 1/2 is drawn even though it is unbounded") {
    const PlanarMap m = builtin_map("example1");
    const Scene s = plane_portrait(m, {classify_center(m, {0, 0}, false)}, {}, {0.5}, {-3, 3, -3, 3});
    CHECK(s.curve_count() >= 1);
    const Scene none = plane_portrait(m, {}, {}, {1e9}, {-3, 3, -3, 3});
    CHECK(!none.warnings.empty());
}

TEST_CASE("disc portraits") {
    const DiscRequest ex2 = disc_portrait_for(builtin_map("example2"));
    REQUIRE(ex2.scene);
    int markers = 0;
    for (const auto& e : ex2.scene->elements) {
        if (const auto* mk = std::get_if<MarkerEl>(&e)) {
            ++markers;
            CHECK(std::abs(norm(mk->p) - 1.0) <= 1e-12);
            const bool axis = std::abs(mk->p.x) <= 1e-12 || std::abs(mk->p.y) <= 1e-12;
            CHECK(axis);
        }
        if (const auto* p = std::get_if<PolylineEl>(&e)) {
            for (Vec2 q : p->points) CHECK(norm(q) <= 1.0 + 1e-9);
        }
    }
    CHECK(markers == 4);
    const SvgCheck chk = check_svg(to_svg(*ex2.scene));
    CHECK(chk.well_formed);
    CHECK(chk.inside_viewbox);

    const DiscRequest id = disc_portrait_for(builtin_map("identity"));
    REQUIRE(id.scene);
    for (const auto& e : id.scene->elements) CHECK(!std::holds_alternative<MarkerEl>(e));

    const DiscRequest ex3 = disc_portrait_for(builtin_map("example3"));
    CHECK(!ex3.scene);
    CHECK(!ex3.refusal.empty());
}
