#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hamcenter/compactify.hpp"
#include "hamcenter/corpus.hpp"

using namespace hamcenter;

namespace {

CompactifiedField example2() { return build_compactification(*effective_hamiltonian_poly(builtin_map("example2"))); }

}  // namespace

TEST_CASE("top-degree parts for example 2") {
    const CompactifiedField cf = example2();
    CHECK(cf.degree == 7);
    CHECK(cf.p_top == Poly2::monomial(-1, 6, 1));
    CHECK(cf.q_top == Poly2::monomial(3, 5, 2));
    CHECK(cf.equator == Poly2::monomial(4, 6, 2));
}

TEST_CASE("chart fields for example 2 match a hand derivation") {
    const CompactifiedField cf = example2();
    // U2 at the y-direction, written in (u, v)
    const Poly2 u2_dot = *to_poly(parse_expr(
        "-4*x^6 - 9*x^4*y^2 - 5*x^4*y^3 - 6*x^2*y^4 - 3*x^2*y^5 - y^6 - x^2*y^6"));
    const Poly2 u2_vdot = *to_poly(parse_expr("-3*x^5*y - 6*x^3*y^3 - 4*x^3*y^4 - 3*x*y^5 - 2*x*y^6 - x*y^7"));
    CHECK(cf.chart(Chart::U2).u_dot == u2_dot);
    CHECK(cf.chart(Chart::U2).v_dot == u2_vdot);
    const Poly2 u1_dot = *to_poly(parse_expr("4*x^2 + 9*x^2*y^2 + 5*x*y^3 + 6*x^2*y^4 + 3*x*y^5 + y^6 + x^2*y^6"));
    const Poly2 u1_vdot = *to_poly(parse_expr("x*y + 3*x*y^3 + y^4 + 3*x*y^5 + y^6 + x*y^7"));
    CHECK(cf.chart(Chart::U1).u_dot == u1_dot);
    CHECK(cf.chart(Chart::U1).v_dot == u1_vdot);
}

TEST_CASE("equator is invariant in every chart") {
    for (const char* h : {"0.5*x^2 + 0.5*y^2", "0.5*(x^2 - 1)^2 + 0.5*y^2", "x^3*y - y^4 + x*y"}) {
        const CompactifiedField cf = build_compactification(*to_poly(parse_expr(h)));
        for (const ChartField& ch : cf.charts) {
            for (const Monomial& m : ch.v_dot.terms()) CHECK(m.degy >= 1);
        }
    }
    const CompactifiedField cf = example2();
    for (const ChartField& ch : cf.charts) {
        for (const Monomial& m : ch.v_dot.terms()) CHECK(m.degy >= 1);
    }
}

TEST_CASE("charts agree with the planar field up to a positive factor") {
    for (const char* h : {"(1 + x^2)^3*y^2*0.5 + x^2*(1 + x^2)*y + x^2*0.5", "x^3*y - y^4 + x*y + 2", "0.5*x^2 + 0.5*y^2"}) {
        const ChartConsistency c = chart_consistency(build_compactification(*to_poly(parse_expr(h))), 100);
        CHECK(c.max_direction_dev <= 1e-6);
        CHECK(c.all_positive);
    }
}

TEST_CASE("infinite singular points") {
    const CompactifiedField cf = example2();
    const InfinityScan scan = infinite_singularities(cf);
    REQUIRE(scan.points.size() == 2);
    CHECK(scan.points[0].theta == doctest::Approx(0.0));
    CHECK(scan.points[1].theta == doctest::Approx(std::numbers::pi / 2));
    CHECK(scan.points[0].multiplicity == 2);
    CHECK(scan.points[1].multiplicity == 6);
    for (const auto& p : scan.points) CHECK(p.residual <= 1e-9);

    // G(θ) = 4 cos⁶θ sin²θ
    for (double t : {0.1, 0.7, 2.0}) {
        CHECK(cf.g(t) == doctest::Approx(4 * std::pow(std::cos(t), 6) * std::pow(std::sin(t), 2)));
    }

    const CompactifiedField id = build_compactification(*to_poly(parse_expr("0.5*x^2 + 0.5*y^2")));
    CHECK(id.degree == 1);
    CHECK(infinite_singularities(id).points.empty());
    for (double t : {0.0, 0.5, 1.3}) CHECK(id.g(t) == doctest::Approx(1.0));

    // double well: H_top = x⁴/2, G = 2x⁴, root at the y-direction
    const CompactifiedField dw = build_compactification(*to_poly(parse_expr("0.5*(x^2 - 1)^2 + 0.5*y^2")));
    const InfinityScan dws = infinite_singularities(dw);
    REQUIRE(dws.points.size() == 1);
    CHECK(dws.points[0].theta == doctest::Approx(std::numbers::pi / 2));
    CHECK(dws.points[0].multiplicity == 4);
}

TEST_CASE("a simple equator root is found by the sign scan") {
    // G = x·Q_d − y·P_d for a non-Hamiltonian pair, to exercise odd roots
    CompactifiedField cf = build_compactification(*to_poly(parse_expr("0.5*x^2 + 0.5*y^2")));
    cf.equator = *to_poly(parse_expr("x^2 - 3*y^2"));
    const InfinityScan s = infinite_singularities(cf);
    REQUIRE(s.points.size() == 2);
    CHECK(s.points[0].theta == doctest::Approx(std::numbers::pi / 6).epsilon(1e-13));
    CHECK(s.points[1].theta == doctest::Approx(5 * std::numbers::pi / 6).epsilon(1e-13));
    CHECK(s.points[0].multiplicity == 1);
}

TEST_CASE("sector classification for example 2") {
    const CompactifiedField cf = example2();
    InfinityScan scan = infinite_singularities(cf);
    REQUIRE(scan.points.size() == 2);
    for (auto& p : scan.points) classify_sectors(cf, p);
    CHECK(scan.points[0].classification == SectorClass::has_nondegenerate_sector);
    CHECK(scan.points[1].classification == SectorClass::two_degenerate_hyperbolic);
    for (const auto& p : scan.points) {
        CHECK(p.confidence >= 0.75);
        const InfinitySingularity a = antipode(cf, p);
        CHECK(a.classification == p.classification);
    }
    SectorOptions serial;
    serial.exec = Exec::serial;
    InfinitySingularity s0 = scan.points[0];
    classify_sectors(cf, s0, serial);
    CHECK(s0.evidence.captured == scan.points[0].evidence.captured);
    CHECK(s0.evidence.pass_over == scan.points[0].evidence.pass_over);
}

TEST_CASE("Conti verdict") {
    const CompactifiedField cf = example2();
    InfinityScan scan = infinite_singularities(cf);
    for (auto& p : scan.points) classify_sectors(cf, p);
    GlobalCheck not_global;
    not_global.verdict = GlobalVerdict::not_global;
    ContiVerdict v = conti_verdict(true, {not_global}, scan);
    CHECK(v.type == "B");
    CHECK(v.routes_agree);

    GlobalCheck global;
    global.verdict = GlobalVerdict::global;
    v = conti_verdict(true, {global}, InfinityScan{});
    CHECK(v.type == "A");
    CHECK(v.routes_agree);

    v = conti_verdict(true, {global}, scan);
    CHECK(v.type == "B");
    CHECK(!v.routes_agree);
    CHECK(v.status == "inconsistent - inspect portrait");

    v = conti_verdict(false, {not_global}, scan);
    CHECK(v.type == "not-applicable");
}

TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(build_compactification(*to_poly(parse_expr("0.5*x^2"))), PreconditionError);
    CHECK_THROWS_AS(build_compactification(Poly2::constant(3)), PreconditionError);
}
