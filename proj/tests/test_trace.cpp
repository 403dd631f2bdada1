#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hamcenter/centers.hpp"
#include "hamcenter/corpus.hpp"
#include "hamcenter/trace.hpp"

using namespace hamcenter;

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;
}

TEST_CASE("identity orbits are circles of period 2 pi") {
    const PlanarMap m = builtin_map("identity");
    const OrbitTrace t = integrate_orbit(m, {0.7, 0}, Vec2{0, 0});
    REQUIRE(t.outcome == OrbitOutcome::closed);
    CHECK(t.period == doctest::Approx(kTwoPi).epsilon(1e-8));
    CHECK(t.winding == 1);
    for (const auto& q : t.points) CHECK(std::abs(norm(q.p) - 0.7) <= 1e-9);
}

TEST_CASE("example 2 is isochronous") {
    const PlanarMap m = builtin_map("example2");
    const OrbitTrace t = integrate_orbit(m, {0.1, 0}, Vec2{0, 0});
    REQUIRE(t.outcome == OrbitOutcome::closed);
    CHECK(std::abs(t.period - kTwoPi) <= 1e-5);
}

TEST_CASE("example 1 energy level matches the implicit curve") {
    const PlanarMap m = builtin_map("example1");
    const double h = 0.3;
    const OrbitTrace t = integrate_orbit(m, {std::log(1 + std::sqrt(2 * h)), 0}, Vec2{0, 0});
    REQUIRE(t.outcome == OrbitOutcome::closed);
    for (const auto& q : t.points) {
        const double e = std::exp(q.p.x) - 1;
        CHECK(std::abs(e * e + q.p.y * q.p.y - 2 * h) <= 1e-8);
    }
    const TraceInvariantReport inv = check_trace_invariants(m, t);
    CHECK(inv.max_energy_dev <= 1e-8);
    CHECK(inv.theta_monotone);
    CHECK(std::abs(std::abs(t.total_dtheta) - kTwoPi) <= 1e-6);
    CHECK(angular_speed_check(m, t, true) <= 1e-4);
}

TEST_CASE("image angle advances in small steps") {
    const PlanarMap m = builtin_map("example1");
    const OrbitTrace t = integrate_orbit(m, {0.2, 0}, Vec2{0, 0});
    for (std::size_t i = 1; i < t.points.size(); ++i) {
        CHECK(std::abs(t.points[i].theta - t.points[i - 1].theta) <= 0.08 + 1e-12);
    }
}

TEST_CASE("orbits past the critical level escape") {
    const PlanarMap m = builtin_map("example1");
    TraceOptions opt;
    opt.box = Box{-20, 20, -20, 20};
    const OrbitTrace t = integrate_orbit(m, {std::log(1 + std::sqrt(2 * 0.6)), 0}, Vec2{0, 0}, opt);
    CHECK(t.outcome == OrbitOutcome::escaped);
    CHECK(t.escape_side == "xmin");
}

TEST_CASE("winding certificate") {
    const PlanarMap m = builtin_map("example1");
    const CenterRecord c = classify_center(m, {0, 0}, false);
    const WindingCertificate w = winding_certificate(m, c, 0.4);
    CHECK(w.closed);
    CHECK(w.injective_on_orbit);
    CHECK(w.winding == 1);
    const WindingCertificate far = winding_certificate(m, c, 0.55);
    CHECK(!far.closed);
    CHECK(!far.injective_on_orbit);
}

TEST_CASE("level point on a ray") {
    const PlanarMap m = builtin_map("identity");
    auto p = level_point_on_ray(m, {0, 0}, fan_direction(0), 0.125, {-5, 5, -5, 5});
    REQUIRE(p);
    CHECK(p->x == doctest::Approx(0.5));
    CHECK(!level_point_on_ray(m, {0, 0}, fan_direction(0), 50.0, {-5, 5, -5, 5}));
}
