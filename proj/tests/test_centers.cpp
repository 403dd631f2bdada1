#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hamcenter/centers.hpp"
#include "hamcenter/corpus.hpp"

using namespace hamcenter;

TEST_CASE("example 1 has a single center at the origin") {
    const PlanarMap m = builtin_map("example1");
    const ZeroSearch zs = find_zeros(m, {-4, 4, -4, 4}, 32);
    REQUIRE(zs.centers.size() == 1);
    CHECK(norm(zs.centers[0].location) <= 1e-9);
    CHECK(zs.centers[0].det_df == doctest::Approx(1.0));
    CHECK(zs.centers[0].omega == doctest::Approx(1.0));
    CHECK(!zs.centers[0].isochronous_hint);
    CHECK(zs.summary() == "found 1 zeros on a 32x32 grid");
}

TEST_CASE("example 3 centers at 2k pi on the y axis") {
    const PlanarMap m = builtin_map("example3");
    const ZeroSearch zs = find_zeros(m, {-4, 14, -4, 14}, 64);
    REQUIRE(zs.centers.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(zs.centers[k].location.x) <= 1e-9);
        CHECK(std::abs(zs.centers[k].location.y - 2 * k * std::numbers::pi) <= 1e-9);
        CHECK(zs.centers[k].det_df == doctest::Approx(1.0));
    }
}

TEST_CASE("serial and parallel searches agree") {
    ZeroSearchOptions s, p;
    s.exec = Exec::serial;
    p.exec = Exec::parallel;
    const PlanarMap m = builtin_map("example3");
    const ZeroSearch a = find_zeros(m, {-4, 14, -4, 14}, 40, s);
    const ZeroSearch b = find_zeros(m, {-4, 14, -4, 14}, 40, p);
    REQUIRE(a.centers.size() == b.centers.size());
    for (std::size_t i = 0; i < a.centers.size(); ++i) {
        CHECK(a.centers[i].location.x == b.centers[i].location.x);
        CHECK(a.centers[i].location.y == b.centers[i].location.y);
    }
    CHECK(a.converged == b.converged);
}

TEST_CASE("isochronous hint") {
    CHECK(isochronous_hint(builtin_map("identity"), 64));
    CHECK(isochronous_hint(builtin_map("example2"), 64));
    CHECK(!isochronous_hint(builtin_map("example1"), 64));
    const ZeroSearch zs = find_zeros(builtin_map("identity"), {-2, 2, -2, 2}, 8);
    REQUIRE(zs.centers.size() == 1);
    CHECK(zs.centers[0].isochronous_hint);
}

TEST_CASE("degenerate zeros are reported apart from centers") {
    const ZeroSearch zs = find_zeros(builtin_map("control_noninjective"), {-2, 2, -2, 2}, 16);
    CHECK(zs.centers.empty());
    // Newton converges only linearly onto a double root, so it may or may not
    // reach the tolerance; whatever it does find must be the origin.
    for (const auto& d : zs.degenerate) CHECK(norm(d.location) <= 1e-4);
}

TEST_CASE("classify_center rejects non-zeros") {
    const PlanarMap m = builtin_map("example1");
    CHECK_THROWS_AS(classify_center(m, {0.5, 0}, false), PreconditionError);
    const CenterRecord r = classify_center(m, {0, 0}, false);
    CHECK(r.linearization.det == doctest::Approx(1.0));
}
