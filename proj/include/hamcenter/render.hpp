#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hamcenter/annulus.hpp"
#include "hamcenter/compactify.hpp"

namespace hamcenter {

/// Layer roles; each maps to one colour of a fixed five-colour palette.
enum class Role { level, trajectory, boundary, center, equator, singular, label };
const char* to_string(Role r);
const char* role_color(Role r);

struct PolylineEl {
    std::vector<Vec2> points;
    Role role = Role::level;
    bool dashed = false;
    bool closed = false;
};

struct MarkerEl {
    Vec2 p;
    Role role = Role::center;
    double radius = 0.0;  // scene units
    bool filled = true;
};

struct CircleEl {
    Vec2 center;
    double radius = 0.0;
    Role role = Role::equator;
    bool dashed = false;
};

struct TextEl {
    Vec2 p;
    std::string text;
    Role role = Role::label;
};

using Element = std::variant<PolylineEl, MarkerEl, CircleEl, TextEl>;

struct Scene {
    Box viewport;
    bool disc = false;
    std::string title;
    std::vector<Element> elements;
    std::vector<std::string> warnings;

    /// Number of drawable curve elements (polylines and circles).
    std::size_t curve_count() const;
};

/// SVG 1.1 with viewBox equal to the viewport (y axis flipped so +y is up).
std::string to_svg(const Scene& scene);

/// Marching squares on cell-centre samples; returns polylines, joined across cells.
std::vector<std::vector<Vec2>> contour_lines(const std::vector<double>& values, const GridSpec& grid, double level);

/// Splits a polyline into the pieces lying inside `box`.
std::vector<std::vector<Vec2>> clip_to_box(const std::vector<Vec2>& line, const Box& box);

struct PortraitOptions {
    int contour_grid = 240;
    Exec exec = Exec::parallel;
};

/// Levels (sorted ascending) traced around each center, plus marching-squares
/// curves for level components no center reaches. Annulus boundaries dashed.
Scene plane_portrait(const PlanarMap& map, const std::vector<CenterRecord>& centers,
                     const std::vector<AnnulusReport>& reports, const std::vector<double>& levels, const Box& box,
                     const PortraitOptions& opt = {});

/// z ↦ z / (1 + ‖z‖), the open plane onto the open unit disc.
Vec2 disc_project(Vec2 z);

Scene disc_portrait(const CompactifiedField& cf, const std::vector<InfinitySingularity>& singularities);

struct DiscRequest {
    std::optional<Scene> scene;
    std::string refusal;  // set when the Hamiltonian is not polynomial
};

/// Compactifies and classifies on the fly; refuses maps without a polynomial H_f.
DiscRequest disc_portrait_for(const PlanarMap& map);

}  // namespace hamcenter
