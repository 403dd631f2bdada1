#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamcenter/centers.hpp"
#include "hamcenter/kernels.hpp"
#include "hamcenter/trace.hpp"

namespace hamcenter {

/// The smallest probed level already fails its certificate.
class AnnulusBelowResolution : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AnnulusOptions {
    std::optional<double> h_max;  // default_h_max() of the trace box when empty
    double tol = 1e-6;
    TraceOptions trace;
    Exec exec = Exec::parallel;
};

enum class ShapeKind { disc, plane, unknown };
const char* to_string(ShapeKind k);

struct ImageShape {
    ShapeKind kind = ShapeKind::unknown;
    double radius = 0.0;        // disc: √(2·ell_lo), a lower bound
    double radius_upper = 0.0;  // disc: √(2·ell_hi)
};

struct AnnulusReport {
    CenterRecord center;
    double h_max = 0.0;
    double ell_lo = 0.0;
    double ell_hi = 0.0;
    bool hi_is_budget = false;  // every probe up to h_max was good
    std::vector<WindingCertificate> certificates;  // sorted by h
    bool postpass_ok = true;
    std::vector<std::string> reasons;  // inconclusiveness and post-pass diagnostics
    ImageShape shape;
    std::vector<Vec2> boundary_polyline;
};

/// 0.5·min of ‖f‖² over the box boundary, clipped to [1, 1e6].
double default_h_max(const PlanarMap& map, const Box& box);

/// True when a certificate failed for a reason other than a geometric one
/// (stiffness, domain error, exhausted budget).
bool certificate_inconclusive(const WindingCertificate& c);

/// Bisection for ℓ on the certificate predicate, then a post-pass at
/// ell_lo·k/9, k = 1..8. Also fills `shape` and `boundary_polyline`.
AnnulusReport estimate_ell(const PlanarMap& map, const CenterRecord& center, const AnnulusOptions& opt = {});

ImageShape image_shape(const AnnulusReport& report);

enum class Membership { inside, outside, boundary };

/// Flood-filled component of {H_f < level} around a center on a cell grid.
class RegionSampler {
public:
    RegionSampler(const PlanarMap& map, Vec2 center, double level, const GridSpec& grid, Exec exec = Exec::parallel);

    Membership classify(Vec2 p) const;
    bool inside(Vec2 p) const { return classify(p) == Membership::inside; }

    const GridSpec& grid() const { return grid_; }
    double level() const { return level_; }
    bool in_component(int i, int k) const { return component_[grid_.index(i, k)] != 0; }
    std::size_t component_size() const { return count_; }
    /// Cells of the component with a 4-neighbour inside the grid but outside the component.
    std::vector<Vec2> boundary_cells() const;
    /// True when the component also reaches `other`'s cell.
    bool contains_cell_of(Vec2 other) const;

private:
    PlanarMap map_;
    GridSpec grid_;
    double level_;
    double boundary_tol_;
    std::vector<char> component_;
    std::size_t count_ = 0;
};

struct RegionResult {
    RegionSampler sampler;
    std::vector<Vec2> boundary_polyline;
    std::vector<std::string> warnings;
};

/// Throws PreconditionError when the center's cell is not below ell_lo.
RegionResult region(const PlanarMap& map, const CenterRecord& center, double ell_lo, int grid_n,
                    std::optional<Box> box = std::nullopt, const std::vector<CenterRecord>& others = {});

enum class GlobalVerdict { global, not_global, inconclusive };
const char* to_string(GlobalVerdict v);

struct GlobalCheck {
    GlobalVerdict verdict = GlobalVerdict::inconclusive;
    bool up_to_budget = false;
    std::vector<std::string> reasons;
};

GlobalCheck global_center_verdict(const PlanarMap& map, const AnnulusReport& report, const Box& working_box);

struct Collision {
    Vec2 p;
    Vec2 q;
    double image_distance = 0.0;
};

struct SpotCheck {
    int sampled = 0;
    std::vector<Collision> collisions;  // empty: no collision found
};

/// Draws n distinct cell centres of the sampler lattice that lie inside the
/// region and looks for pairs with nearly equal images (hash grid of cell 1e-4).
SpotCheck injectivity_spotcheck(const PlanarMap& map, const RegionSampler& sampler, int n, std::uint64_t seed = 42);

struct OracleComparison {
    double orbit_to_mask = 0.0;  // max over orbit points of the distance to the nearest boundary cell
    double mask_to_orbit = 0.0;  // max over boundary cells of the distance to the orbit polyline
    double cell = 0.0;           // cell diagonal
    bool agree() const { return orbit_to_mask <= cell && mask_to_orbit <= cell; }
};

/// Compares the boundary cells of the {H_f < h} component with an orbit polyline.
OracleComparison compare_component_with_orbit(const RegionSampler& component, const std::vector<Vec2>& orbit);

}  // namespace hamcenter
