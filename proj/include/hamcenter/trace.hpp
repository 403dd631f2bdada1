#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hamcenter/centers.hpp"
#include "hamcenter/field.hpp"

namespace hamcenter {

struct TraceOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    /// Per-step cap on the change of the image angle, radians.
    double max_dtheta = 0.08;
    int max_winding = 3;
    long max_steps = 400000;
    double min_step = 1e-14;
    /// Escape window; defaults to the map's working box when empty.
    std::optional<Box> box;
};

struct OrbitPoint {
    Vec2 p;
    double t = 0.0;
    /// Continuous lift of atan2(f2, f1).
    double theta = 0.0;
};

enum class OrbitOutcome { closed, escaped, budget_exhausted, domain_error };

const char* to_string(OrbitOutcome o);

struct OrbitTrace {
    double h = 0.0;
    Vec2 start;
    std::vector<OrbitPoint> points;
    OrbitOutcome outcome = OrbitOutcome::budget_exhausted;
    double period = 0.0;        // closed only
    int winding = 0;            // closed only: round(|Δθ| / 2π)
    double total_dtheta = 0.0;  // θ(end) - θ(start)
    std::string escape_side;    // escaped only: "xmin", "xmax", "ymin", "ymax"
    double escape_time = 0.0;
    Vec2 error_point;           // domain_error only
    bool stiff = false;         // step size underflow
    double orientation = 1.0;   // sign of det Df at the start: direction θ moves
    long accepted_steps = 0;
    long rejected_steps = 0;
};

/// Poincaré-type section through `start`: a line with unit direction `dir`.
/// A return is a crossing in the same orientation as the departure whose
/// crossing point lies within `return_tol` of `start`.
class ReturnSection {
public:
    ReturnSection(Vec2 start, Vec2 dir, Vec2 initial_velocity, double return_tol);
    /// For a center: the ray from the center through the start, tolerance 1e-7·(1+|start-center|).
    static ReturnSection around_center(Vec2 center, Vec2 start, Vec2 initial_velocity);

    double signed_distance(Vec2 z) const { return cross(dir_, z - start_); }
    /// True when the segment a→b crosses the section in the departure orientation.
    bool crosses(Vec2 a, Vec2 b) const;
    bool near_start(Vec2 z) const { return norm(z - start_) <= return_tol_; }
    double return_tol() const { return return_tol_; }

private:
    Vec2 start_;
    Vec2 dir_;
    double sigma_;
    double return_tol_;
};

/// Integrates the Hamiltonian field from `start`, projecting onto the level set
/// {H_f = H_f(start)} after every accepted step. With a center, closure is
/// detected on the ray from the center through the start; without one, on the
/// line through the start normal to the initial velocity.
OrbitTrace integrate_orbit(const PlanarMap& map, Vec2 start, std::optional<Vec2> center,
                           const TraceOptions& opt = {});

struct WindingCertificate {
    double h = 0.0;
    Vec2 start;
    bool closed = false;
    bool injective_on_orbit = false;
    int winding = 0;
    std::optional<double> period;
    OrbitOutcome outcome = OrbitOutcome::budget_exhausted;
    bool level_unreachable = false;
    bool invariants_held = false;
    bool stiff = false;
};

/// First point on {H_f = h} along the ray center + s·dir, s > 0, inside `box`.
std::optional<Vec2> level_point_on_ray(const PlanarMap& map, Vec2 center, Vec2 dir, double h, const Box& box);

/// Fan of start directions: +x first, then the remaining 7 of 8 equally spaced rays.
Vec2 fan_direction(int k);

/// Certificate for the orbit of energy h around `center`; `first_ray` picks the
/// preferred fan ray (0 = +x). With `trace_out` the traced orbit is returned too.
WindingCertificate winding_certificate(const PlanarMap& map, const CenterRecord& center, double h,
                                       const TraceOptions& opt = {}, int first_ray = 0,
                                       OrbitTrace* trace_out = nullptr);

/// Max over stored samples of |dθ/dt - det Df|, with dθ/dt from central
/// differences of θ along short integrated sub-steps around each sample.
double angular_speed_check(const PlanarMap& map, const OrbitTrace& trace, bool relative = false);

struct TraceInvariantReport {
    double max_energy_dev = 0.0;  // max |H - h| / (1 + h)
    double max_circle_dev = 0.0;  // max | |f|^2 - 2h | / (1 + h)
    bool theta_monotone = true;
};

TraceInvariantReport check_trace_invariants(const PlanarMap& map, const OrbitTrace& trace);

}  // namespace hamcenter
