#pragma once

// Data-parallel inner loops. Every kernel has a serial reference path and an
// OpenMP path; both write results by index, so output is identical for any
// thread count.

#include <span>
#include <vector>

#include "hamcenter/field.hpp"

namespace hamcenter {

enum class Exec { serial, parallel };

/// Cell-centred grid over a box: cell (i, k) has centre
/// (xmin + (i + 0.5) * dx, ymin + (k + 0.5) * dy). Values are stored row-major in k.
struct GridSpec {
    Box box;
    int nx = 0;
    int ny = 0;

    double dx() const { return box.width() / nx; }
    double dy() const { return box.height() / ny; }
    Vec2 center(int i, int k) const { return {box.xmin + (i + 0.5) * dx(), box.ymin + (k + 0.5) * dy()}; }
    std::size_t index(int i, int k) const { return static_cast<std::size_t>(k) * nx + i; }
    bool cell_of(Vec2 p, int& i, int& k) const;
};

/// H_f at every cell centre; NaN where f is undefined or overflows.
std::vector<double> hamiltonian_grid(const PlanarMap& map, const GridSpec& grid, Exec exec);

struct NewtonResult {
    enum class Status { converged, singular, left_region, no_convergence, domain_error };
    Status status = Status::no_convergence;
    Vec2 point;
    double residual = 0.0;
    int iterations = 0;
};

/// Damped Newton on f(z) = target. Iterates that leave `region` are abandoned.
NewtonResult newton_solve(const PlanarMap& map, Vec2 seed, Vec2 target, const Box& region, double tol,
                          int max_iter);

std::vector<NewtonResult> multistart_newton(const PlanarMap& map, std::span<const Vec2> seeds, Vec2 target,
                                            const Box& region, double tol, int max_iter, Exec exec);

/// f at every point; points where f is undefined are reported through `ok`.
std::vector<Vec2> map_points(const PlanarMap& map, std::span<const Vec2> points, std::vector<char>& ok, Exec exec);

}  // namespace hamcenter
