#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hamcenter/field.hpp"
#include "hamcenter/kernels.hpp"

namespace hamcenter {

/// A zero of f with non-degenerate Jacobian: a non-degenerate center of the
/// Hamiltonian field, eigenvalues ±i·omega.
struct CenterRecord {
    Vec2 location;
    double det_df = 0.0;
    double omega = 0.0;
    bool isochronous_hint = false;
    double residual = 0.0;
    Linearization linearization;
};

struct DegenerateZero {
    Vec2 location;
    double det_df = 0.0;
    double residual = 0.0;
};

struct ZeroSearch {
    std::vector<CenterRecord> centers;  // sorted lexicographically
    std::vector<DegenerateZero> degenerate;
    int grid_n = 0;
    int seeds = 0;
    int converged = 0;
    int singular_abandoned = 0;
    int failed = 0;

    std::string summary() const;
};

struct ZeroSearchOptions {
    double zero_tol = kZeroTol;
    double degenerate_tol = kDegenerateTol;
    int max_iter = 50;
    int isochronous_samples = 64;
    std::uint64_t seed = 42;
    Exec exec = Exec::parallel;
};

/// Multistart Newton on f from grid_n x grid_n seeds (cell centres of `box`).
/// Completeness is not guaranteed.
ZeroSearch find_zeros(const PlanarMap& map, const Box& box, int grid_n, const ZeroSearchOptions& opt = {});

/// True iff det Df is numerically constant over `samples` random points of the working box.
bool isochronous_hint(const PlanarMap& map, int samples, std::uint64_t seed = 42);

/// Builds the record for a known zero; throws PreconditionError if z is not a
/// zero or the Jacobian is degenerate there.
CenterRecord classify_center(const PlanarMap& map, Vec2 z, bool iso_hint, double zero_tol = kZeroTol,
                             double degenerate_tol = kDegenerateTol);

}  // namespace hamcenter
