#include "hamcenter/kernels.hpp"

#include <cmath>
#include <limits>

namespace hamcenter {

bool GridSpec::cell_of(Vec2 p, int& i, int& k) const {
    const double fx = (p.x - box.xmin) / dx();
    const double fy = (p.y - box.ymin) / dy();
    if (!(fx >= 0.0 && fy >= 0.0 && fx <= nx && fy <= ny)) return false;
    i = std::min(static_cast<int>(fx), nx - 1);
    k = std::min(static_cast<int>(fy), ny - 1);
    return true;
}

namespace {

double safe_hamiltonian(const PlanarMap& map, Vec2 p) {
    try {
        return map.hamiltonian(p);
    } catch (const DomainError&) {
    } catch (const OverflowError&) {
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::vector<double> hamiltonian_grid(const PlanarMap& map, const GridSpec& grid, Exec exec) {
    std::vector<double> h(static_cast<std::size_t>(grid.nx) * grid.ny);
    const long total = static_cast<long>(h.size());
    if (exec == Exec::serial) {
        for (long idx = 0; idx < total; ++idx) {
            h[idx] = safe_hamiltonian(map, grid.center(static_cast<int>(idx % grid.nx), static_cast<int>(idx / grid.nx)));
        }
    } else {
#pragma omp parallel for schedule(static)
        for (long idx = 0; idx < total; ++idx) {
            h[idx] = safe_hamiltonian(map, grid.center(static_cast<int>(idx % grid.nx), static_cast<int>(idx / grid.nx)));
        }
    }
    return h;
}

NewtonResult newton_solve(const PlanarMap& map, Vec2 seed, Vec2 target, const Box& region, double tol,
                          int max_iter) {
    NewtonResult r;
    Vec2 z = seed;
    try {
        MapJet j = map.jet(z);
        Vec2 res = j.value - target;
        double rn = norm(res);
        for (int it = 0; it <= max_iter; ++it) {
            r.iterations = it;
            r.point = z;
            r.residual = rn;
            if (rn <= tol) {
                r.status = NewtonResult::Status::converged;
                return r;
            }
            if (it == max_iter) break;
            const double det = j.jacobian.det();
            // Singular means the determinant is lost in the cancellation of ad - bc.
            const double cancel = std::abs(j.jacobian.a * j.jacobian.d) + std::abs(j.jacobian.b * j.jacobian.c);
            if (!(std::abs(det) > 1e-12 * cancel) || det == 0.0) {
                r.status = NewtonResult::Status::singular;
                return r;
            }
            const Vec2 step{(j.jacobian.d * res.x - j.jacobian.b * res.y) / det,
                            (-j.jacobian.c * res.x + j.jacobian.a * res.y) / det};
            // Backtrack on the residual norm; the full step is always tried first.
            double lambda = 1.0;
            Vec2 zn;
            MapJet jn;
            double rnn = 0.0;
            bool accepted = false;
            for (int bt = 0; bt < 12; ++bt) {
                zn = z - lambda * step;
                if (!region.contains(zn)) {
                    lambda *= 0.5;
                    continue;
                }
                try {
                    jn = map.jet(zn);
                } catch (const DomainError&) {
                    lambda *= 0.5;
                    continue;
                } catch (const OverflowError&) {
                    lambda *= 0.5;
                    continue;
                }
                rnn = norm(jn.value - target);
                if (rnn < rn || bt == 11) {
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!accepted) {
                r.status = region.contains(zn) ? NewtonResult::Status::domain_error : NewtonResult::Status::left_region;
                return r;
            }
            z = zn;
            j = jn;
            res = j.value - target;
            rn = rnn;
        }
        r.status = NewtonResult::Status::no_convergence;
    } catch (const DomainError&) {
        r.status = NewtonResult::Status::domain_error;
    } catch (const OverflowError&) {
        r.status = NewtonResult::Status::domain_error;
    }
    return r;
}

std::vector<NewtonResult> multistart_newton(const PlanarMap& map, std::span<const Vec2> seeds, Vec2 target,
                                            const Box& region, double tol, int max_iter, Exec exec) {
    std::vector<NewtonResult> out(seeds.size());
    const long n = static_cast<long>(seeds.size());
    if (exec == Exec::serial) {
        for (long i = 0; i < n; ++i) out[i] = newton_solve(map, seeds[i], target, region, tol, max_iter);
    } else {
#pragma omp parallel for schedule(dynamic, 16)
        for (long i = 0; i < n; ++i) out[i] = newton_solve(map, seeds[i], target, region, tol, max_iter);
    }
    return out;
}

std::vector<Vec2> map_points(const PlanarMap& map, std::span<const Vec2> points, std::vector<char>& ok, Exec exec) {
    std::vector<Vec2> out(points.size());
    ok.assign(points.size(), 0);
    const long n = static_cast<long>(points.size());
    auto one = [&](long i) {
        try {
            out[i] = map.value(points[i]);
            ok[i] = 1;
        } catch (const DomainError&) {
        } catch (const OverflowError&) {
        }
    };
    if (exec == Exec::serial) {
        for (long i = 0; i < n; ++i) one(i);
    } else {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) one(i);
    }
    return out;
}

}  // namespace hamcenter
