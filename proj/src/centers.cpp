#include "hamcenter/centers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

namespace hamcenter {

std::string ZeroSearch::summary() const {
    return "found " + std::to_string(centers.size()) + " zeros on a " + std::to_string(grid_n) + "x" +
           std::to_string(grid_n) + " grid";
}

CenterRecord classify_center(const PlanarMap& map, Vec2 z, bool iso_hint, double zero_tol, double degenerate_tol) {
    const MapJet j = map.jet(z);
    CenterRecord c;
    c.location = z;
    c.residual = norm(j.value);
    c.det_df = j.jacobian.det();
    c.linearization = linearization_at(map, z, zero_tol, degenerate_tol);
    c.omega = std::abs(c.linearization.eigenvalues[0].imag());
    c.isochronous_hint = iso_hint;
    return c;
}

namespace {

// Extra Newton steps after the residual test passes. A simple root barely
// moves; at a multiple root the iterates keep creeping towards it, which
// drives det Df under the degeneracy threshold instead of stopping early
// at a point that merely has a small residual.
Vec2 polish(const PlanarMap& map, Vec2 z, double zero_tol) {
    for (int it = 0; it < 60; ++it) {
        MapJet j;
        try {
            j = map.jet(z);
        } catch (const std::exception&) {
            break;
        }
        const double det = j.jacobian.det();
        if (det == 0.0) break;
        const Mat2& a = j.jacobian;
        const Vec2 step{(a.d * j.value.x - a.b * j.value.y) / det, (a.a * j.value.y - a.c * j.value.x) / det};
        const Vec2 next = z - step;
        double rn;
        try {
            rn = norm(map.value(next));
        } catch (const std::exception&) {
            break;
        }
        if (!(rn <= zero_tol)) break;
        z = next;
        if (norm(step) <= 1e-15 * (1.0 + norm(z))) break;
    }
    return z;
}

}  // namespace

bool isochronous_hint(const PlanarMap& map, int samples, std::uint64_t seed) {
    if (samples < 16) throw std::invalid_argument("isochronous_hint needs at least 16 samples");
    std::mt19937_64 rng(seed);
    const Box b = map.domain().working_box();
    std::uniform_real_distribution<double> ux(b.xmin, b.xmax), uy(b.ymin, b.ymax);
    std::vector<double> dets;
    dets.reserve(samples);
    for (int s = 0; s < samples; ++s) {
        for (int attempt = 0; attempt <= 10; ++attempt) {
            const Vec2 p{ux(rng), uy(rng)};
            try {
                dets.push_back(map.jet(p).jacobian.det());
                break;
            } catch (const DomainError&) {
            } catch (const OverflowError&) {
            }
        }
    }
    if (dets.empty()) return false;
    const auto [lo, hi] = std::minmax_element(dets.begin(), dets.end());
    double mean = 0.0;
    for (double d : dets) mean += d;
    mean /= static_cast<double>(dets.size());
    return *hi - *lo <= 1e-8 * (1.0 + std::abs(mean));
}

ZeroSearch find_zeros(const PlanarMap& map, const Box& box, int grid_n, const ZeroSearchOptions& opt) {
    if (grid_n < 8) throw std::invalid_argument("find_zeros: grid_n must be at least 8");
    if (!box.valid()) throw std::invalid_argument("find_zeros: empty box");
    ZeroSearch out;
    out.grid_n = grid_n;

    const GridSpec grid{box, grid_n, grid_n};
    std::vector<Vec2> seeds;
    seeds.reserve(static_cast<std::size_t>(grid_n) * grid_n);
    for (int k = 0; k < grid_n; ++k) {
        for (int i = 0; i < grid_n; ++i) seeds.push_back(grid.center(i, k));
    }
    out.seeds = static_cast<int>(seeds.size());

    // Iterates may wander outside the box on their way in.
    const double pad = 0.5 * box.diameter();
    const Box region{box.xmin - pad, box.xmax + pad, box.ymin - pad, box.ymax + pad};
    const auto results = multistart_newton(map, seeds, {0.0, 0.0}, region, opt.zero_tol, opt.max_iter, opt.exec);

    std::vector<NewtonResult> hits;
    for (const auto& r : results) {
        switch (r.status) {
            case NewtonResult::Status::converged: {
                ++out.converged;
                NewtonResult p = r;
                p.point = polish(map, r.point, opt.zero_tol);
                p.residual = norm(map.value(p.point));
                if (box.contains(p.point)) hits.push_back(p);
                break;
            }
            case NewtonResult::Status::singular: ++out.singular_abandoned; break;
            default: ++out.failed; break;
        }
    }

    std::sort(hits.begin(), hits.end(), [](const NewtonResult& a, const NewtonResult& b) {
        return std::tie(a.residual, a.point.x, a.point.y) < std::tie(b.residual, b.point.x, b.point.y);
    });
    const double dedup_r = 1e-6 * box.diameter();
    std::vector<NewtonResult> kept;
    for (const auto& h : hits) {
        const bool dup = std::any_of(kept.begin(), kept.end(),
                                     [&](const NewtonResult& k) { return norm(k.point - h.point) <= dedup_r; });
        if (!dup) kept.push_back(h);
    }

    const bool iso = kept.empty() ? false : isochronous_hint(map, opt.isochronous_samples, opt.seed);
    for (const auto& k : kept) {
        const double det = map.jet(k.point).jacobian.det();
        if (std::abs(det) <= opt.degenerate_tol) {
            out.degenerate.push_back({k.point, det, k.residual});
            continue;
        }
        out.centers.push_back(classify_center(map, k.point, iso, opt.zero_tol, opt.degenerate_tol));
    }
    // Lexicographic with x quantised at the dedup radius, so round-off in x
    // does not reorder points that share a column.
    auto key = [dedup_r](Vec2 p) { return std::make_pair(std::round(p.x / dedup_r), p.y); };
    std::sort(out.centers.begin(), out.centers.end(),
              [&](const CenterRecord& a, const CenterRecord& b) { return key(a.location) < key(b.location); });
    std::sort(out.degenerate.begin(), out.degenerate.end(),
              [&](const DegenerateZero& a, const DegenerateZero& b) { return key(a.location) < key(b.location); });
    return out;
}

}  // namespace hamcenter
