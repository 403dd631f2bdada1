#include "hamcenter/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <random>

#include "hamcenter/numfmt.hpp"

namespace hamcenter {

const char* to_string(ShapeKind k) {
    switch (k) {
        case ShapeKind::disc: return "disc";
        case ShapeKind::plane: return "plane";
        case ShapeKind::unknown: return "unknown";
    }
    return "unknown";
}

const char* to_string(GlobalVerdict v) {
    switch (v) {
        case GlobalVerdict::global: return "global";
        case GlobalVerdict::not_global: return "not-global";
        case GlobalVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

double default_h_max(const PlanarMap& map, const Box& box) {
    constexpr int n = 1024;
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= n; ++s) {
        const double a = static_cast<double>(s) / n;
        const double x = box.xmin + a * box.width();
        const double y = box.ymin + a * box.height();
        for (Vec2 p : {Vec2{x, box.ymin}, Vec2{x, box.ymax}, Vec2{box.xmin, y}, Vec2{box.xmax, y}}) {
            try {
                best = std::min(best, map.hamiltonian(p));
            } catch (const std::exception&) {
            }
        }
    }
    if (!std::isfinite(best)) best = 1.0;
    return std::clamp(best, 1.0, 1e6);
}

bool certificate_inconclusive(const WindingCertificate& c) {
    if (c.injective_on_orbit) return false;
    if (c.stiff) return true;
    return c.outcome == OrbitOutcome::domain_error || c.outcome == OrbitOutcome::budget_exhausted;
}

namespace {

std::string describe(const WindingCertificate& c) {
    std::string s = "h=" + format_number(c.h) + " outcome=" + to_string(c.outcome);
    if (c.level_unreachable) s += " (level not reached on any fan ray)";
    if (c.closed) s += " winding=" + std::to_string(c.winding);
    if (!c.invariants_held) s += " invariants violated";
    if (c.stiff) s += " stiff";
    return s;
}

WindingCertificate safe_certificate(const PlanarMap& map, const CenterRecord& center, double h,
                                    const TraceOptions& opt, OrbitTrace* out = nullptr) {
    try {
        return winding_certificate(map, center, h, opt, 0, out);
    } catch (const std::exception&) {
        WindingCertificate c;
        c.h = h;
        c.outcome = OrbitOutcome::domain_error;
        return c;
    }
}

}  // namespace

AnnulusReport estimate_ell(const PlanarMap& map, const CenterRecord& center, const AnnulusOptions& opt) {
    if (!(opt.tol > 0.0)) throw std::invalid_argument("estimate_ell: tol must be positive");
    const Box box = opt.trace.box.value_or(map.domain().working_box());
    TraceOptions topt = opt.trace;
    topt.box = box;

    AnnulusReport rep;
    rep.center = center;
    rep.h_max = opt.h_max.value_or(default_h_max(map, box));
    if (!(rep.h_max > 0.0)) throw std::invalid_argument("estimate_ell: h_max must be positive");

    auto probe = [&](double h) {
        rep.certificates.push_back(safe_certificate(map, center, h, topt));
        return rep.certificates.back();
    };

    const WindingCertificate top = probe(rep.h_max);
    const WindingCertificate* failing = nullptr;
    WindingCertificate first_bad;
    if (top.injective_on_orbit) {
        rep.ell_lo = rep.ell_hi = rep.h_max;
        rep.hi_is_budget = true;
    } else {
        const double h0 = std::min(opt.tol, 0.5 * rep.h_max);
        const WindingCertificate bottom = probe(h0);
        if (!bottom.injective_on_orbit) {
            throw AnnulusBelowResolution("annulus below resolution: " + describe(bottom));
        }
        double lo = h0, hi = rep.h_max;
        first_bad = top;
        while (hi - lo > opt.tol) {
            const double mid = 0.5 * (lo + hi);
            const WindingCertificate c = probe(mid);
            if (c.injective_on_orbit) {
                lo = mid;
            } else {
                hi = mid;
                first_bad = c;
            }
        }
        rep.ell_lo = lo;
        rep.ell_hi = hi;
        failing = &first_bad;
    }
    if (failing && certificate_inconclusive(*failing)) {
        rep.reasons.push_back("upper bracket level failed inconclusively: " + describe(*failing));
    }

    // Post-pass: the bisection assumed the good levels are downward closed.
    std::vector<WindingCertificate> post(8);
    const long n = static_cast<long>(post.size());
    if (opt.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long k = 0; k < n; ++k) post[k] = safe_certificate(map, center, rep.ell_lo * (k + 1) / 9.0, topt);
    } else {
        for (long k = 0; k < n; ++k) post[k] = safe_certificate(map, center, rep.ell_lo * (k + 1) / 9.0, topt);
    }
    for (const auto& c : post) {
        if (!c.injective_on_orbit) {
            rep.postpass_ok = false;
            rep.reasons.push_back("post-pass certificate failed below ell_lo: " + describe(c));
        }
        rep.certificates.push_back(c);
    }
    std::stable_sort(rep.certificates.begin(), rep.certificates.end(),
                     [](const WindingCertificate& a, const WindingCertificate& b) { return a.h < b.h; });

    OrbitTrace tr;
    safe_certificate(map, center, rep.ell_lo, topt, &tr);
    rep.boundary_polyline.reserve(tr.points.size());
    for (const auto& p : tr.points) rep.boundary_polyline.push_back(p.p);

    rep.shape = image_shape(rep);
    return rep;
}

ImageShape image_shape(const AnnulusReport& report) {
    ImageShape s;
    if (!report.postpass_ok || !report.reasons.empty()) return s;
    for (const auto& c : report.certificates) {
        if (c.h <= report.ell_lo && certificate_inconclusive(c)) return s;
    }
    if (report.hi_is_budget) {
        s.kind = ShapeKind::plane;
        return s;
    }
    s.kind = ShapeKind::disc;
    s.radius = std::sqrt(2.0 * report.ell_lo);
    s.radius_upper = std::sqrt(2.0 * report.ell_hi);
    return s;
}

RegionSampler::RegionSampler(const PlanarMap& map, Vec2 center, double level, const GridSpec& grid, Exec exec)
    : map_(map), grid_(grid), level_(level), boundary_tol_(1e-12 * (1.0 + std::abs(level))) {
    const std::vector<double> h = hamiltonian_grid(map, grid, exec);
    component_.assign(h.size(), 0);
    int ci = 0, ck = 0;
    if (!grid_.cell_of(center, ci, ck)) throw PreconditionError("region: center outside the grid box");
    if (!(h[grid_.index(ci, ck)] < level)) {
        throw PreconditionError("region: grid too coarse, center cell is not below the level");
    }
    std::deque<std::pair<int, int>> queue{{ci, ck}};
    component_[grid_.index(ci, ck)] = 1;
    count_ = 1;
    while (!queue.empty()) {
        const auto [i, k] = queue.front();
        queue.pop_front();
        constexpr int di[4] = {1, -1, 0, 0};
        constexpr int dk[4] = {0, 0, 1, -1};
        for (int e = 0; e < 4; ++e) {
            const int ni = i + di[e], nk = k + dk[e];
            if (ni < 0 || nk < 0 || ni >= grid_.nx || nk >= grid_.ny) continue;
            const std::size_t idx = grid_.index(ni, nk);
            if (component_[idx] || !(h[idx] < level)) continue;
            component_[idx] = 1;
            ++count_;
            queue.emplace_back(ni, nk);
        }
    }
}

Membership RegionSampler::classify(Vec2 p) const {
    int i = 0, k = 0;
    if (!grid_.cell_of(p, i, k)) return Membership::outside;
    double h;
    try {
        h = map_.hamiltonian(p);
    } catch (const std::exception&) {
        return Membership::outside;
    }
    if (std::abs(h - level_) <= boundary_tol_) return Membership::boundary;
    if (!(h < level_)) return Membership::outside;
    for (int dk = -1; dk <= 1; ++dk) {
        for (int di = -1; di <= 1; ++di) {
            const int ni = i + di, nk = k + dk;
            if (ni < 0 || nk < 0 || ni >= grid_.nx || nk >= grid_.ny) continue;
            if (component_[grid_.index(ni, nk)]) return Membership::inside;
        }
    }
    return Membership::outside;
}

std::vector<Vec2> RegionSampler::boundary_cells() const {
    std::vector<Vec2> out;
    for (int k = 0; k < grid_.ny; ++k) {
        for (int i = 0; i < grid_.nx; ++i) {
            if (!in_component(i, k)) continue;
            const bool edge = (i + 1 < grid_.nx && !in_component(i + 1, k)) || (i > 0 && !in_component(i - 1, k)) ||
                              (k + 1 < grid_.ny && !in_component(i, k + 1)) || (k > 0 && !in_component(i, k - 1));
            if (edge) out.push_back(grid_.center(i, k));
        }
    }
    return out;
}

bool RegionSampler::contains_cell_of(Vec2 other) const {
    int i = 0, k = 0;
    return grid_.cell_of(other, i, k) && in_component(i, k);
}

RegionResult region(const PlanarMap& map, const CenterRecord& center, double ell_lo, int grid_n, std::optional<Box> box,
                    const std::vector<CenterRecord>& others) {
    if (grid_n < 8) throw std::invalid_argument("region: grid_n must be at least 8");
    const Box b = box.value_or(map.domain().working_box());
    RegionResult out{RegionSampler(map, center.location, ell_lo, GridSpec{b, grid_n, grid_n}), {}, {}};
    for (const auto& o : others) {
        if (norm(o.location - center.location) <= 1e-9 * (1.0 + b.diameter())) continue;
        if (out.sampler.contains_cell_of(o.location)) {
            out.warnings.push_back("flood-fill component of the center at (" + format_number(center.location.x) +
                                   ", " + format_number(center.location.y) + ") also contains the center at (" +
                                   format_number(o.location.x) + ", " + format_number(o.location.y) +
                                   "); grid too coarse to separate them");
        }
    }
    TraceOptions topt;
    topt.box = b;
    OrbitTrace tr;
    safe_certificate(map, center, ell_lo, topt, &tr);
    for (const auto& p : tr.points) out.boundary_polyline.push_back(p.p);
    return out;
}

GlobalCheck global_center_verdict(const PlanarMap& map, const AnnulusReport& report, const Box& working_box) {
    GlobalCheck g;
    const JacobianSignScan js = scan_jacobian_sign(map, working_box, 64);
    if (js.sign_change()) {
        g.reasons.push_back("det Df changes sign in the working box (" + std::to_string(js.positive) + " positive, " +
                            std::to_string(js.negative) + " negative samples)");
    }
    if (!report.postpass_ok) g.reasons.push_back("certificate post-pass failed below ell_lo");
    for (const auto& r : report.reasons) g.reasons.push_back(r);
    if (!g.reasons.empty()) return g;

    if (report.hi_is_budget) {
        g.verdict = GlobalVerdict::global;
        g.up_to_budget = true;
        g.reasons.push_back("every probed level up to h_max=" + format_number(report.h_max) +
                            " closes injectively");
        return g;
    }
    const int n = 128;
    const auto h = hamiltonian_grid(map, GridSpec{working_box, n, n}, Exec::parallel);
    double hmax = -std::numeric_limits<double>::infinity();
    for (double v : h) {
        if (std::isfinite(v)) hmax = std::max(hmax, v);
    }
    if (hmax > report.ell_hi + 1e-9 * (1.0 + report.ell_hi)) {
        g.verdict = GlobalVerdict::not_global;
        g.reasons.push_back("level " + format_number(report.ell_hi) +
                            " fails the certificate while the working box reaches H_f=" + format_number(hmax));
    } else {
        g.reasons.push_back("certificate fails at " + format_number(report.ell_hi) +
                            " but no higher energy was sampled in the working box");
    }
    return g;
}

SpotCheck injectivity_spotcheck(const PlanarMap& map, const RegionSampler& sampler, int n, std::uint64_t seed) {
    if (n < 100) throw std::invalid_argument("injectivity_spotcheck: n must be at least 100");
    const GridSpec& g = sampler.grid();
    std::vector<Vec2> pool;
    for (int k = 0; k < g.ny; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 c = g.center(i, k);
            if (sampler.in_component(i, k) && sampler.inside(c)) pool.push_back(c);
        }
    }
    std::mt19937_64 rng(seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    if (pool.size() > static_cast<std::size_t>(n)) pool.resize(n);

    SpotCheck out;
    out.sampled = static_cast<int>(pool.size());
    std::vector<char> ok;
    const std::vector<Vec2> img = map_points(map, pool, ok, Exec::parallel);

    constexpr double cell = 1e-4;
    std::map<std::pair<long long, long long>, std::vector<int>> buckets;
    auto key = [&](Vec2 w) {
        return std::make_pair(static_cast<long long>(std::floor(w.x / cell)),
                              static_cast<long long>(std::floor(w.y / cell)));
    };
    for (int i = 0; i < out.sampled; ++i) {
        if (ok[i]) buckets[key(img[i])].push_back(i);
    }
    for (int i = 0; i < out.sampled; ++i) {
        if (!ok[i]) continue;
        const auto [kx, ky] = key(img[i]);
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = buckets.find({kx + dx, ky + dy});
                if (it == buckets.end()) continue;
                for (int j : it->second) {
                    if (j <= i) continue;
                    const double d = norm(img[i] - img[j]);
                    if (d <= 1e-6 && norm(pool[i] - pool[j]) >= 1e-3) out.collisions.push_back({pool[i], pool[j], d});
                }
            }
        }
    }
    return out;
}

namespace {

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double l2 = norm2(ab);
    double t = l2 > 0 ? dot(p - a, ab) / l2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

}  // namespace

OracleComparison compare_component_with_orbit(const RegionSampler& component, const std::vector<Vec2>& orbit) {
    OracleComparison c;
    const GridSpec& g = component.grid();
    c.cell = std::hypot(g.dx(), g.dy());
    const std::vector<Vec2> cells = component.boundary_cells();
    if (cells.empty() || orbit.size() < 2) {
        c.orbit_to_mask = c.mask_to_orbit = std::numeric_limits<double>::infinity();
        return c;
    }
    // Densify the orbit so that the orbit-to-mask direction sees the whole curve.
    std::vector<Vec2> dense;
    const double spacing = 0.25 * std::min(g.dx(), g.dy());
    for (std::size_t s = 0; s + 1 < orbit.size(); ++s) {
        const int m = std::max(1, static_cast<int>(std::ceil(norm(orbit[s + 1] - orbit[s]) / spacing)));
        for (int j = 0; j < m; ++j) dense.push_back(orbit[s] + (static_cast<double>(j) / m) * (orbit[s + 1] - orbit[s]));
    }
    dense.push_back(orbit.back());
    for (Vec2 p : dense) {
        double best = std::numeric_limits<double>::infinity();
        for (Vec2 q : cells) best = std::min(best, norm(p - q));
        c.orbit_to_mask = std::max(c.orbit_to_mask, best);
    }
    for (Vec2 q : cells) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s + 1 < orbit.size(); ++s) best = std::min(best, segment_distance(q, orbit[s], orbit[s + 1]));
        c.mask_to_orbit = std::max(c.mask_to_orbit, best);
    }
    return c;
}

}  // namespace hamcenter
