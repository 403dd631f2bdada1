#include "hamcenter/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hamcenter {

const char* to_string(Role r) {
    switch (r) {
        case Role::level: return "level";
        case Role::trajectory: return "trajectory";
        case Role::boundary: return "boundary";
        case Role::center: return "center";
        case Role::equator: return "equator";
        case Role::singular: return "singular";
        case Role::label: return "label";
    }
    return "level";
}

const char* role_color(Role r) {
    switch (r) {
        case Role::level:
        case Role::trajectory: return "#1f5fa8";
        case Role::boundary: return "#c0392b";
        case Role::center: return "#1e8449";
        case Role::equator:
        case Role::label: return "#2c2c2c";
        case Role::singular: return "#d68910";
    }
    return "#2c2c2c";
}

std::size_t Scene::curve_count() const {
    std::size_t n = 0;
    for (const auto& e : elements) {
        if (std::holds_alternative<PolylineEl>(e) || std::holds_alternative<CircleEl>(e)) ++n;
    }
    return n;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.7g", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string to_svg(const Scene& scene) {
    const Box& v = scene.viewport;
    const double unit = v.diameter();
    const double sw = 0.0025 * unit;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    const double aspect = v.height() / v.width();
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\""
       << num(std::round(800 * aspect)) << "\" viewBox=\"" << num(v.xmin) << ' ' << num(-v.ymax) << ' '
       << num(v.width()) << ' ' << num(v.height()) << "\">\n";
    if (!scene.title.empty()) os << "<title>" << xml_escape(scene.title) << "</title>\n";
    if (scene.disc) os << "<desc>Poincare disc, plane mapped by z/(1+|z|)</desc>\n";
    for (const auto& el : scene.elements) {
        if (const auto* p = std::get_if<PolylineEl>(&el)) {
            if (p->points.size() < 2) continue;
            os << '<' << (p->closed ? "polygon" : "polyline") << " class=\"" << to_string(p->role)
               << "\" fill=\"none\" stroke=\"" << role_color(p->role) << "\" stroke-width=\"" << num(sw) << '"';
            if (p->dashed) os << " stroke-dasharray=\"" << num(4 * sw) << ',' << num(3 * sw) << '"';
            os << " points=\"";
            for (std::size_t i = 0; i < p->points.size(); ++i) {
                if (i) os << ' ';
                os << num(p->points[i].x) << ',' << num(-p->points[i].y);
            }
            os << "\"/>\n";
        } else if (const auto* m = std::get_if<MarkerEl>(&el)) {
            os << "<circle class=\"" << to_string(m->role) << "\" cx=\"" << num(m->p.x) << "\" cy=\"" << num(-m->p.y)
               << "\" r=\"" << num(m->radius) << "\" stroke=\"" << role_color(m->role) << "\" stroke-width=\""
               << num(sw) << "\" fill=\"" << (m->filled ? role_color(m->role) : "none") << "\"/>\n";
        } else if (const auto* c = std::get_if<CircleEl>(&el)) {
            os << "<circle class=\"" << to_string(c->role) << "\" cx=\"" << num(c->center.x) << "\" cy=\""
               << num(-c->center.y) << "\" r=\"" << num(c->radius) << "\" fill=\"none\" stroke=\""
               << role_color(c->role) << "\" stroke-width=\"" << num(sw) << '"';
            if (c->dashed) os << " stroke-dasharray=\"" << num(4 * sw) << ',' << num(3 * sw) << '"';
            os << "/>\n";
        } else if (const auto* t = std::get_if<TextEl>(&el)) {
            os << "<text class=\"" << to_string(t->role) << "\" x=\"" << num(t->p.x) << "\" y=\"" << num(-t->p.y)
               << "\" font-size=\"" << num(0.03 * unit) << "\" fill=\"" << role_color(t->role) << "\">"
               << xml_escape(t->text) << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::vector<std::vector<Vec2>> contour_lines(const std::vector<double>& values, const GridSpec& grid, double level) {
    // Nodes are the cell centres; squares join four neighbouring nodes.
    // Edge ids: 2·index for the edge to the right, 2·index + 1 for the edge upward.
    const int nx = grid.nx, ny = grid.ny;
    auto val = [&](int i, int k) { return values[grid.index(i, k)] - level; };
    auto crossing = [&](long id) {
        const long idx = id / 2;
        const int i = static_cast<int>(idx % nx), k = static_cast<int>(idx / nx);
        const int i2 = (id % 2 == 0) ? i + 1 : i;
        const int k2 = (id % 2 == 0) ? k : k + 1;
        const double a = val(i, k), b = val(i2, k2);
        const double t = a / (a - b);
        return grid.center(i, k) + t * (grid.center(i2, k2) - grid.center(i, k));
    };
    std::map<long, std::vector<long>> adj;
    std::vector<std::pair<long, long>> segs;
    for (int k = 0; k + 1 < ny; ++k) {
        for (int i = 0; i + 1 < nx; ++i) {
            const double v00 = val(i, k), v10 = val(i + 1, k), v01 = val(i, k + 1), v11 = val(i + 1, k + 1);
            if (!std::isfinite(v00) || !std::isfinite(v10) || !std::isfinite(v01) || !std::isfinite(v11)) continue;
            const long bottom = 2L * grid.index(i, k), left = 2L * grid.index(i, k) + 1;
            const long top = 2L * grid.index(i, k + 1), right = 2L * grid.index(i + 1, k) + 1;
            std::vector<long> e;
            // Fixed edge order; a node exactly on the level counts as above it.
            if ((v00 < 0) != (v10 < 0)) e.push_back(bottom);
            if ((v10 < 0) != (v11 < 0)) e.push_back(right);
            if ((v11 < 0) != (v01 < 0)) e.push_back(top);
            if ((v01 < 0) != (v00 < 0)) e.push_back(left);
            if (e.size() == 2) {
                segs.emplace_back(e[0], e[1]);
            } else if (e.size() == 4) {
                const double mid = 0.25 * (v00 + v10 + v01 + v11);
                if ((mid < 0) == (v00 < 0)) {
                    segs.emplace_back(bottom, right);
                    segs.emplace_back(top, left);
                } else {
                    segs.emplace_back(bottom, left);
                    segs.emplace_back(right, top);
                }
            }
        }
    }
    for (std::size_t s = 0; s < segs.size(); ++s) {
        adj[segs[s].first].push_back(static_cast<long>(s));
        adj[segs[s].second].push_back(static_cast<long>(s));
    }
    std::vector<char> used(segs.size(), 0);
    std::vector<std::vector<Vec2>> lines;
    auto walk = [&](long start_seg, long from_edge) {
        std::vector<long> chain{from_edge};
        long seg = start_seg, edge = from_edge;
        while (seg >= 0 && !used[seg]) {
            used[seg] = 1;
            edge = segs[seg].first == edge ? segs[seg].second : segs[seg].first;
            chain.push_back(edge);
            seg = -1;
            for (long s2 : adj[edge]) {
                if (!used[s2]) {
                    seg = s2;
                    break;
                }
            }
        }
        return chain;
    };
    // Open chains first (start at an edge with one segment), then loops.
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t s = 0; s < segs.size(); ++s) {
            if (used[s]) continue;
            long from = segs[s].first;
            if (pass == 0) {
                if (adj[segs[s].first].size() == 1) {
                    from = segs[s].first;
                } else if (adj[segs[s].second].size() == 1) {
                    from = segs[s].second;
                } else {
                    continue;
                }
            }
            const std::vector<long> chain = walk(static_cast<long>(s), from);
            std::vector<Vec2> pts;
            pts.reserve(chain.size());
            for (long e : chain) pts.push_back(crossing(e));
            lines.push_back(std::move(pts));
        }
    }
    return lines;
}

std::vector<std::vector<Vec2>> clip_to_box(const std::vector<Vec2>& line, const Box& box) {
    std::vector<std::vector<Vec2>> out;
    std::vector<Vec2> cur;
    for (const Vec2& p : line) {
        if (box.contains(p) && std::isfinite(p.x) && std::isfinite(p.y)) {
            cur.push_back(p);
        } else if (!cur.empty()) {
            if (cur.size() >= 2) out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (cur.size() >= 2) out.push_back(std::move(cur));
    return out;
}

namespace {

class PointHash {
public:
    explicit PointHash(double cell) : cell_(cell) {}
    void add_polyline(const std::vector<Vec2>& line) {
        for (std::size_t s = 0; s + 1 < line.size(); ++s) {
            const int m = std::max(1, static_cast<int>(std::ceil(norm(line[s + 1] - line[s]) / (0.5 * cell_))));
            for (int j = 0; j <= m; ++j) add(line[s] + (static_cast<double>(j) / m) * (line[s + 1] - line[s]));
        }
        if (line.size() == 1) add(line[0]);
    }
    bool near(Vec2 p, double radius) const {
        const auto [cx, cy] = key(p);
        const int reach = static_cast<int>(std::ceil(radius / cell_));
        for (long long dx = -reach; dx <= reach; ++dx) {
            for (long long dy = -reach; dy <= reach; ++dy) {
                auto it = cells_.find({cx + dx, cy + dy});
                if (it == cells_.end()) continue;
                for (const Vec2& q : it->second) {
                    if (norm(p - q) <= radius) return true;
                }
            }
        }
        return false;
    }

private:
    std::pair<long long, long long> key(Vec2 p) const {
        return {static_cast<long long>(std::floor(p.x / cell_)), static_cast<long long>(std::floor(p.y / cell_))};
    }
    void add(Vec2 p) { cells_[key(p)].push_back(p); }
    double cell_;
    std::map<std::pair<long long, long long>, std::vector<Vec2>> cells_;
};

void add_clipped(Scene& scene, const std::vector<Vec2>& line, const Box& box, Role role, bool dashed, bool closed) {
    auto pieces = clip_to_box(line, box);
    const bool whole = pieces.size() == 1 && pieces[0].size() == line.size();
    for (auto& p : pieces) scene.elements.push_back(PolylineEl{std::move(p), role, dashed, closed && whole});
}

}  // namespace

Scene plane_portrait(const PlanarMap& map, const std::vector<CenterRecord>& centers,
                     const std::vector<AnnulusReport>& reports, const std::vector<double>& levels, const Box& box,
                     const PortraitOptions& opt) {
    if (!std::is_sorted(levels.begin(), levels.end())) throw std::invalid_argument("plane_portrait: levels must be sorted");
    Scene scene;
    scene.viewport = box;
    scene.title = "Level sets of H_f for " + map.name();

    const GridSpec grid{box, opt.contour_grid, opt.contour_grid};
    const std::vector<double> values = hamiltonian_grid(map, grid, opt.exec);
    const double cell = std::hypot(grid.dx(), grid.dy());

    TraceOptions topt;
    topt.box = box;
    std::size_t drawn = 0;
    for (double h : levels) {
        PointHash traced(grid.dx());
        for (const auto& c : centers) {
            if (!box.contains(c.location)) continue;
            OrbitTrace tr;
            const WindingCertificate w = winding_certificate(map, c, h, topt, 0, &tr);
            if (w.level_unreachable || tr.points.size() < 2) continue;
            std::vector<Vec2> line;
            line.reserve(tr.points.size());
            for (const auto& p : tr.points) line.push_back(p.p);
            traced.add_polyline(line);
            const std::size_t before = scene.elements.size();
            add_clipped(scene, line, box, Role::level, false, w.closed);
            drawn += scene.elements.size() - before;
        }
        for (auto& line : contour_lines(values, grid, h)) {
            const bool covered = std::all_of(line.begin(), line.end(), [&](Vec2 p) { return traced.near(p, 2 * cell); });
            if (covered) continue;
            const std::size_t before = scene.elements.size();
            add_clipped(scene, line, box, Role::level, false, false);
            drawn += scene.elements.size() - before;
        }
    }
    for (const auto& r : reports) {
        if (!r.hi_is_budget) add_clipped(scene, r.boundary_polyline, box, Role::boundary, true, false);
    }
    for (const auto& c : centers) {
        if (box.contains(c.location)) scene.elements.push_back(MarkerEl{c.location, Role::center, 0.008 * box.diameter(), true});
    }
    if (drawn == 0) scene.warnings.push_back("no requested level intersects the box");
    return scene;
}

Vec2 disc_project(Vec2 z) { return (1.0 / (1.0 + norm(z))) * z; }

Scene disc_portrait(const CompactifiedField& cf, const std::vector<InfinitySingularity>& singularities) {
    Scene scene;
    scene.disc = true;
    scene.viewport = {-1.1, 1.1, -1.1, 1.1};
    scene.title = "Poincare disc portrait, degree " + std::to_string(cf.degree);
    scene.elements.push_back(CircleEl{{0, 0}, 1.0, Role::equator, false});

    auto field = [&](Vec2 z) -> Vec2 {
        const Vec2 f{cf.p.eval(z), cf.q.eval(z)};
        const double n = norm(f);
        if (!(n > 0.0) || !std::isfinite(n)) return {0.0, 0.0};
        return ((1.0 + norm(z)) / n) * f;
    };
    constexpr double pi = std::numbers::pi;
    for (double rho : {0.3, 0.8, 1.5, 3.0}) {
        for (int a = 0; a < 8; ++a) {
            const double phi = 2 * pi * (a + 0.25) / 8;
            const Vec2 seed = rho * Vec2{std::cos(phi), std::sin(phi)};
            const Vec2 seed_d = disc_project(seed);
            std::vector<Vec2> back, fwd;
            bool closed = false;
            for (double dir : {1.0, -1.0}) {
                if (closed) break;
                std::vector<Vec2>& out = dir < 0 ? back : fwd;
                Vec2 z = seed;
                const double ds = 0.01 * dir;
                double travelled = 0.0;
                for (int k = 0; k < 3000; ++k) {
                    // Near the equator the steps shrink to nothing on screen; keep visible moves only.
                    const Vec2 d = disc_project(z);
                    if (out.empty() || norm(d - out.back()) >= 0.004) {
                        if (!out.empty()) travelled += norm(d - out.back());
                        out.push_back(d);
                    }
                    if (travelled > 0.05 && norm(d - seed_d) < 0.006) {
                        closed = true;
                        break;
                    }
                    if (norm(z) > 1e6) break;
                    const Vec2 k1 = field(z);
                    if (norm(k1) == 0.0) break;
                    const Vec2 k2 = field(z + 0.5 * ds * k1);
                    const Vec2 k3 = field(z + 0.5 * ds * k2);
                    const Vec2 k4 = field(z + ds * k3);
                    const Vec2 zn = z + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                    if (!std::isfinite(zn.x) || !std::isfinite(zn.y)) break;
                    z = zn;
                }
            }
            if (closed) {
                fwd.pop_back();
                scene.elements.push_back(PolylineEl{std::move(fwd), Role::trajectory, false, true});
                continue;
            }
            std::reverse(back.begin(), back.end());
            back.insert(back.end(), fwd.begin() + 1, fwd.end());
            scene.elements.push_back(PolylineEl{std::move(back), Role::trajectory, false, false});
        }
    }
    for (const auto& s : singularities) {
        const char* glyph = s.classification == SectorClass::two_degenerate_hyperbolic ? "D"
                            : s.classification == SectorClass::has_nondegenerate_sector ? "N"
                                                                                        : "?";
        const bool filled = s.classification == SectorClass::has_nondegenerate_sector;
        for (double t : {s.theta, s.theta + pi}) {
            const Vec2 p{std::cos(t), std::sin(t)};
            scene.elements.push_back(MarkerEl{p, Role::singular, 0.025, filled});
            scene.elements.push_back(TextEl{0.93 * p + Vec2{0.03, 0.03}, glyph, Role::label});
        }
    }
    return scene;
}

DiscRequest disc_portrait_for(const PlanarMap& map) {
    DiscRequest out;
    const auto h = effective_hamiltonian_poly(map);
    if (!h) {
        out.refusal = "H_f is not polynomial; the Poincare compactification needs a polynomial field";
        return out;
    }
    const CompactifiedField cf = build_compactification(*h);
    InfinityScan scan = infinite_singularities(cf);
    for (auto& p : scan.points) classify_sectors(cf, p);
    out.scene = disc_portrait(cf, scan.points);
    return out;
}

}  // namespace hamcenter
