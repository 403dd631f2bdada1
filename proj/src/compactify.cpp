#include "hamcenter/compactify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hamcenter/ode.hpp"

namespace hamcenter {

const char* to_string(Chart c) {
    switch (c) {
        case Chart::U1: return "U1";
        case Chart::U2: return "U2";
        case Chart::V1: return "V1";
        case Chart::V2: return "V2";
    }
    return "?";
}

const char* to_string(SectorClass c) {
    switch (c) {
        case SectorClass::two_degenerate_hyperbolic: return "two-degenerate-hyperbolic";
        case SectorClass::has_nondegenerate_sector: return "has-nondegenerate-sector";
        case SectorClass::unclassified: return "unclassified";
    }
    return "unclassified";
}

const char* to_string(Tri t) {
    switch (t) {
        case Tri::yes: return "yes";
        case Tri::no: return "no";
        case Tri::unknown: return "unknown";
    }
    return "unknown";
}

namespace {

bool first_axis(Chart c) { return c == Chart::U1 || c == Chart::V1; }

// v^d · F(chart point), with u → x slot, v → y slot.
Poly2 cleared(const Poly2& f, int d, Chart c, double s) {
    Poly2 out;
    for (const Monomial& m : f.terms()) {
        const int i = m.degx, j = m.degy;
        const double sign = ((i + j) % 2 == 0) ? 1.0 : s;
        const int upow = first_axis(c) ? j : i;
        out = out + Poly2::monomial(m.coef * sign, upow, d - i - j);
    }
    return out;
}

// d/dθ of F(cos θ, sin θ) as a polynomial: -y F_x + x F_y.
Poly2 angular_derivative(const Poly2& f) { return Poly2::x() * f.dy() - Poly2::y() * f.dx(); }

}  // namespace

Vec2 ChartField::from_plane(Vec2 p) const {
    const double s = sign();
    if (first_axis(chart)) return {p.y / p.x, s / p.x};
    return {p.x / p.y, s / p.y};
}

Vec2 ChartField::to_plane(Vec2 uv) const {
    const double s = sign();
    if (first_axis(chart)) return {s / uv.y, s * uv.x / uv.y};
    return {s * uv.x / uv.y, s / uv.y};
}

double CompactifiedField::g(double theta, int derivative) const {
    Poly2 f = equator;
    for (int k = 0; k < derivative; ++k) f = angular_derivative(f);
    return f.eval({std::cos(theta), std::sin(theta)});
}

CompactifiedField build_compactification(const Poly2& hamiltonian) {
    CompactifiedField cf;
    cf.hamiltonian = hamiltonian;
    cf.p = -hamiltonian.dy();
    cf.q = hamiltonian.dx();
    if (cf.p.total_degree() < 0 || cf.q.total_degree() < 0) {
        throw PreconditionError("compactification needs both field components nonzero; H depends on one variable only");
    }
    cf.degree = std::max(cf.p.total_degree(), cf.q.total_degree());
    const int d = cf.degree;
    cf.p_top = cf.p.homogeneous_part(d);
    cf.q_top = cf.q.homogeneous_part(d);
    cf.equator = Poly2::x() * cf.q_top - Poly2::y() * cf.p_top;

    const Poly2 u = Poly2::x(), v = Poly2::y();
    for (Chart c : {Chart::U1, Chart::U2, Chart::V1, Chart::V2}) {
        ChartField& ch = cf.charts[static_cast<int>(c)];
        ch.chart = c;
        const double s = ch.sign();
        const Poly2 pt = cleared(cf.p, d, c, s);
        const Poly2 qt = cleared(cf.q, d, c, s);
        if (first_axis(c)) {
            ch.u_dot = s * (qt - u * pt);
            ch.v_dot = -s * (v * pt);
        } else {
            ch.u_dot = s * (pt - u * qt);
            ch.v_dot = -s * (v * qt);
        }
    }
    return cf;
}

ChartConsistency chart_consistency(const CompactifiedField& cf, int samples, std::uint64_t seed) {
    ChartConsistency out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> du(-2.0, 2.0), dv(0.05, 1.0);
    for (const ChartField& ch : cf.charts) {
        for (int k = 0; k < samples; ++k) {
            const Vec2 uv{du(rng), dv(rng)};
            const Vec2 p = ch.to_plane(uv);
            const Vec2 w{cf.p.eval(p), cf.q.eval(p)};
            // Pushforward of (P, Q) through the chart map.
            Vec2 push;
            const double s = ch.sign();
            if (first_axis(ch.chart)) {
                push = {(w.y * p.x - p.y * w.x) / (p.x * p.x), -s * w.x / (p.x * p.x)};
            } else {
                push = {(w.x * p.y - p.x * w.y) / (p.y * p.y), -s * w.y / (p.y * p.y)};
            }
            const Vec2 a = ch.eval(uv);
            const double na = norm(a), nb = norm(push);
            if (na == 0.0 && nb == 0.0) continue;
            const double dev = std::abs(cross(a, push)) / std::max(na * nb, 1e-300);
            out.max_direction_dev = std::max(out.max_direction_dev, dev);
            if (dot(a, push) <= 0.0) out.all_positive = false;
        }
    }
    return out;
}

std::pair<Chart, double> chart_for_direction(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    if (std::abs(c) >= std::abs(s)) return {c > 0 ? Chart::U1 : Chart::V1, s / c};
    return {s > 0 ? Chart::U2 : Chart::V2, c / s};
}

InfinityScan infinite_singularities(const CompactifiedField& cf) {
    InfinityScan out;
    const double scale = cf.equator.max_abs_coefficient();
    if (scale == 0.0) {
        out.equator_singular = true;
        return out;
    }
    const Poly2 g0 = cf.equator;
    const Poly2 g1 = angular_derivative(g0);
    auto G = [&](const Poly2& f, double t) { return f.eval({std::cos(t), std::sin(t)}) / scale; };

    constexpr int n = 2048;
    constexpr double pi = std::numbers::pi;
    auto bisect = [&](const Poly2& f, double a, double b) {
        double fa = G(f, a);
        if (fa == 0.0) return a;
        if (G(f, b) == 0.0) return b;
        for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = G(f, m);
            if (fm == 0.0) return m;
            if ((fa < 0) == (fm < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    };

    std::vector<double> roots;
    for (int k = 0; k < n; ++k) {
        const double a = pi * k / n, b = pi * (k + 1) / n;
        const double ga = G(g0, a), gb = G(g0, b);
        if (ga * gb <= 0.0) {
            double t = bisect(g0, a, b);
            // Newton polish for simple roots.
            for (int it = 0; it < 3; ++it) {
                const double d1 = G(g1, t);
                if (std::abs(d1) < 1e-6) break;
                const double tn = t - G(g0, t) / d1;
                if (tn < a - 1e-12 || tn > b + 1e-12 || std::abs(G(g0, tn)) > std::abs(G(g0, t))) break;
                t = tn;
            }
            roots.push_back(t);
        }
        const double da = G(g1, a), db = G(g1, b);
        if (da * db <= 0.0) {
            const double t = bisect(g1, a, b);
            if (std::abs(G(g0, t)) <= 1e-9) roots.push_back(t);
        }
    }
    for (double& t : roots) {
        if (t >= pi - 1e-12) t = 0.0;
        if (std::abs(t) < 1e-15) t = 0.0;
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> merged;
    for (double t : roots) {
        if (merged.empty() || t - merged.back() > 1e-8) {
            merged.push_back(t);
        } else if (std::abs(G(g0, t)) < std::abs(G(g0, merged.back()))) {
            merged.back() = t;
        }
    }
    // 0 and π - ε are the same direction
    if (merged.size() > 1 && merged.front() < 1e-8 && pi - merged.back() < 1e-8) merged.pop_back();

    for (double t : merged) {
        InfinitySingularity s;
        s.theta = t;
        s.residual = std::abs(G(g0, t));
        std::tie(s.chart, s.u) = chart_for_direction(t);
        if (std::abs(s.u) < 1e-14) s.u = 0.0;
        Poly2 f = g0;
        int m = 0;
        for (; m < 2 * (cf.degree + 1); ++m) {
            const double thresh = m == 0 ? 1e-9 : 1e-6 * std::pow(cf.degree + 1.0, m);
            if (std::abs(G(f, t)) > thresh) break;
            f = angular_derivative(f);
        }
        s.multiplicity = std::max(m, 1);
        s.multiple = s.multiplicity >= 2;
        out.points.push_back(s);
    }
    return out;
}

namespace {

enum class Fate { captured, exited, undecided, discarded };

struct Ending {
    Fate fate = Fate::undecided;
    int side = 0;
};

Ending follow(const ChartField& ch, Vec2 z0, Vec2 star, double r, double dir) {
    bool bad = false;
    auto field = [&](Vec2 z) -> Vec2 {
        const Vec2 f = ch.eval(z);
        const double n = norm(f);
        if (!std::isfinite(n)) {
            bad = true;
            return {0.0, 0.0};
        }
        if (n == 0.0) return {0.0, 0.0};
        return (dir / n) * f;
    };
    Vec2 z = z0;
    double h = r / 100.0, arc = 0.0;
    const double hmax = r / 20.0, atol = 1e-10 * r;
    for (int step = 0; step < 40000 && arc < 100.0 * r; ++step) {
        const double dist = norm(z - star);
        if (dist < 1e-6 * r) return {Fate::captured, 0};
        if (dist > 2.0 * r || z.y < 0.0) return {Fate::exited, z.x > star.x ? 1 : -1};
        const Vec2 k1 = field(z);
        if (bad) return {Fate::discarded, 0};
        if (norm(k1) == 0.0) return {Fate::captured, 0};
        h = std::min({h, hmax, 0.5 * dist});
        const Dp5Step st = dp5_step(field, z, k1, h);
        if (bad) return {Fate::discarded, 0};
        const double err = norm(st.err) / atol;
        if (err <= 1.0) {
            z = st.z;
            arc += h;
            h *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            if (h < 1e-14 * r) return {Fate::undecided, 0};
        }
    }
    return {Fate::undecided, 0};
}

}  // namespace

void classify_sectors(const CompactifiedField& cf, InfinitySingularity& s, const SectorOptions& opt) {
    if (opt.fan_n < 16) throw std::invalid_argument("classify_sectors: fan_n must be at least 16");
    if (!(opt.r > 0.0 && opt.r <= 0.1)) throw std::invalid_argument("classify_sectors: r must be in (0, 0.1]");
    const ChartField& ch = cf.chart(s.chart);
    const Vec2 star{s.u, 0.0};
    constexpr double pi = std::numbers::pi;
    const double phi0 = pi / 12.0;

    std::vector<int> fate(opt.fan_n);  // 0 captured, 1 pass-over, 2 same side, 3 undecided, 4 discarded
    auto run = [&](int k) {
        const double phi = phi0 + (pi - 2.0 * phi0) * (k + 0.5) / opt.fan_n;
        const Vec2 seed = star + opt.r * Vec2{std::cos(phi), std::sin(phi)};
        const Ending fw = follow(ch, seed, star, opt.r, 1.0);
        const Ending bw = follow(ch, seed, star, opt.r, -1.0);
        if (fw.fate == Fate::discarded || bw.fate == Fate::discarded) return 4;
        if (fw.fate == Fate::captured || bw.fate == Fate::captured) return 0;
        if (fw.fate == Fate::exited && bw.fate == Fate::exited) return fw.side != bw.side ? 1 : 2;
        return 3;
    };
    const int n = opt.fan_n;
    if (opt.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int k = 0; k < n; ++k) fate[k] = run(k);
    } else {
        for (int k = 0; k < n; ++k) fate[k] = run(k);
    }

    SectorEvidence& e = s.evidence;
    e = {};
    e.seeds = n;
    for (int f : fate) {
        switch (f) {
            case 0: ++e.captured; break;
            case 1: ++e.pass_over; break;
            case 2: ++e.same_side; break;
            case 3: ++e.undecided; break;
            default: ++e.discarded; break;
        }
    }
    const int valid = n - e.discarded;
    if (valid == 0) {
        s.classification = SectorClass::unclassified;
        s.confidence = 0.0;
        return;
    }
    // Seeds that are caught by the point, or that turn back to the side they
    // came from, witness a sector other than a degenerate hyperbolic one.
    const int nondeg = e.captured + e.same_side;
    const int majority = std::max({nondeg, e.pass_over, e.undecided});
    s.confidence = static_cast<double>(majority) / valid;
    if (nondeg > 0) {
        s.classification = SectorClass::has_nondegenerate_sector;
    } else if (e.pass_over == valid) {
        s.classification = SectorClass::two_degenerate_hyperbolic;
    } else {
        s.classification = SectorClass::unclassified;
    }
}

InfinitySingularity antipode(const CompactifiedField& cf, const InfinitySingularity& s, const SectorOptions& opt) {
    InfinitySingularity a = s;
    a.theta = s.theta + std::numbers::pi;
    switch (s.chart) {
        case Chart::U1: a.chart = Chart::V1; break;
        case Chart::V1: a.chart = Chart::U1; break;
        case Chart::U2: a.chart = Chart::V2; break;
        case Chart::V2: a.chart = Chart::U2; break;
    }
    classify_sectors(cf, a, opt);
    return a;
}

ContiVerdict conti_verdict(bool hamiltonian_polynomial, const std::vector<GlobalCheck>& annulus_route,
                           const InfinityScan& scan) {
    ContiVerdict v;
    if (!hamiltonian_polynomial) {
        v.type = "not-applicable";
        v.status = "not-applicable";
        v.notes.push_back("H_f is not polynomial");
        return v;
    }
    if (annulus_route.empty()) {
        v.type = "not-applicable";
        v.status = "not-applicable";
        v.notes.push_back("no center to classify");
        return v;
    }
    v.applicable = true;

    Tri d = Tri::yes;
    if (scan.equator_singular) {
        d = Tri::unknown;
        v.notes.push_back("equator entirely singular");
    } else {
        for (const auto& p : scan.points) {
            if (p.classification == SectorClass::has_nondegenerate_sector) {
                d = Tri::no;
                break;
            }
            if (p.classification == SectorClass::unclassified) d = Tri::unknown;
        }
    }

    Tri route = Tri::yes;
    for (const auto& g : annulus_route) {
        if (g.verdict == GlobalVerdict::not_global) {
            route = Tri::no;
            break;
        }
        if (g.verdict == GlobalVerdict::inconclusive) route = Tri::unknown;
    }
    v.criteria = {{"a", route, "annulus: injectivity certificates and image shape"},
                  {"b", route, "annulus: global-center verdict"},
                  {"c", route, "annulus: global-center verdict"},
                  {"d", d, "compactify: infinite singular points and sector fans"}};
    v.type = d == Tri::yes ? "A" : "B";
    v.routes_agree = d != Tri::unknown && route != Tri::unknown && d == route;
    v.status = v.routes_agree ? "consistent" : "inconsistent - inspect portrait";
    if (d == Tri::unknown) v.notes.push_back("criterion (d) undecided; type reported from (d) failing to hold");
    if (route == Tri::unknown) v.notes.push_back("annulus route inconclusive");
    return v;
}

}  // namespace hamcenter
