#include "hamcenter/field.hpp"

#include <algorithm>
#include <cmath>

#include "hamcenter/numfmt.hpp"

namespace hamcenter {

Domain Domain::make_box(Box b) {
    if (!b.valid()) throw std::invalid_argument("domain box is empty");
    return {Kind::box, b};
}

std::string Domain::to_string() const {
    if (kind == Kind::plane) return "plane";
    return "box(" + format_number(box.xmin) + ", " + format_number(box.xmax) + ", " + format_number(box.ymin) +
           ", " + format_number(box.ymax) + ")";
}

PlanarMap::PlanarMap(std::string name, Expr f1, Expr f2, Domain domain, std::optional<Poly2> declared_hamiltonian)
    : name_(std::move(name)),
      f1_(std::move(f1)),
      f2_(std::move(f2)),
      domain_(domain),
      declared_(std::move(declared_hamiltonian)),
      c1_(std::make_shared<CompiledExpr>(f1_)),
      c2_(std::make_shared<CompiledExpr>(f2_)) {
    if (!domain_.box.valid()) throw std::invalid_argument("domain is empty");
}

Vec2 PlanarMap::value(Vec2 p) const { return {c1_->eval(p), c2_->eval(p)}; }

MapJet PlanarMap::jet(Vec2 p) const {
    const Jet1 a = c1_->eval_jet(p);
    const Jet1 b = c2_->eval_jet(p);
    return {{a.value, b.value}, {a.dx, a.dy, b.dx, b.dy}};
}

FieldSample sample(const PlanarMap& map, Vec2 p) {
    const MapJet j = map.jet(p);
    const double f1 = j.value.x;
    const double f2 = j.value.y;
    const Mat2& d = j.jacobian;
    FieldSample s;
    s.point = p;
    s.f_value = j.value;
    s.jacobian = d;
    s.det = d.a * d.d - d.c * d.b;
    s.hamiltonian = 0.5 * (f1 * f1 + f2 * f2);
    const double hx = f1 * d.a + f2 * d.c;
    const double hy = f1 * d.b + f2 * d.d;
    s.gradient = {hx, hy};
    s.field = {-hy, hx};
    for (double v : {s.hamiltonian, hx, hy, s.det}) {
        if (!(std::abs(v) <= kOverflowLimit)) throw OverflowError("field sample exceeds overflow limit");
    }
    return s;
}

Linearization linearization_from_jacobian(const Mat2& df) {
    const double f1x = df.a, f1y = df.b, f2x = df.c, f2y = df.d;
    const double mixed = f1x * f1y + f2x * f2y;
    Linearization lin;
    lin.m = {-mixed, -(f1y * f1y + f2y * f2y), f1x * f1x + f2x * f2x, mixed};
    lin.trace = lin.m.a + lin.m.d;
    lin.det = lin.m.det();
    const double half_tr = 0.5 * lin.trace;
    const double disc = half_tr * half_tr - lin.det;
    if (disc < 0.0) {
        const double w = std::sqrt(-disc);
        lin.eigenvalues[0] = {half_tr, w};
        lin.eigenvalues[1] = {half_tr, -w};
    } else {
        const double w = std::sqrt(disc);
        lin.eigenvalues[0] = {half_tr + w, 0.0};
        lin.eigenvalues[1] = {half_tr - w, 0.0};
    }
    return lin;
}

Linearization linearization_at(const PlanarMap& map, Vec2 z, double zero_tol, double degenerate_tol) {
    const MapJet j = map.jet(z);
    if (norm(j.value) > zero_tol) throw PreconditionError("linearization requested away from a zero of f");
    if (std::abs(j.jacobian.det()) <= degenerate_tol) throw PreconditionError("degenerate Jacobian at zero of f");
    return linearization_from_jacobian(j.jacobian);
}

HamiltonianCheck validate_hamiltonian(const PlanarMap& map) {
    if (!map.declared_hamiltonian()) throw PreconditionError("no declared Hamiltonian");
    const Poly2& hp = *map.declared_hamiltonian();
    const Box& b = map.domain().box;
    const Box g{std::max(b.xmin, -3.0), std::min(b.xmax, 3.0), std::max(b.ymin, -3.0), std::min(b.ymax, 3.0)};
    if (!g.valid()) throw InconclusiveError("domain does not meet [-3,3]^2");
    constexpr int n = 50;
    HamiltonianCheck out;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const Vec2 p{g.xmin + g.width() * i / (n - 1), g.ymin + g.height() * k / (n - 1)};
            double h = 0.0;
            try {
                h = map.hamiltonian(p);
            } catch (const DomainError&) {
                ++out.skipped;
                continue;
            } catch (const OverflowError&) {
                ++out.skipped;
                continue;
            }
            ++out.evaluated;
            const double r = std::abs(hp.eval(p) - h) / (1.0 + std::abs(h));
            if (r > out.worst_residual || out.evaluated == 1) {
                out.worst_residual = r;
                out.worst_point = p;
            }
        }
    }
    if (out.skipped * 5 > n * n) throw InconclusiveError("more than 20% of validation grid outside expression domain");
    out.validated = out.worst_residual <= 1e-8;
    return out;
}

std::optional<Poly2> effective_hamiltonian_poly(const PlanarMap& map) {
    if (map.declared_hamiltonian()) {
        if (validate_hamiltonian(map).validated) return map.declared_hamiltonian();
    }
    auto p1 = to_poly(map.f1());
    auto p2 = to_poly(map.f2());
    if (!p1 || !p2) return std::nullopt;
    return 0.5 * (*p1 * *p1 + *p2 * *p2);
}

JacobianSignScan scan_jacobian_sign(const PlanarMap& map, const Box& box, int n) {
    JacobianSignScan scan;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const Vec2 p{box.xmin + box.width() * (i + 0.5) / n, box.ymin + box.height() * (k + 0.5) / n};
            try {
                const double d = map.jet(p).jacobian.det();
                if (std::abs(d) <= kDegenerateTol) {
                    ++scan.zero_or_tiny;
                } else if (d > 0) {
                    ++scan.positive;
                } else {
                    ++scan.negative;
                }
            } catch (const std::runtime_error&) {
                ++scan.skipped;
            }
        }
    }
    return scan;
}

}  // namespace hamcenter
