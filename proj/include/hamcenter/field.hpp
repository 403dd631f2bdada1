#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamcenter/expr.hpp"
#include "hamcenter/poly.hpp"
#include "hamcenter/vec2.hpp"

namespace hamcenter {

/// Half-width of the working window used for the unbounded domain.
inline constexpr double kPlaneHalfWidth = 20.0;
inline constexpr double kZeroTol = 1e-10;
inline constexpr double kDegenerateTol = 1e-8;

class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Too many grid points were outside the expression domain to decide.
class InconclusiveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Domain {
    enum class Kind { plane, box };
    Kind kind = Kind::plane;
    Box box{-kPlaneHalfWidth, kPlaneHalfWidth, -kPlaneHalfWidth, kPlaneHalfWidth};

    static Domain plane() { return {}; }
    static Domain make_box(Box b);
    /// The finite window numerical work happens in.
    Box working_box() const { return box; }
    bool contains(Vec2 p) const { return box.contains(p); }
    std::string to_string() const;
};

/// f and its Jacobian [[f1x, f1y], [f2x, f2y]] at a point.
struct MapJet {
    Vec2 value;
    Mat2 jacobian;
};

class PlanarMap {
public:
    PlanarMap(std::string name, Expr f1, Expr f2, Domain domain = Domain::plane(),
              std::optional<Poly2> declared_hamiltonian = std::nullopt);

    const std::string& name() const { return name_; }
    const Expr& f1() const { return f1_; }
    const Expr& f2() const { return f2_; }
    const Domain& domain() const { return domain_; }
    const std::optional<Poly2>& declared_hamiltonian() const { return declared_; }

    /// Throws DomainError or OverflowError.
    Vec2 value(Vec2 p) const;
    MapJet jet(Vec2 p) const;
    double hamiltonian(Vec2 p) const {
        const Vec2 v = value(p);
        return 0.5 * (v.x * v.x + v.y * v.y);
    }

private:
    std::string name_;
    Expr f1_;
    Expr f2_;
    Domain domain_;
    std::optional<Poly2> declared_;
    std::shared_ptr<const CompiledExpr> c1_;
    std::shared_ptr<const CompiledExpr> c2_;
};

struct FieldSample {
    Vec2 point;
    Vec2 f_value;
    Mat2 jacobian;
    double det = 0.0;
    double hamiltonian = 0.0;
    /// The Hamiltonian vector field (-H_y, H_x).
    Vec2 field;
    /// Gradient of H_f, i.e. Df^T f.
    Vec2 gradient;
};

FieldSample sample(const PlanarMap& map, Vec2 p);

struct Linearization {
    Mat2 m;
    double trace = 0.0;
    double det = 0.0;
    std::complex<double> eigenvalues[2];
};

/// Linear part of the Hamiltonian field at a zero of f, built from the first partials of f.
Linearization linearization_at(const PlanarMap& map, Vec2 z, double zero_tol = kZeroTol,
                               double degenerate_tol = kDegenerateTol);
Linearization linearization_from_jacobian(const Mat2& df);

struct HamiltonianCheck {
    bool validated = false;
    Vec2 worst_point;
    double worst_residual = 0.0;  // scaled: |P - H| / (1 + |H|)
    int evaluated = 0;
    int skipped = 0;
};

/// Compares the declared polynomial against (f1^2 + f2^2)/2 on a 50x50 grid over
/// domain ∩ [-3,3]^2. Throws PreconditionError without a declaration and
/// InconclusiveError when more than 20% of the grid is outside the expression domain.
HamiltonianCheck validate_hamiltonian(const PlanarMap& map);

/// The declared Hamiltonian if it validates, else (f1^2+f2^2)/2 when both
/// components are polynomial, else nullopt.
std::optional<Poly2> effective_hamiltonian_poly(const PlanarMap& map);

struct JacobianSignScan {
    int positive = 0;
    int negative = 0;
    int zero_or_tiny = 0;
    int skipped = 0;
    bool sign_change() const { return positive > 0 && negative > 0; }
};

/// Samples det Df on an n x n grid; a sign change violates the standing
/// non-vanishing Jacobian hypothesis and is surfaced as a warning by callers.
JacobianSignScan scan_jacobian_sign(const PlanarMap& map, const Box& box, int n);

}  // namespace hamcenter
