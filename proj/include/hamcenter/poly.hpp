#pragma once

#include <string>
#include <vector>

#include "hamcenter/vec2.hpp"

namespace hamcenter {

struct Monomial {
    double coef = 0.0;
    int degx = 0;
    int degy = 0;
    bool operator==(const Monomial&) const = default;
};

/// Bivariate polynomial in canonical form: monomials sorted by (degx, degy),
/// no repeated exponent pairs, no zero coefficients. The same class is reused
/// for chart polynomials in (u, v), where x plays u and y plays v.
class Poly2 {
public:
    Poly2() = default;
    explicit Poly2(std::vector<Monomial> terms);

    static Poly2 constant(double c);
    static Poly2 x();
    static Poly2 y();
    static Poly2 monomial(double coef, int degx, int degy);

    const std::vector<Monomial>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int total_degree() const;  // -1 for the zero polynomial
    int degree_x() const;
    int degree_y() const;
    double coefficient(int degx, int degy) const;
    double max_abs_coefficient() const;

    double eval(double x, double y) const;
    double eval(Vec2 p) const { return eval(p.x, p.y); }

    Poly2 dx() const;
    Poly2 dy() const;
    /// Sum of the monomials of total degree exactly k.
    Poly2 homogeneous_part(int k) const;
    /// Drops coefficients with |c| <= rel * max|c|.
    Poly2 pruned(double rel) const;
    Poly2 pow(int n) const;

    bool operator==(const Poly2&) const = default;

    std::string to_string() const;

    friend Poly2 operator+(const Poly2& a, const Poly2& b);
    friend Poly2 operator-(const Poly2& a, const Poly2& b);
    friend Poly2 operator-(const Poly2& a);
    friend Poly2 operator*(const Poly2& a, const Poly2& b);
    friend Poly2 operator*(double s, const Poly2& a);

private:
    void canonicalize();
    std::vector<Monomial> terms_;
};

}  // namespace hamcenter
