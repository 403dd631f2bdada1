#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hamcenter/poly.hpp"
#include "hamcenter/vec2.hpp"

namespace hamcenter {

/// Raised by parse_expr. `position` is the 0-based byte offset of the failure.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Evaluation outside the real domain of a subexpression (sqrt of a negative,
/// division by zero). `subexpression` is the printed offending node.
class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& msg, std::string subexpression);
    const std::string& subexpression() const { return subexpression_; }

private:
    std::string subexpression_;
};

/// Some intermediate value left [-kOverflowLimit, kOverflowLimit] or became non-finite.
class OverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kOverflowLimit = 1e150;

enum class Var { x, y };
enum class UnaryOp { neg, exp, sin, cos, sqrt };
enum class BinaryOp { add, sub, mul, div, powi };

/// Value and both first partials at a point.
struct Jet1 {
    double value = 0.0;
    double dx = 0.0;
    double dy = 0.0;

    static Jet1 constant(double c) { return {c, 0.0, 0.0}; }
};

Jet1 operator+(const Jet1& a, const Jet1& b);
Jet1 operator-(const Jet1& a, const Jet1& b);
Jet1 operator*(const Jet1& a, const Jet1& b);
Jet1 operator*(double s, const Jet1& a);

/// Immutable expression tree over the variables x and y. Copies share nodes.
class Expr {
public:
    struct Node;

    static Expr constant(double value);
    static Expr variable(Var v);
    static Expr unary(UnaryOp op, Expr child);
    static Expr binary(BinaryOp op, Expr left, Expr right);
    /// `base ^ exponent` with a literal non-negative integer exponent.
    static Expr powi(Expr base, int exponent);

    enum class Kind { constant, variable, unary, binary };

    Kind kind() const;
    double constant_value() const;
    Var variable_id() const;
    UnaryOp unary_op() const;
    BinaryOp binary_op() const;
    const Expr& child() const;
    const Expr& left() const;
    const Expr& right() const;
    int exponent() const;

    bool operator==(const Expr& other) const;

    double eval(Vec2 p) const;
    Jet1 eval_jet(Vec2 p) const;

    std::string to_string() const;

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ['-'] atom ['^' INTEGER]
///   atom   := NUMBER | 'x' | 'y' | FUNC '(' expr ')' | '(' expr ')'
/// A leading '-' directly on a NUMBER with no exponent folds into a negative constant.
Expr parse_expr(std::string_view text);

std::string print_expr(const Expr& e);

Jet1 eval_jet(const Expr& e, Vec2 p);

/// Succeeds only for trees made of constants, variables, neg, add, sub, mul, powi.
std::optional<Poly2> to_poly(const Expr& e);

/// Flattened post-order program for repeated evaluation of one expression.
/// Thread-safe for concurrent const use.
class CompiledExpr {
public:
    CompiledExpr() = default;
    explicit CompiledExpr(const Expr& e);

    double eval(Vec2 p) const;
    Jet1 eval_jet(Vec2 p) const;
    std::size_t size() const { return code_.size(); }

private:
    struct Instr {
        enum class Op { constant, var_x, var_y, neg, exp, sin, cos, sqrt, add, sub, mul, div, powi };
        Op op;
        int a = -1;
        int b = -1;
        double value = 0.0;  // constant payload or powi exponent
    };

    int emit(const Expr& e);
    [[noreturn]] void domain_error(std::size_t instr, const char* what) const;

    std::vector<Instr> code_;
    std::vector<Expr> origin_;
};

}  // namespace hamcenter
