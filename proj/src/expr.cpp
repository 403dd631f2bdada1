#include "hamcenter/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <variant>

#include "hamcenter/numfmt.hpp"

namespace hamcenter {

ParseError::ParseError(const std::string& msg, std::size_t position)
    : std::runtime_error(msg + " at position " + std::to_string(position)), position_(position) {}

DomainError::DomainError(const std::string& msg, std::string subexpression)
    : std::runtime_error(msg + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}

Jet1 operator+(const Jet1& a, const Jet1& b) { return {a.value + b.value, a.dx + b.dx, a.dy + b.dy}; }
Jet1 operator-(const Jet1& a, const Jet1& b) { return {a.value - b.value, a.dx - b.dx, a.dy - b.dy}; }
Jet1 operator*(const Jet1& a, const Jet1& b) {
    return {a.value * b.value, a.dx * b.value + a.value * b.dx, a.dy * b.value + a.value * b.dy};
}
Jet1 operator*(double s, const Jet1& a) { return {s * a.value, s * a.dx, s * a.dy}; }

// ---------------------------------------------------------------------------
// Tree

struct Expr::Node {
    Kind kind;
    double value = 0.0;
    Var var = Var::x;
    UnaryOp uop = UnaryOp::neg;
    BinaryOp bop = BinaryOp::add;
    std::optional<Expr> a;
    std::optional<Expr> b;
};

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::variable(Var v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    n->var = v;
    return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr child) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::unary;
    n->uop = op;
    n->a = std::move(child);
    return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr left, Expr right) {
    if (op == BinaryOp::powi) {
        if (right.kind() != Kind::constant) throw std::invalid_argument("powi exponent must be a literal");
        const double e = right.constant_value();
        if (!(e >= 0.0) || e != std::floor(e) || e > 1e6) {
            throw std::invalid_argument("powi exponent must be a non-negative integer");
        }
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::binary;
    n->bop = op;
    n->a = std::move(left);
    n->b = std::move(right);
    return Expr(std::move(n));
}

Expr Expr::powi(Expr base, int exponent) {
    return binary(BinaryOp::powi, std::move(base), constant(static_cast<double>(exponent)));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
Var Expr::variable_id() const { return node_->var; }
UnaryOp Expr::unary_op() const { return node_->uop; }
BinaryOp Expr::binary_op() const { return node_->bop; }
const Expr& Expr::child() const { return *node_->a; }
const Expr& Expr::left() const { return *node_->a; }
const Expr& Expr::right() const { return *node_->b; }
int Expr::exponent() const { return static_cast<int>(node_->b->constant_value()); }

bool Expr::operator==(const Expr& other) const {
    if (node_ == other.node_) return true;
    const Node& p = *node_;
    const Node& q = *other.node_;
    if (p.kind != q.kind) return false;
    switch (p.kind) {
        case Kind::constant: return p.value == q.value;
        case Kind::variable: return p.var == q.var;
        case Kind::unary: return p.uop == q.uop && *p.a == *q.a;
        case Kind::binary: return p.bop == q.bop && *p.a == *q.a && *p.b == *q.b;
    }
    return false;
}

double Expr::eval(Vec2 p) const { return CompiledExpr(*this).eval(p); }
Jet1 Expr::eval_jet(Vec2 p) const { return CompiledExpr(*this).eval_jet(p); }
Jet1 eval_jet(const Expr& e, Vec2 p) { return e.eval_jet(p); }

std::string Expr::to_string() const { return print_expr(*this); }

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::div, a, b); }

// ---------------------------------------------------------------------------
// Printer

namespace {

enum Level { kSum = 1, kTerm = 2, kFactor = 3, kAtom = 4 };

const char* func_name(UnaryOp op) {
    switch (op) {
        case UnaryOp::exp: return "exp";
        case UnaryOp::sin: return "sin";
        case UnaryOp::cos: return "cos";
        case UnaryOp::sqrt: return "sqrt";
        case UnaryOp::neg: return "-";
    }
    return "?";
}

// Precedence level the printed form of `e` occupies.
Level level_of(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::constant: return e.constant_value() < 0 || std::signbit(e.constant_value()) ? kFactor : kAtom;
        case Expr::Kind::variable: return kAtom;
        case Expr::Kind::unary: return e.unary_op() == UnaryOp::neg ? kFactor : kAtom;
        case Expr::Kind::binary:
            switch (e.binary_op()) {
                case BinaryOp::add:
                case BinaryOp::sub: return kSum;
                case BinaryOp::mul:
                case BinaryOp::div: return kTerm;
                case BinaryOp::powi: return kFactor;
            }
    }
    return kAtom;
}

void print_into(const Expr& e, std::string& out);

void print_at(const Expr& e, Level needed, std::string& out) {
    if (level_of(e) < needed) {
        out += '(';
        print_into(e, out);
        out += ')';
    } else {
        print_into(e, out);
    }
}

void print_into(const Expr& e, std::string& out) {
    switch (e.kind()) {
        case Expr::Kind::constant: {
            const double v = e.constant_value();
            if (std::signbit(v)) {
                out += '-';
                out += format_number(-v);
            } else {
                out += format_number(v);
            }
            return;
        }
        case Expr::Kind::variable: out += e.variable_id() == Var::x ? 'x' : 'y'; return;
        case Expr::Kind::unary: {
            if (e.unary_op() == UnaryOp::neg) {
                out += '-';
                const Expr& c = e.child();
                // The operand of a prefix minus must read back as `atom` or `atom^n`;
                // a bare non-negative number would fold into a negative constant.
                const bool plain = (level_of(c) == kAtom && c.kind() != Expr::Kind::constant) ||
                                   (c.kind() == Expr::Kind::binary && c.binary_op() == BinaryOp::powi);
                if (plain) {
                    print_into(c, out);
                } else {
                    out += '(';
                    print_into(c, out);
                    out += ')';
                }
                return;
            }
            out += func_name(e.unary_op());
            out += '(';
            print_into(e.child(), out);
            out += ')';
            return;
        }
        case Expr::Kind::binary: {
            switch (e.binary_op()) {
                case BinaryOp::add:
                case BinaryOp::sub:
                    print_at(e.left(), kSum, out);
                    out += e.binary_op() == BinaryOp::add ? " + " : " - ";
                    print_at(e.right(), kTerm, out);
                    return;
                case BinaryOp::mul:
                case BinaryOp::div:
                    print_at(e.left(), kTerm, out);
                    out += e.binary_op() == BinaryOp::mul ? '*' : '/';
                    print_at(e.right(), kFactor, out);
                    return;
                case BinaryOp::powi:
                    print_at(e.left(), kAtom, out);
                    out += '^';
                    out += std::to_string(e.exponent());
                    return;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Expr parse() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
        Expr e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (accept('+')) {
                e = Expr::binary(BinaryOp::add, e, term());
            } else if (accept('-')) {
                e = Expr::binary(BinaryOp::sub, e, term());
            } else {
                return e;
            }
        }
    }

    Expr term() {
        Expr e = factor();
        for (;;) {
            if (accept('*')) {
                e = Expr::binary(BinaryOp::mul, e, factor());
            } else if (accept('/')) {
                e = Expr::binary(BinaryOp::div, e, factor());
            } else {
                return e;
            }
        }
    }

    Expr factor() {
        const bool negate = accept('-');
        skip_ws();
        const bool number_next = pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.');
        Expr base = atom();
        if (accept('^')) {
            skip_ws();
            const std::size_t at = pos_;
            std::size_t end = pos_;
            while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
            if (end == at) throw ParseError("exponent must be a non-negative integer literal", at);
            if (end < s_.size() && (s_[end] == '.' || s_[end] == 'e' || s_[end] == 'E')) {
                throw ParseError("non-integer exponent", at);
            }
            int n = 0;
            auto res = std::from_chars(s_.data() + at, s_.data() + end, n);
            if (res.ec != std::errc() || n > 1000000) throw ParseError("exponent out of range", at);
            pos_ = end;
            base = Expr::powi(base, n);
            if (peek() == '^') throw ParseError("chained exponent needs parentheses", pos_);
        } else if (negate && number_next && base.kind() == Expr::Kind::constant) {
            return Expr::constant(-base.constant_value());
        }
        return negate ? Expr::unary(UnaryOp::neg, base) : base;
    }

    Expr atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t at = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string_view id = s_.substr(at, pos_ - at);
            if (id == "x") return Expr::variable(Var::x);
            if (id == "y") return Expr::variable(Var::y);
            UnaryOp op;
            if (id == "exp") {
                op = UnaryOp::exp;
            } else if (id == "sin") {
                op = UnaryOp::sin;
            } else if (id == "cos") {
                op = UnaryOp::cos;
            } else if (id == "sqrt") {
                op = UnaryOp::sqrt;
            } else {
                throw ParseError("unknown identifier '" + std::string(id) + "'", at);
            }
            expect('(');
            Expr arg = expr();
            expect(')');
            return Expr::unary(op, arg);
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr number() {
        const std::size_t at = pos_;
        std::size_t end = pos_;
        while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
        if (end < s_.size() && s_[end] == '.') {
            ++end;
            while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
        }
        if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
            std::size_t k = end + 1;
            if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
            if (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) {
                while (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) ++k;
                end = k;
            }
        }
        double v = 0.0;
        auto res = std::from_chars(s_.data() + at, s_.data() + end, v);
        if (res.ec != std::errc() || res.ptr != s_.data() + end) throw ParseError("malformed number", at);
        if (!std::isfinite(v)) throw ParseError("number out of range", at);
        pos_ = end;
        return Expr::constant(v);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string print_expr(const Expr& e) {
    std::string out;
    print_into(e, out);
    return out;
}

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Polynomial extraction

std::optional<Poly2> to_poly(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::constant: return Poly2::constant(e.constant_value());
        case Expr::Kind::variable: return e.variable_id() == Var::x ? Poly2::x() : Poly2::y();
        case Expr::Kind::unary: {
            if (e.unary_op() != UnaryOp::neg) return std::nullopt;
            auto c = to_poly(e.child());
            if (!c) return std::nullopt;
            return -*c;
        }
        case Expr::Kind::binary: {
            if (e.binary_op() == BinaryOp::div) return std::nullopt;
            auto l = to_poly(e.left());
            if (!l) return std::nullopt;
            if (e.binary_op() == BinaryOp::powi) return l->pow(e.exponent());
            auto r = to_poly(e.right());
            if (!r) return std::nullopt;
            switch (e.binary_op()) {
                case BinaryOp::add: return *l + *r;
                case BinaryOp::sub: return *l - *r;
                case BinaryOp::mul: return *l * *r;
                default: return std::nullopt;
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Compiled evaluation

CompiledExpr::CompiledExpr(const Expr& e) { emit(e); }

int CompiledExpr::emit(const Expr& e) {
    Instr ins{};
    switch (e.kind()) {
        case Expr::Kind::constant:
            ins.op = Instr::Op::constant;
            ins.value = e.constant_value();
            break;
        case Expr::Kind::variable: ins.op = e.variable_id() == Var::x ? Instr::Op::var_x : Instr::Op::var_y; break;
        case Expr::Kind::unary:
            ins.a = emit(e.child());
            switch (e.unary_op()) {
                case UnaryOp::neg: ins.op = Instr::Op::neg; break;
                case UnaryOp::exp: ins.op = Instr::Op::exp; break;
                case UnaryOp::sin: ins.op = Instr::Op::sin; break;
                case UnaryOp::cos: ins.op = Instr::Op::cos; break;
                case UnaryOp::sqrt: ins.op = Instr::Op::sqrt; break;
            }
            break;
        case Expr::Kind::binary:
            ins.a = emit(e.left());
            if (e.binary_op() == BinaryOp::powi) {
                ins.op = Instr::Op::powi;
                ins.value = e.exponent();
                break;
            }
            ins.b = emit(e.right());
            switch (e.binary_op()) {
                case BinaryOp::add: ins.op = Instr::Op::add; break;
                case BinaryOp::sub: ins.op = Instr::Op::sub; break;
                case BinaryOp::mul: ins.op = Instr::Op::mul; break;
                case BinaryOp::div: ins.op = Instr::Op::div; break;
                case BinaryOp::powi: break;
            }
            break;
    }
    code_.push_back(ins);
    origin_.push_back(e);
    return static_cast<int>(code_.size()) - 1;
}

void CompiledExpr::domain_error(std::size_t instr, const char* what) const {
    throw DomainError(what, print_expr(origin_[instr]));
}

namespace {

inline void check_magnitude(double v) {
    if (!(std::abs(v) <= kOverflowLimit)) throw OverflowError("intermediate value exceeds overflow limit");
}

}  // namespace

double CompiledExpr::eval(Vec2 p) const {
    thread_local std::vector<double> slot;
    slot.resize(code_.size());
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instr& in = code_[i];
        double r = 0.0;
        switch (in.op) {
            case Instr::Op::constant: r = in.value; break;
            case Instr::Op::var_x: r = p.x; break;
            case Instr::Op::var_y: r = p.y; break;
            case Instr::Op::neg: r = -slot[in.a]; break;
            case Instr::Op::exp: r = std::exp(slot[in.a]); break;
            case Instr::Op::sin: r = std::sin(slot[in.a]); break;
            case Instr::Op::cos: r = std::cos(slot[in.a]); break;
            case Instr::Op::sqrt:
                if (slot[in.a] < 0.0) domain_error(i, "sqrt of negative value");
                r = std::sqrt(slot[in.a]);
                break;
            case Instr::Op::add: r = slot[in.a] + slot[in.b]; break;
            case Instr::Op::sub: r = slot[in.a] - slot[in.b]; break;
            case Instr::Op::mul: r = slot[in.a] * slot[in.b]; break;
            case Instr::Op::div:
                if (slot[in.b] == 0.0) domain_error(i, "division by zero");
                r = slot[in.a] / slot[in.b];
                break;
            case Instr::Op::powi: r = std::pow(slot[in.a], static_cast<int>(in.value)); break;
        }
        check_magnitude(r);
        slot[i] = r;
    }
    return slot.back();
}

Jet1 CompiledExpr::eval_jet(Vec2 p) const {
    thread_local std::vector<Jet1> slot;
    slot.resize(code_.size());
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instr& in = code_[i];
        Jet1 r;
        switch (in.op) {
            case Instr::Op::constant: r = Jet1::constant(in.value); break;
            case Instr::Op::var_x: r = {p.x, 1.0, 0.0}; break;
            case Instr::Op::var_y: r = {p.y, 0.0, 1.0}; break;
            case Instr::Op::neg: r = -1.0 * slot[in.a]; break;
            case Instr::Op::exp: {
                const Jet1& a = slot[in.a];
                const double v = std::exp(a.value);
                r = {v, v * a.dx, v * a.dy};
                break;
            }
            case Instr::Op::sin: {
                const Jet1& a = slot[in.a];
                const double c = std::cos(a.value);
                r = {std::sin(a.value), c * a.dx, c * a.dy};
                break;
            }
            case Instr::Op::cos: {
                const Jet1& a = slot[in.a];
                const double s = -std::sin(a.value);
                r = {std::cos(a.value), s * a.dx, s * a.dy};
                break;
            }
            case Instr::Op::sqrt: {
                const Jet1& a = slot[in.a];
                if (a.value < 0.0) domain_error(i, "sqrt of negative value");
                if (a.value == 0.0) {
                    if (a.dx != 0.0 || a.dy != 0.0) domain_error(i, "sqrt not differentiable at zero");
                    r = {0.0, 0.0, 0.0};
                    break;
                }
                const double v = std::sqrt(a.value);
                const double k = 0.5 / v;
                r = {v, k * a.dx, k * a.dy};
                break;
            }
            case Instr::Op::add: r = slot[in.a] + slot[in.b]; break;
            case Instr::Op::sub: r = slot[in.a] - slot[in.b]; break;
            case Instr::Op::mul: r = slot[in.a] * slot[in.b]; break;
            case Instr::Op::div: {
                const Jet1& a = slot[in.a];
                const Jet1& b = slot[in.b];
                if (b.value == 0.0) domain_error(i, "division by zero");
                const double q = a.value / b.value;
                r = {q, (a.dx - q * b.dx) / b.value, (a.dy - q * b.dy) / b.value};
                break;
            }
            case Instr::Op::powi: {
                const Jet1& a = slot[in.a];
                const int n = static_cast<int>(in.value);
                if (n == 0) {
                    r = Jet1::constant(1.0);
                } else {
                    const double pm1 = std::pow(a.value, n - 1);
                    const double k = n * pm1;
                    r = {pm1 * a.value, k * a.dx, k * a.dy};
                }
                break;
            }
        }
        check_magnitude(r.value);
        check_magnitude(r.dx);
        check_magnitude(r.dy);
        slot[i] = r;
    }
    return slot.back();
}

}  // namespace hamcenter
