#include "hamcenter/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hamcenter/numfmt.hpp"

namespace hamcenter {

Poly2::Poly2(std::vector<Monomial> terms) : terms_(std::move(terms)) {
    for (const auto& m : terms_) {
        if (m.degx < 0 || m.degy < 0) throw std::invalid_argument("Poly2: negative exponent");
    }
    canonicalize();
}

Poly2 Poly2::constant(double c) { return Poly2({{c, 0, 0}}); }
Poly2 Poly2::x() { return Poly2({{1.0, 1, 0}}); }
Poly2 Poly2::y() { return Poly2({{1.0, 0, 1}}); }
Poly2 Poly2::monomial(double coef, int degx, int degy) { return Poly2({{coef, degx, degy}}); }

void Poly2::canonicalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Monomial& a, const Monomial& b) {
        return a.degx != b.degx ? a.degx < b.degx : a.degy < b.degy;
    });
    std::vector<Monomial> merged;
    merged.reserve(terms_.size());
    for (const auto& m : terms_) {
        if (!merged.empty() && merged.back().degx == m.degx && merged.back().degy == m.degy) {
            merged.back().coef += m.coef;
        } else {
            merged.push_back(m);
        }
    }
    std::erase_if(merged, [](const Monomial& m) { return m.coef == 0.0; });
    terms_ = std::move(merged);
}

int Poly2::total_degree() const {
    int d = -1;
    for (const auto& m : terms_) d = std::max(d, m.degx + m.degy);
    return d;
}

int Poly2::degree_x() const {
    int d = -1;
    for (const auto& m : terms_) d = std::max(d, m.degx);
    return d;
}

int Poly2::degree_y() const {
    int d = -1;
    for (const auto& m : terms_) d = std::max(d, m.degy);
    return d;
}

double Poly2::coefficient(int degx, int degy) const {
    for (const auto& m : terms_) {
        if (m.degx == degx && m.degy == degy) return m.coef;
    }
    return 0.0;
}

double Poly2::max_abs_coefficient() const {
    double c = 0.0;
    for (const auto& m : terms_) c = std::max(c, std::abs(m.coef));
    return c;
}

double Poly2::eval(double x, double y) const {
    if (terms_.empty()) return 0.0;
    // Powers are tabulated once per call; degrees here stay small.
    const int dx = degree_x();
    const int dy = degree_y();
    double xp[64];
    double yp[64];
    std::vector<double> xs, ys;
    double* px = xp;
    double* py = yp;
    if (dx >= 64 || dy >= 64) {
        xs.resize(dx + 1);
        ys.resize(dy + 1);
        px = xs.data();
        py = ys.data();
    }
    px[0] = 1.0;
    for (int i = 1; i <= dx; ++i) px[i] = px[i - 1] * x;
    py[0] = 1.0;
    for (int j = 1; j <= dy; ++j) py[j] = py[j - 1] * y;
    double s = 0.0;
    for (const auto& m : terms_) s += m.coef * px[m.degx] * py[m.degy];
    return s;
}

Poly2 Poly2::dx() const {
    std::vector<Monomial> out;
    for (const auto& m : terms_) {
        if (m.degx > 0) out.push_back({m.coef * m.degx, m.degx - 1, m.degy});
    }
    return Poly2(std::move(out));
}

Poly2 Poly2::dy() const {
    std::vector<Monomial> out;
    for (const auto& m : terms_) {
        if (m.degy > 0) out.push_back({m.coef * m.degy, m.degx, m.degy - 1});
    }
    return Poly2(std::move(out));
}

Poly2 Poly2::homogeneous_part(int k) const {
    std::vector<Monomial> out;
    for (const auto& m : terms_) {
        if (m.degx + m.degy == k) out.push_back(m);
    }
    return Poly2(std::move(out));
}

Poly2 Poly2::pruned(double rel) const {
    const double cut = rel * max_abs_coefficient();
    std::vector<Monomial> out;
    for (const auto& m : terms_) {
        if (std::abs(m.coef) > cut) out.push_back(m);
    }
    return Poly2(std::move(out));
}

Poly2 Poly2::pow(int n) const {
    if (n < 0) throw std::invalid_argument("Poly2::pow: negative exponent");
    Poly2 result = constant(1.0);
    Poly2 base = *this;
    while (n > 0) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

Poly2 operator+(const Poly2& a, const Poly2& b) {
    std::vector<Monomial> t = a.terms_;
    t.insert(t.end(), b.terms_.begin(), b.terms_.end());
    return Poly2(std::move(t));
}

Poly2 operator-(const Poly2& a) {
    std::vector<Monomial> t = a.terms_;
    for (auto& m : t) m.coef = -m.coef;
    return Poly2(std::move(t));
}

Poly2 operator-(const Poly2& a, const Poly2& b) { return a + (-b); }

Poly2 operator*(const Poly2& a, const Poly2& b) {
    std::vector<Monomial> t;
    t.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& m : a.terms_) {
        for (const auto& n : b.terms_) t.push_back({m.coef * n.coef, m.degx + n.degx, m.degy + n.degy});
    }
    return Poly2(std::move(t));
}

Poly2 operator*(double s, const Poly2& a) {
    std::vector<Monomial> t = a.terms_;
    for (auto& m : t) m.coef *= s;
    return Poly2(std::move(t));
}

std::string Poly2::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // Highest total degree first reads more naturally.
    std::vector<Monomial> t = terms_;
    std::stable_sort(t.begin(), t.end(), [](const Monomial& a, const Monomial& b) {
        return a.degx + a.degy > b.degx + b.degy;
    });
    for (const auto& m : t) {
        double c = m.coef;
        if (!first) {
            os << (c < 0 ? " - " : " + ");
            c = std::abs(c);
        } else if (c < 0) {
            os << "-";
            c = -c;
        }
        first = false;
        const bool bare = m.degx + m.degy > 0 && c == 1.0;
        if (!bare) os << format_number(c);
        auto put = [&](const char* v, int d) {
            if (d == 0) return;
            if (!bare || (v[0] == 'y' && m.degx > 0)) os << "*";
            os << v;
            if (d > 1) os << "^" << d;
        };
        put("x", m.degx);
        put("y", m.degy);
    }
    return os.str();
}

}  // namespace hamcenter
