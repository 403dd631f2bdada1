#include "hamcenter/corpus.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "hamcenter/numfmt.hpp"

namespace hamcenter {

namespace {

PlanarMap with_declared(std::string name, std::string_view f1, std::string_view f2, std::string_view hamiltonian) {
    auto hp = to_poly(parse_expr(hamiltonian));
    if (!hp) throw std::logic_error("built-in Hamiltonian is not polynomial");
    return PlanarMap(std::move(name), parse_expr(f1), parse_expr(f2), Domain::plane(), std::move(hp));
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

// Pinchuk's map with its second component shifted by -200:
//   t = xy - 1, h = t(xt + 1), f = (xt + 1)^2 (t^2 + y)
//   P = f + h
//   Q = -t^2 - 6th(h + 1) - (170fh + 91h^2 + 195fh^2 + 69h^3 + 75fh^3 + 75/4 h^4)
PlanarMap pinchuk200() {
    const std::string t = "(x*y - 1)";
    const std::string h = replace_all("(T*(x*T + 1))", "T", t);
    const std::string f = replace_all("((x*T + 1)^2*(T^2 + y))", "T", t);
    std::string p = "F + H";
    std::string q =
        "-T^2 - 6*T*H*(H + 1) - (170*F*H + 91*H^2 + 195*F*H^2 + 69*H^3 + 75*F*H^3 + 18.75*H^4) - 200";
    for (std::string* s : {&p, &q}) {
        *s = replace_all(*s, "F", f);
        *s = replace_all(*s, "H", h);
        *s = replace_all(*s, "T", t);
    }
    return PlanarMap("pinchuk200", parse_expr(p), parse_expr(q));
}

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

Domain parse_domain(const std::string& text, int line) {
    const std::string d = trim(text);
    if (d == "plane") return Domain::plane();
    if (d.rfind("box(", 0) == 0 && d.back() == ')') {
        std::string inner = d.substr(4, d.size() - 5);
        std::vector<double> v;
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                const std::string tr = trim(item);
                v.push_back(std::stod(tr, &used));
                if (used != tr.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw InputError("line " + std::to_string(line) + ": bad number in domain box");
            }
        }
        if (v.size() != 4) throw InputError("line " + std::to_string(line) + ": box needs four numbers");
        const Box b{v[0], v[1], v[2], v[3]};
        if (!b.valid()) throw InputError("line " + std::to_string(line) + ": empty domain box");
        return Domain::make_box(b);
    }
    throw InputError("line " + std::to_string(line) + ": domain must be \"plane\" or \"box(xmin, xmax, ymin, ymax)\"");
}

}  // namespace

std::vector<PlanarMap> builtin_corpus(bool include_extended) {
    std::vector<PlanarMap> maps;
    maps.emplace_back("example1", parse_expr("exp(x) - 1"), parse_expr("y"));
    maps.push_back(with_declared("example2", "x/sqrt(1 + x^2)", "(x^2 + (1 + x^2)^2*y)/sqrt(1 + x^2)",
                                 "(1 + x^2)^3*y^2*0.5 + x^2*(1 + x^2)*y + x^2*0.5"));
    maps.emplace_back("example3", parse_expr("exp(x)*cos(y) - 1"), parse_expr("exp(x)*sin(y)"));
    maps.emplace_back("identity", parse_expr("x"), parse_expr("y"));
    maps.emplace_back("control_noninjective", parse_expr("x^2"), parse_expr("y"));
    if (include_extended) maps.push_back(pinchuk200());
    return maps;
}

PlanarMap builtin_map(std::string_view name, bool include_extended) {
    if (name == "pinchuk200") {
        if (!include_extended) throw InputError("builtin pinchuk200 requires --enable-extended");
        return pinchuk200();
    }
    for (auto& m : builtin_corpus(false)) {
        if (m.name() == name) return m;
    }
    throw InputError("unknown builtin map '" + std::string(name) + "'");
}

PlanarMap parse_map_spec(std::string_view text) {
    std::map<std::string, std::pair<std::string, int>> kv;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        // Strip a comment that starts outside a quoted value.
        bool quoted = false;
        std::string line;
        for (char c : raw) {
            if (c == '"') quoted = !quoted;
            if (c == '#' && !quoted) break;
            line += c;
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("line " + std::to_string(line_no) + ": expected key = \"value\"");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (val.size() < 2 || val.front() != '"' || val.back() != '"') {
            throw InputError("line " + std::to_string(line_no) + ": value must be double-quoted");
        }
        if (key != "name" && key != "f1" && key != "f2" && key != "domain" && key != "hamiltonian") {
            throw InputError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (kv.count(key)) throw InputError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        kv[key] = {val.substr(1, val.size() - 2), line_no};
    }
    for (const char* req : {"f1", "f2"}) {
        if (!kv.count(req)) throw InputError(std::string("map spec is missing '") + req + "'");
    }
    auto expr_of = [&](const std::string& key) {
        try {
            return parse_expr(kv[key].first);
        } catch (const ParseError& e) {
            throw InputError("line " + std::to_string(kv[key].second) + ": " + key + ": " + e.what());
        }
    };
    const std::string name = kv.count("name") ? kv["name"].first : "unnamed";
    const Domain domain = kv.count("domain") ? parse_domain(kv["domain"].first, kv["domain"].second) : Domain::plane();
    std::optional<Poly2> declared;
    if (kv.count("hamiltonian")) {
        declared = to_poly(expr_of("hamiltonian"));
        if (!declared) {
            throw InputError("line " + std::to_string(kv["hamiltonian"].second) + ": hamiltonian is not a polynomial");
        }
    }
    PlanarMap map(name, expr_of("f1"), expr_of("f2"), domain, declared);
    if (declared) {
        HamiltonianCheck chk;
        try {
            chk = validate_hamiltonian(map);
        } catch (const InconclusiveError& e) {
            throw InputError(std::string("hamiltonian validation inconclusive: ") + e.what());
        }
        if (!chk.validated) {
            throw InputError("declared hamiltonian does not match (f1^2 + f2^2)/2: residual " +
                             format_number(chk.worst_residual) + " at (" + format_number(chk.worst_point.x) + ", " +
                             format_number(chk.worst_point.y) + ")");
        }
    }
    return map;
}

PlanarMap load_map_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read map file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_map_spec(ss.str());
}

PlanarMap resolve_map(const std::string& source, bool include_extended) {
    constexpr std::string_view prefix = "builtin:";
    if (source.rfind(prefix, 0) == 0) return builtin_map(source.substr(prefix.size()), include_extended);
    return load_map_spec(source);
}

std::string write_map_spec(const PlanarMap& map) {
    std::ostringstream os;
    os << "name = \"" << map.name() << "\"\n";
    os << "f1 = \"" << print_expr(map.f1()) << "\"\n";
    os << "f2 = \"" << print_expr(map.f2()) << "\"\n";
    os << "domain = \"" << map.domain().to_string() << "\"\n";
    if (map.declared_hamiltonian()) os << "hamiltonian = \"" << map.declared_hamiltonian()->to_string() << "\"\n";
    return os.str();
}

}  // namespace hamcenter
