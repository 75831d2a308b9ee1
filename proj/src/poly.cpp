#include "singulab/poly.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace singulab {

Polynomial::Polynomial(int nvars) : n_(nvars) {
    if (nvars < 0 || nvars > kMaxSystemVars) throw Error("polynomial: bad variable count");
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
    Polynomial p(nvars);
    if (c != 0) p.terms_[Exponents(static_cast<size_t>(nvars), 0u)] = c;
    return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
    Polynomial p(nvars);
    Exponents e(static_cast<size_t>(nvars), 0u);
    e[static_cast<size_t>(i)] = 1;
    p.terms_[e] = 1;
    return p;
}

bool Polynomial::is_constant() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 &&
           terms_.begin()->first == Exponents(static_cast<size_t>(n_), 0u);
}

Rational Polynomial::constant_term() const {
    auto it = terms_.find(Exponents(static_cast<size_t>(n_), 0u));
    return it == terms_.end() ? Rational(0) : it->second;
}

unsigned Polynomial::total_degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) {
        unsigned t = 0;
        for (unsigned k : e) t += k;
        d = std::max(d, t);
    }
    return d;
}

void Polynomial::add_term(Exponents e, const Rational& c) {
    if (static_cast<int>(e.size()) != n_) throw Error("polynomial: exponent arity mismatch");
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        if (c != 0) terms_.emplace(std::move(e), c);
        return;
    }
    it->second += c;
    if (it->second == 0) terms_.erase(it);
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (n_ != o.n_) throw Error("polynomial: dimension mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (n_ != o.n_) throw Error("polynomial: dimension mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Polynomial Polynomial::operator-() const {
    Polynomial r(n_);
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
}

Polynomial operator+(Polynomial a, const Polynomial& b) { a += b; return a; }
Polynomial operator-(Polynomial a, const Polynomial& b) { a -= b; return a; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.nvars() != b.nvars()) throw Error("polynomial: dimension mismatch");
    Polynomial r(a.nvars());
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) {
            Polynomial::Exponents e(ea.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            r.add_term(std::move(e), ca * cb);
        }
    return r;
}

Polynomial operator*(const Rational& s, const Polynomial& p) {
    Polynomial r(p.nvars());
    if (s == 0) return r;
    for (const auto& [e, c] : p.terms()) r.add_term(e, s * c);
    return r;
}

Polynomial Polynomial::pow(unsigned e) const {
    Polynomial r = Polynomial::constant(n_, 1);
    Polynomial base = *this;
    while (e > 0) {
        if (e & 1u) r = r * base;
        base = base * base;
        e >>= 1u;
    }
    return r;
}

Polynomial Polynomial::derivative(int var) const {
    Polynomial r(n_);
    for (const auto& [e, c] : terms_) {
        unsigned k = e[static_cast<size_t>(var)];
        if (k == 0) continue;
        Exponents d = e;
        d[static_cast<size_t>(var)] = k - 1;
        r.add_term(std::move(d), Rational(static_cast<long>(k)) * c);
    }
    return r;
}

double Polynomial::eval(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != n_) throw Error("polynomial eval: dimension mismatch");
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c.get_d();
        for (size_t i = 0; i < e.size(); ++i)
            for (unsigned k = 0; k < e[i]; ++k) t *= point[i];
        s += t;
    }
    return s;
}

Rational Polynomial::eval_exact(const std::vector<Rational>& point) const {
    if (static_cast<int>(point.size()) != n_) throw Error("polynomial eval: dimension mismatch");
    Rational s = 0;
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (size_t i = 0; i < e.size(); ++i)
            for (unsigned k = 0; k < e[i]; ++k) t *= point[i];
        s += t;
    }
    return s;
}

std::string Polynomial::to_string(const std::vector<std::string>& vars) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        Rational a = c;
        if (first) {
            if (a < 0) { out << "-"; a = -a; }
        } else {
            out << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool has_var = false;
        for (unsigned k : e)
            if (k > 0) has_var = true;
        if (!has_var || a != 1) out << a.get_str();
        bool lead = !has_var || a != 1;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (lead) out << "*";
            out << vars[i];
            if (e[i] > 1) out << "^" << e[i];
            lead = true;
        }
    }
    return out.str();
}

std::vector<Polynomial> gradient(const Polynomial& p) {
    std::vector<Polynomial> g;
    g.reserve(static_cast<size_t>(p.nvars()));
    for (int i = 0; i < p.nvars(); ++i) g.push_back(p.derivative(i));
    return g;
}

void AffineFrame::validate(double tol) const {
    for (const auto& d : dirs) {
        if (static_cast<int>(d.size()) != ambient()) throw Error("frame: direction arity mismatch");
        double nn = 0.0;
        for (double x : d) nn += x * x;
        if (std::fabs(nn - 1.0) > tol) throw Error("frame: direction not unit");
    }
    for (size_t i = 0; i < dirs.size(); ++i)
        for (size_t j = i + 1; j < dirs.size(); ++j) {
            double dot = 0.0;
            for (size_t k = 0; k < dirs[i].size(); ++k) dot += dirs[i][k] * dirs[j][k];
            if (std::fabs(dot) > tol) throw Error("frame: directions not orthogonal");
        }
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw Error("rational_from_double: non-finite");
    mpq_class q;
    mpq_set_d(q.get_mpq_t(), x);
    return q;
}

Polynomial restrict_affine(const Polynomial& p, const AffineFrame& frame) {
    if (frame.ambient() != p.nvars()) throw Error("restrict_affine: dimension mismatch");
    const int m = frame.m();
    // x_i as a degree-1 polynomial in the slice coordinates u
    std::vector<Polynomial> xs;
    xs.reserve(static_cast<size_t>(p.nvars()));
    for (int i = 0; i < p.nvars(); ++i) {
        Polynomial xi = Polynomial::constant(m, rational_from_double(frame.base[static_cast<size_t>(i)]));
        for (int j = 0; j < m; ++j) {
            Rational dj = rational_from_double(frame.dirs[static_cast<size_t>(j)][static_cast<size_t>(i)]);
            xi += dj * Polynomial::variable(m, j);
        }
        xs.push_back(std::move(xi));
    }
    Polynomial r(m);
    for (const auto& [e, c] : p.terms()) {
        Polynomial t = Polynomial::constant(m, c);
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] > 0) t = t * xs[i].pow(e[i]);
        r += t;
    }
    return r;
}

namespace {

struct Parser {
    std::string_view text;
    size_t pos = 0;
    const std::vector<std::string>& vars;

    explicit Parser(std::string_view t, const std::vector<std::string>& v) : text(t), vars(v) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool consume(char c) {
        if (peek() == c) { ++pos; return true; }
        return false;
    }

    int n() const { return static_cast<int>(vars.size()); }

    Polynomial parse() {
        Polynomial r = expr();
        skip_ws();
        if (pos != text.size()) throw ParseError("unexpected trailing input", pos);
        return r;
    }

    Polynomial expr() {
        Polynomial r = term();
        while (true) {
            char c = peek();
            if (c == '+') { ++pos; r += term(); }
            else if (c == '-') { ++pos; r -= term(); }
            else break;
        }
        return r;
    }

    Polynomial term() {
        Polynomial r = factor();
        while (consume('*')) r = r * factor();
        return r;
    }

    Polynomial factor() {
        Polynomial b = base();
        if (consume('^')) {
            skip_ws();
            size_t at = pos;
            unsigned e = parse_uint(&at);
            pos = at;
            return b.pow(e);
        }
        return b;
    }

    unsigned parse_uint(size_t* at) {
        size_t p = *at;
        if (p >= text.size() || !std::isdigit(static_cast<unsigned char>(text[p])))
            throw ParseError("expected unsigned integer exponent", p);
        unsigned long v = 0;
        while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p]))) {
            v = v * 10 + static_cast<unsigned long>(text[p] - '0');
            if (v > 64) throw ParseError("exponent too large", *at);
            ++p;
        }
        *at = p;
        return static_cast<unsigned>(v);
    }

    Polynomial base() {
        char c = peek();
        if (c == '(') {
            size_t open = pos;
            ++pos;
            Polynomial r = expr();
            if (!consume(')')) throw ParseError("unbalanced parenthesis", open);
            return r;
        }
        if (c == '+' || c == '-' || std::isdigit(static_cast<unsigned char>(c)))
            return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return identifier();
        throw ParseError("expected operand", pos);
    }

    Polynomial identifier() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name(text.substr(start, pos - start));
        for (size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == name) return Polynomial::variable(n(), static_cast<int>(i));
        throw ParseError("unknown variable '" + name + "'", start);
    }

    // Signed integer, rational int/uint, or decimal literal.
    Polynomial number() {
        skip_ws();
        size_t start = pos;
        bool neg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            neg = text[pos] == '-';
            ++pos;
        }
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            throw ParseError("expected number", start);
        std::string digits;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            digits += text[pos++];
        Rational value;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            std::string frac;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                frac += text[pos++];
            if (frac.empty()) throw ParseError("expected digits after decimal point", pos);
            mpz_class num(digits + frac);
            mpz_class den = 1;
            for (size_t i = 0; i < frac.size(); ++i) den *= 10;
            value = Rational(num, den);
            value.canonicalize();
        } else if (pos < text.size() && text[pos] == '/') {
            ++pos;
            size_t dstart = pos;
            std::string den;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                den += text[pos++];
            if (den.empty()) throw ParseError("expected denominator", dstart);
            mpz_class d(den);
            if (d == 0) throw ParseError("zero denominator", dstart);
            value = Rational(mpz_class(digits), d);
            value.canonicalize();
        } else {
            value = Rational(mpz_class(digits));
        }
        if (neg) value = -value;
        return Polynomial::constant(n(), value);
    }
};

}  // namespace

Polynomial parse_poly(std::string_view text, const std::vector<std::string>& vars) {
    if (static_cast<int>(vars.size()) > kMaxAmbientDim)
        throw Error("parse_poly: more than 4 variables");
    Parser p(text, vars);
    return p.parse();
}

CompiledPoly::CompiledPoly(const Polynomial& p) : n(p.nvars()) {
    terms.reserve(p.terms().size());
    for (const auto& [e, c] : p.terms()) {
        Term t;
        double cd = c.get_d();
        t.coeff = widen(cd, cd);
        // make sure the interval really encloses the rational
        while (Rational(rational_from_double(t.coeff.lo)) > c) t.coeff.lo = next_down(t.coeff.lo);
        while (Rational(rational_from_double(t.coeff.hi)) < c) t.coeff.hi = next_up(t.coeff.hi);
        t.coeff_d = cd;
        t.exp.fill(0);
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] > 255) throw Error("compiled poly: exponent too large");
            t.exp[i] = static_cast<uint8_t>(e[i]);
        }
        terms.push_back(t);
    }
}

double CompiledPoly::eval(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : terms) {
        double v = t.coeff_d;
        for (int i = 0; i < n; ++i) {
            const unsigned e = t.exp[static_cast<size_t>(i)];
            for (unsigned k = 0; k < e; ++k) v *= x[static_cast<size_t>(i)];
        }
        s += v;
    }
    return s;
}

Interval CompiledPoly::eval(const Box& b) const {
    Interval s(0.0, 0.0);
    for (const auto& t : terms) {
        Interval v = t.coeff;
        for (int i = 0; i < n; ++i) {
            const unsigned e = t.exp[static_cast<size_t>(i)];
            if (e) v = v * pow_u(b.coords[static_cast<size_t>(i)], e);
        }
        s = s + v;
    }
    return s;
}

CompiledFunc::CompiledFunc(const Polynomial& p) : f(p) {
    for (int i = 0; i < p.nvars(); ++i) grad.emplace_back(p.derivative(i));
}

Interval CompiledFunc::enclose(const Box& b) const {
    Interval naive = f.eval(b);
    if (b.max_width() <= 0.25) {
        // mean-value form around the midpoint
        Box c = Box::point(b.midpoint());
        Interval centered = f.eval(c);
        for (size_t i = 0; i < grad.size(); ++i) {
            Interval di = b.coords[i] - c.coords[i];
            centered = centered + grad[i].eval(b) * di;
        }
        Interval out;
        if (intersect(naive, centered, &out)) return out;
    }
    return naive;
}

double CompiledFunc::gradient_norm_bound(const Box& b) const {
    Interval s(0.0, 0.0);
    for (const auto& g : grad) s = s + sqr(g.eval(b));
    return std::sqrt(std::max(0.0, s.hi));
}

Interval eval_interval(const Polynomial& p, const Box& box) {
    if (box.dim() != p.nvars()) throw Error("eval_interval: dimension mismatch");
    CompiledFunc cf(p);
    return cf.enclose(box);
}

}  // namespace singulab
