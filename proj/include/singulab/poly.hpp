#pragma once

#include <gmpxx.h>

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "singulab/interval.hpp"

namespace singulab {

using Rational = mpq_class;

// Ambient dimension supported for germs and parsed polynomials.
inline constexpr int kMaxAmbientDim = 4;
// Internal systems (Lagrange multipliers adjoined) may use more variables.
inline constexpr int kMaxSystemVars = 12;

class ParseError : public Error {
public:
    ParseError(const std::string& msg, size_t pos)
        : Error(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
    size_t position;
};

// Multivariate polynomial with exact rational coefficients.
// Terms map exponent vectors (length = nvars) to nonzero coefficients.
class Polynomial {
public:
    using Exponents = std::vector<unsigned>;
    using TermMap = std::map<Exponents, Rational>;

    Polynomial() = default;
    explicit Polynomial(int nvars);

    static Polynomial constant(int nvars, const Rational& c);
    static Polynomial variable(int nvars, int i);

    int nvars() const { return n_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_term() const;
    unsigned total_degree() const;

    void add_term(Exponents e, const Rational& c);

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial operator-() const;
    Polynomial pow(unsigned e) const;

    Polynomial derivative(int var) const;

    double eval(std::span<const double> point) const;
    Rational eval_exact(const std::vector<Rational>& point) const;

    bool operator==(const Polynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }

    std::string to_string(const std::vector<std::string>& vars) const;

private:
    int n_ = 0;
    TermMap terms_;
};

Polynomial operator+(Polynomial a, const Polynomial& b);
Polynomial operator-(Polynomial a, const Polynomial& b);
Polynomial operator*(const Polynomial& a, const Polynomial& b);
Polynomial operator*(const Rational& s, const Polynomial& p);

std::vector<Polynomial> gradient(const Polynomial& p);

// Orthonormal affine frame u -> base + sum u_j dirs[j].
struct AffineFrame {
    std::vector<double> base;
    std::vector<std::vector<double>> dirs;

    int ambient() const { return static_cast<int>(base.size()); }
    int m() const { return static_cast<int>(dirs.size()); }
    void validate(double tol = 1e-12) const;
    std::vector<double> map(std::span<const double> u) const;
};

// Exact substitution x = base + sum u_j dirs[j]; result lives in m variables.
Polynomial restrict_affine(const Polynomial& p, const AffineFrame& frame);

// Grammar:
//   expr     := term (('+'|'-') term)*
//   term     := factor ('*' factor)*
//   factor   := base ('^' uint)?
//   base     := var | rational | '(' expr ')'
//   rational := int ('/' uint)? | decimal
// Whitespace insignificant; variables matched case-sensitively.
Polynomial parse_poly(std::string_view text, const std::vector<std::string>& vars);

// Compiled form for fast repeated evaluation. Coefficients are stored as
// intervals enclosing the exact rationals, so interval evaluation encloses
// the range of the exact polynomial.
struct CompiledPoly {
    struct Term {
        Interval coeff;
        double coeff_d;
        std::array<uint8_t, kMaxSystemVars> exp;
    };
    int n = 0;
    std::vector<Term> terms;

    CompiledPoly() = default;
    explicit CompiledPoly(const Polynomial& p);

    double eval(std::span<const double> x) const;
    Interval eval(const Box& b) const;
};

// Polynomial with precompiled gradient; supports mean-value (centered) forms.
struct CompiledFunc {
    CompiledPoly f;
    std::vector<CompiledPoly> grad;

    CompiledFunc() = default;
    explicit CompiledFunc(const Polynomial& p);

    // Range enclosure: naive extension, intersected with the centered form
    // on small boxes.
    Interval enclose(const Box& b) const;
    // Upper bound for |grad| over the box.
    double gradient_norm_bound(const Box& b) const;
};

// Sound range enclosure of p over box (public oracle-facing entry point).
Interval eval_interval(const Polynomial& p, const Box& box);

Rational rational_from_double(double x);

}  // namespace singulab
