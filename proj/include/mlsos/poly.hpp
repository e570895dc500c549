#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mlsos/errors.hpp"
#include "mlsos/linalg.hpp"

namespace mlsos::poly {

// Exponent vector over a fixed variable count. Canonical order is graded
// lexicographic: total degree first, then lexicographic on the exponents.
struct Monomial {
    std::vector<int> exponents;

    Monomial() = default;
    explicit Monomial(std::vector<int> e) : exponents(std::move(e)) {}
    static Monomial one(int n) { return Monomial(std::vector<int>(n, 0)); }
    static Monomial var(int n, int k, int power = 1);

    int degree() const;
    int nvars() const { return static_cast<int>(exponents.size()); }
    Monomial operator*(const Monomial& o) const;
    bool operator==(const Monomial& o) const { return exponents == o.exponents; }
};

struct GradedLexLess {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

// Coefficient cleanup threshold: terms below this are dropped after arithmetic.
constexpr double kCoeffEps = 1e-15;

class Poly {
  public:
    using TermMap = std::map<Monomial, double, GradedLexLess>;

    Poly() = default;
    explicit Poly(int nvars) : nvars_(nvars) {}
    static Poly constant(int nvars, double c);
    static Poly variable(int nvars, int k);

    int nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;

    double coeff(const Monomial& m) const;
    void add_term(const Monomial& m, double c);

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(double s) const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);

    double eval(const linalg::Vector& x) const;
    double max_abs_coeff() const;
    std::string to_string() const;

  private:
    int nvars_ = 0;
    TermMap terms_;
};

// All monomials in n variables of degree <= t, ascending graded-lex.
// Length is C(n+t, t); throws CapExceeded beyond 10^6.
std::vector<Monomial> basis(int n, int t);

// C(n+t, t) without materializing the basis; saturates at overflow.
std::uint64_t basis_size(int n, int t);

}  // namespace mlsos::poly
