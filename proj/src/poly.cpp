#include "mlsos/poly.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace mlsos::poly {

Monomial Monomial::var(int n, int k, int power) {
    std::vector<int> e(n, 0);
    e.at(k) = power;
    return Monomial(std::move(e));
}

int Monomial::degree() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0);
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r = *this;
    for (size_t i = 0; i < r.exponents.size(); ++i) r.exponents[i] += o.exponents[i];
    return r;
}

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
    const int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.exponents < b.exponents;
}

Poly Poly::constant(int nvars, double c) {
    Poly p(nvars);
    p.add_term(Monomial::one(nvars), c);
    return p;
}

Poly Poly::variable(int nvars, int k) {
    Poly p(nvars);
    p.add_term(Monomial::var(nvars, k), 1.0);
    return p;
}

int Poly::degree() const {
    if (terms_.empty()) return 0;
    return terms_.rbegin()->first.degree();
}

double Poly::coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
}

void Poly::add_term(const Monomial& m, double c) {
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) it->second += c;
    if (std::abs(it->second) < kCoeffEps) terms_.erase(it);
}

Poly& Poly::operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    r += o;
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r = *this;
    r -= o;
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r(nvars_);
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
    return r;
}

Poly Poly::operator*(double s) const {
    Poly r(nvars_);
    for (const auto& [m, c] : terms_) r.add_term(m, c * s);
    return r;
}

double Poly::eval(const linalg::Vector& x) const {
    double total = 0.0;
    for (const auto& [m, c] : terms_) {
        double v = c;
        for (int i = 0; i < m.nvars(); ++i)
            for (int k = 0; k < m.exponents[i]; ++k) v *= x(i);
        total += v;
    }
    return total;
}

double Poly::max_abs_coeff() const {
    double r = 0.0;
    for (const auto& [m, c] : terms_) r = std::max(r, std::abs(c));
    return r;
}

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c;
        for (int i = 0; i < m.nvars(); ++i) {
            if (m.exponents[i] == 0) continue;
            os << "*x" << i;
            if (m.exponents[i] > 1) os << "^" << m.exponents[i];
        }
    }
    return os.str();
}

std::uint64_t basis_size(int n, int t) {
    // C(n+t, t) with saturation.
    std::uint64_t r = 1;
    for (int i = 1; i <= t; ++i) {
        const std::uint64_t num = static_cast<std::uint64_t>(n + i);
        if (r > (UINT64_MAX / num)) return UINT64_MAX;
        r = r * num / static_cast<std::uint64_t>(i);
    }
    return r;
}

namespace {
void gen_rec(int n, int pos, int remaining, std::vector<int>& cur, std::vector<Monomial>& out) {
    if (pos == n - 1) {
        cur[pos] = remaining;
        out.emplace_back(cur);
        return;
    }
    for (int e = 0; e <= remaining; ++e) {
        cur[pos] = e;
        gen_rec(n, pos + 1, remaining - e, cur, out);
    }
}
}  // namespace

std::vector<Monomial> basis(int n, int t) {
    if (n < 1 || t < 0) throw DimensionMismatch("basis: need n >= 1, t >= 0");
    const std::uint64_t count = basis_size(n, t);
    if (count > 1000000ull) throw CapExceeded("basis: size " + std::to_string(count) + " exceeds cap 10^6");

    std::vector<Monomial> out;
    out.reserve(count);
    std::vector<int> cur(n, 0);
    for (int d = 0; d <= t; ++d) gen_rec(n, 0, d, cur, out);
    return out;
}

}  // namespace mlsos::poly
