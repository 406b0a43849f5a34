// Exact decision of balancedness. epsilon is constant iff psi(alpha, t) does
// not depend on t, i.e. iff the polynomial identity
//   [(nu+1) x + y]^n == sum_d C(n,d) nu^{n-d} (x-m-n)_{n-d} (x-d+y)_d
// holds in Q[x, y]. Both sides are expanded over exact rationals and compared
// coefficientwise.
#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "fbh/core.hpp"
#include "fbh/specfn.hpp"

namespace fbh {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Polynomial in (x, y) with exact rational coefficients. Zero coefficients
/// are never stored.
class RationalPolynomial {
public:
    using Exponents = std::pair<unsigned, unsigned>; // (deg_x, deg_y)
    using Terms = std::map<Exponents, Rational>;

    RationalPolynomial() = default;

    static RationalPolynomial constant(const Rational& c)
    {
        RationalPolynomial p;
        p.add_term({0, 0}, c);
        return p;
    }
    static RationalPolynomial monomial(const Rational& c, unsigned dx, unsigned dy)
    {
        RationalPolynomial p;
        p.add_term({dx, dy}, c);
        return p;
    }
    static RationalPolynomial x() { return monomial(1, 1, 0); }
    static RationalPolynomial y() { return monomial(1, 0, 1); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Rational coefficient(unsigned dx, unsigned dy) const
    {
        auto it = terms_.find({dx, dy});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    unsigned degree_y() const
    {
        unsigned d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e.second);
        return d;
    }

    RationalPolynomial& operator+=(const RationalPolynomial& o)
    {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    RationalPolynomial& operator-=(const RationalPolynomial& o)
    {
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    RationalPolynomial& operator*=(const Rational& s)
    {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend RationalPolynomial operator+(RationalPolynomial a, const RationalPolynomial& b) { return a += b; }
    friend RationalPolynomial operator-(RationalPolynomial a, const RationalPolynomial& b) { return a -= b; }
    friend RationalPolynomial operator*(RationalPolynomial a, const Rational& s) { return a *= s; }
    friend RationalPolynomial operator*(const Rational& s, RationalPolynomial a) { return a *= s; }

    friend RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b)
    {
        RationalPolynomial r;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_)
                r.add_term({ea.first + eb.first, ea.second + eb.second}, ca * cb);
        return r;
    }

    RationalPolynomial pow(unsigned k) const
    {
        RationalPolynomial r = constant(1);
        for (unsigned i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    bool operator==(const RationalPolynomial& o) const { return terms_ == o.terms_; }

    /// Replaces y by the given polynomial; the replacement may itself contain x and y.
    RationalPolynomial substitute_y(const RationalPolynomial& replacement) const
    {
        RationalPolynomial r;
        std::map<unsigned, RationalPolynomial> powers;
        for (const auto& [e, c] : terms_) {
            auto it = powers.find(e.second);
            if (it == powers.end()) it = powers.emplace(e.second, replacement.pow(e.second)).first;
            r += monomial(c, e.first, 0) * it->second;
        }
        return r;
    }

    std::string to_string() const
    {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!first) os << " + ";
            first = false;
            os << "(" << it->second << ")";
            if (it->first.first) os << "*x^" << it->first.first;
            if (it->first.second) os << "*y^" << it->first.second;
        }
        return os.str();
    }

private:
    void add_term(const Exponents& e, const Rational& c)
    {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Terms terms_;
};

/// (P)_k = P (P+1) ... (P+k-1) for a polynomial P.
inline RationalPolynomial rising_factorial(const RationalPolynomial& p, unsigned k)
{
    RationalPolynomial r = RationalPolynomial::constant(1);
    for (unsigned i = 0; i < k; ++i) r = r * (p + RationalPolynomial::constant(i));
    return r;
}

inline Rational rational_power(const Rational& base, unsigned k)
{
    Rational r = 1;
    for (unsigned i = 0; i < k; ++i) r *= base;
    return r;
}

/// [(nu + 1) x + y]^n.
inline RationalPolynomial expand_lhs(unsigned n, const Rational& nu)
{
    using P = RationalPolynomial;
    return (P::x() * Rational(nu + 1) + P::y()).pow(n);
}

/// sum_{d=0}^n C(n,d) nu^{n-d} (x - m - n)_{n-d} (x - d + y)_d.
inline RationalPolynomial expand_rhs(unsigned n, unsigned m, const Rational& nu)
{
    using P = RationalPolynomial;
    P total;
    for (unsigned d = 0; d <= n; ++d) {
        const Rational coeff = Rational(specfn::binomial(n, d)) * rational_power(nu, n - d);
        if (coeff == 0) continue;
        const P shifted_x = P::x() - P::constant(Rational(m + n));
        const P shifted_xy = P::x() + P::y() - P::constant(Rational(d));
        total += coeff * (rising_factorial(shifted_x, n - d) * rising_factorial(shifted_xy, d));
    }
    return total;
}

/// True iff both sides agree coefficient by coefficient.
inline bool identity_holds(unsigned n, unsigned m, const Rational& nu)
{
    return expand_lhs(n, nu) == expand_rhs(n, m, nu);
}

/// The balanced value of nu for (n, m), if any.
///
/// Putting x + y = 1 forces (x + 1/nu)^n = prod_{j=1}^n (x - m - j), and
/// nu = 0 is impossible, so the only candidates are nu = -1/(m + j). Each
/// candidate is tested against the full identity.
inline std::optional<Rational> solve_balanced_nu(unsigned n, unsigned m)
{
    for (unsigned j = 1; j <= n; ++j) {
        const Rational candidate = Rational(-1) / Rational(m + j);
        if (identity_holds(n, m, candidate)) return candidate;
    }
    return std::nullopt;
}

/// Best rational approximation of v with denominator <= max_den
/// (continued-fraction convergents and semiconvergents).
inline Rational limit_denominator(const Rational& v, const BigInt& max_den)
{
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    if (denominator(v) <= max_den) return v;
    BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    BigInt n = numerator(v), d = denominator(v);
    while (true) {
        BigInt a = n / d;
        if (n < 0 && a * d != n) a -= 1; // floor division
        const BigInt q2 = q0 + a * q1;
        if (q2 > max_den) break;
        const BigInt p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const BigInt rem = n - a * d;
        n = d;
        d = rem;
        if (d == 0) break;
    }
    const BigInt k = (max_den - q0) / q1;
    const Rational bound1(p0 + k * p1, q0 + k * q1);
    const Rational bound2(p1, q1);
    const Rational e1 = abs(bound1 - v);
    const Rational e2 = abs(bound2 - v);
    return e2 <= e1 ? bound2 : bound1;
}

/// Snaps a floating nu to the nearest rational with denominator <= 10^6 when
/// within 1e-12 of it.
inline std::optional<Rational> snap_rational(double value, long max_den = 1000000, double tol = 1e-12)
{
    if (!std::isfinite(value)) return std::nullopt;
    const Rational exact(value);
    const Rational best = limit_denominator(exact, BigInt(max_den));
    if (std::abs(value - best.convert_to<double>()) <= tol) return best;
    return std::nullopt;
}

/// The three conditions of the balancedness criterion and the verdict.
struct BalanceVerdict {
    bool alpha_condition = false;       // alpha > m + n
    bool n_condition = false;           // n == 1
    bool nu_condition = false;          // nu == -1/(m+1) exactly (after snapping)
    bool identity = false;              // polynomial identity holds for (n, m, nu)
    std::optional<Rational> nu_exact;   // snapped nu, when representable
    bool balanced() const { return alpha_condition && identity; }
};

inline BalanceVerdict balance_verdict(unsigned n, unsigned m, const std::optional<Rational>& nu,
                                      double alpha)
{
    BalanceVerdict v;
    v.alpha_condition = alpha > static_cast<double>(n + m);
    v.n_condition = n == 1;
    v.nu_exact = nu;
    if (nu) {
        v.nu_condition = *nu == Rational(-1) / Rational(m + 1);
        v.identity = identity_holds(n, m, *nu);
    }
    return v;
}

/// Balancedness of alpha g(mu; nu) with nu given exactly.
inline bool is_balanced(unsigned n, unsigned m, const Rational& nu, double alpha)
{
    return balance_verdict(n, m, nu, alpha).balanced();
}

/// Balancedness with floating nu, snapped to a rational first; an unsnappable
/// nu is treated as not balanced.
inline bool is_balanced(const DomainParams& params, double alpha)
{
    return balance_verdict(params.n(), params.m(), snap_rational(params.nu()), alpha).balanced();
}

} // namespace fbh
