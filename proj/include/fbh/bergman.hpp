// Weighted Bergman space H_alpha on (D_{n,m}(mu), g(mu; nu)): monomial norms,
// the diagonal of the reproducing kernel and Rawnsley's epsilon function.
//
// Every sum over q in N^m is collapsed by total degree t = |q| using
//   sum_{|q| = t} prod_i x_i^{q_i} / q_i! = |x|^t / t!,
// so the kernel series becomes
//   sum_t psi(alpha, t) (alpha)_t / t! * |w~|^{2t}.
#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbh/core.hpp"
#include "fbh/specfn.hpp"

namespace fbh {

/// Largest |w~|^2 at which kernel_diag() and epsilon() certify their truncation.
inline constexpr double kCertifiedRegion = 0.95;

/// Raised when alpha <= m + n: H_alpha is {0} and every monomial norm diverges.
class TrivialSpaceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a series reaches max_degree before its tail is certified.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The weight exponent alpha > 0 of exp(-alpha Phi).
class Weight {
public:
    explicit Weight(double alpha) : alpha_(alpha)
    {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw std::invalid_argument("Weight: alpha must be positive");
    }
    double alpha() const { return alpha_; }

private:
    double alpha_;
};

/// Exponent vector of z^p or w^q.
struct MultiIndex {
    std::vector<unsigned> exponents;

    MultiIndex() = default;
    MultiIndex(std::initializer_list<unsigned> e) : exponents(e) {}
    explicit MultiIndex(std::vector<unsigned> e) : exponents(std::move(e)) {}
    static MultiIndex zeros(int size) { return MultiIndex(std::vector<unsigned>(size, 0u)); }

    std::size_t size() const { return exponents.size(); }
    unsigned degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0u); }
};

/// Controls the degree series of kernel_diag(), epsilon() and dangelo_sum().
/// tail_tol is relative to the running sum.
struct TruncationPolicy {
    int max_degree = 2000;
    double tail_tol = 1e-10;

    void validate() const
    {
        if (max_degree < 1) throw std::invalid_argument("TruncationPolicy: max_degree must be >= 1");
        if (!(tail_tol > 0.0)) throw std::invalid_argument("TruncationPolicy: tail_tol must be > 0");
    }
};

/// Truncated series value with its certificate.
struct SeriesResult {
    double value = 0.0;
    int degree = 0;          // highest degree included
    double tail_bound = 0.0; // bound on the omitted tail, same units as value
};

/// H_alpha != {0} iff alpha > m + n.
inline bool is_nontrivial(const DomainParams& params, const Weight& weight)
{
    return weight.alpha() > static_cast<double>(params.n() + params.m());
}

namespace detail {

inline void require_nontrivial(const DomainParams& params, const Weight& weight)
{
    if (!is_nontrivial(params, weight)) {
        throw TrivialSpaceError("trivial weighted space: alpha = " + std::to_string(weight.alpha()) +
                                " <= m + n = " + std::to_string(params.n() + params.m()));
    }
}

// C(n, d) nu^{n-d}, with 0^0 = 1.
inline double binomial_power(int n, int d, double nu)
{
    return static_cast<double>(specfn::binomial(n, d)) * std::pow(nu, n - d);
}

} // namespace detail

/// ln chi(alpha, t), where
///   chi = [(nu+1) alpha + t]^n / sum_d C(n,d) nu^{n-d} Gamma(alpha-m-d) / Gamma(alpha-d+t).
/// Gamma ratios are combined in log space; chi itself overflows for large t.
inline double log_chi(const DomainParams& params, const Weight& weight, unsigned qdeg)
{
    detail::require_nontrivial(params, weight);
    const int n = params.n();
    const double m = params.m();
    const double a = weight.alpha();
    const double t = qdeg;

    std::vector<double> coeff(n + 1), logs(n + 1);
    double lmax = -std::numeric_limits<double>::infinity();
    for (int d = 0; d <= n; ++d) {
        coeff[d] = detail::binomial_power(n, d, params.nu());
        logs[d] = specfn::log_gamma(a - m - d) - specfn::log_gamma(a - d + t);
        if (coeff[d] != 0.0) lmax = std::max(lmax, logs[d]);
    }
    double scaled = 0.0;
    for (int d = 0; d <= n; ++d) {
        if (coeff[d] != 0.0) scaled += coeff[d] * std::exp(logs[d] - lmax);
    }
    if (!(scaled > 0.0)) throw std::runtime_error("log_chi: denominator lost positivity");
    return n * std::log((params.nu() + 1.0) * a + t) - (lmax + std::log(scaled));
}

inline double chi(const DomainParams& params, const Weight& weight, unsigned qdeg)
{
    return std::exp(log_chi(params, weight, qdeg));
}

/// psi = Gamma(alpha - m - n) chi(alpha, t) / Gamma(alpha + t), in log space.
inline double psi_gamma_form(const DomainParams& params, const Weight& weight, unsigned qdeg)
{
    const double a = weight.alpha();
    const double lg = specfn::log_gamma(a - params.m() - params.n()) + log_chi(params, weight, qdeg) -
                      specfn::log_gamma(a + qdeg);
    return std::exp(lg);
}

/// psi = [(nu+1) alpha + t]^n / sum_d C(n,d) nu^{n-d} (alpha-m-n)_{n-d} (alpha-d+t)_d.
inline double psi_pochhammer_form(const DomainParams& params, const Weight& weight, unsigned qdeg)
{
    detail::require_nontrivial(params, weight);
    const int n = params.n();
    const double a = weight.alpha();
    const double t = qdeg;
    const double base = a - params.m() - n;
    double den = 0.0;
    for (int d = 0; d <= n; ++d) {
        const double c = detail::binomial_power(n, d, params.nu());
        if (c == 0.0) continue;
        den += c * specfn::pochhammer(base, n - d) * specfn::pochhammer(a - d + t, d);
    }
    return std::pow((params.nu() + 1.0) * a + t, n) / den;
}

/// psi(alpha, t); the Pochhammer form is used since it avoids Gamma values
/// of size t. psi_gamma_form() is the independent second route.
inline double psi(const DomainParams& params, const Weight& weight, unsigned qdeg)
{
    return psi_pochhammer_form(params, weight, qdeg);
}

/// Upper bound on sup_{t > after} psi(alpha, t), or nullopt when the bound is
/// not yet available at this degree.
///
/// Writes psi = prod_k (c + t)/(alpha - k + t) / F(t) with c = (nu+1) alpha and
///   F(t) = sum_j C(n,j) nu^j (alpha-m-n)_j / (alpha-n+t)_j.
/// Each product factor is monotone in t with limit 1, and every |term| of F
/// decreases in t, so both pieces are bounded by their values at after + 1.
inline std::optional<double> psi_sup_bound(const DomainParams& params, const Weight& weight,
                                           unsigned after)
{
    detail::require_nontrivial(params, weight);
    const int n = params.n();
    const double a = weight.alpha();
    const double t = static_cast<double>(after) + 1.0;
    const double c = (params.nu() + 1.0) * a;

    double num = 1.0;
    for (int k = 1; k <= n; ++k) num *= std::max(1.0, (c + t) / (a - k + t));

    const double base = a - params.m() - n;
    double den = 1.0;
    for (int j = 1; j <= n; ++j) {
        const double term = static_cast<double>(specfn::binomial(n, j)) * std::pow(params.nu(), j) *
                            specfn::pochhammer(base, j) / specfn::pochhammer(a - n + t, j);
        den += std::min(0.0, term);
    }
    if (!(den > 0.0)) return std::nullopt;
    return num / den;
}

/// ln ||z^p w^q||^2.
inline double log_monomial_norm_sq(const DomainParams& params, const Weight& weight,
                                   const MultiIndex& p, const MultiIndex& q)
{
    detail::require_nontrivial(params, weight);
    if (p.size() != static_cast<std::size_t>(params.n()) ||
        q.size() != static_cast<std::size_t>(params.m()))
        throw std::invalid_argument("monomial_norm_sq: multi-index lengths must be (n, m)");
    double lg = 0.0;
    for (unsigned e : p.exponents) lg += specfn::log_gamma(e + 1.0);
    for (unsigned e : q.exponents) lg += specfn::log_gamma(e + 1.0);
    const unsigned qd = q.degree();
    const double rate = params.mu() * ((params.nu() + 1.0) * weight.alpha() + qd);
    return lg - p.degree() * std::log(rate) - log_chi(params, weight, qd);
}

/// ||z^p w^q||^2 = prod Gamma(p_i+1) prod Gamma(q_i+1) / ([mu((nu+1) alpha + |q|)]^{|p|} chi(alpha, |q|)).
inline double monomial_norm_sq(const DomainParams& params, const Weight& weight,
                               const MultiIndex& p, const MultiIndex& q)
{
    return std::exp(log_monomial_norm_sq(params, weight, p, q));
}

/// (alpha - m - n)_{m+n}, the constant in front of the kernel series.
inline double kernel_prefactor(const DomainParams& params, const Weight& weight)
{
    const int k = params.n() + params.m();
    return specfn::pochhammer(weight.alpha() - k, static_cast<unsigned>(k));
}

namespace detail {

// Sums sum_t coef(t) b_t with b_t = (s)_t / t! * x^t, b_0 = 1, stopping once
// coef_sup(t) * sum_{t' > t} b_{t'} is certified below tol * partial sum.
// sum_{t'>t} b_{t'} <= b_{t+1} / (1 - r) with r = x max(1, (t+1+s)/(t+2)),
// the supremum of b_{t'+1}/b_{t'} over t' >= t+1.
template <class Coef, class CoefSup>
SeriesResult certified_degree_series(double s, double x, const TruncationPolicy& policy,
                                     Coef&& coef, CoefSup&& coef_sup, const char* who)
{
    policy.validate();
    SeriesResult out;
    double b = 1.0;
    double sum = 0.0;
    for (int t = 0; t <= policy.max_degree; ++t) {
        const double term = coef(static_cast<unsigned>(t)) * b;
        sum += term;
        out.degree = t;
        if (x == 0.0) {
            out.value = sum;
            out.tail_bound = 0.0;
            return out;
        }
        const double b_next = b * x * (t + s) / (t + 1.0);
        if (term <= policy.tail_tol * sum) {
            const double r = x * std::max(1.0, (t + 1.0 + s) / (t + 2.0));
            const std::optional<double> sup = coef_sup(static_cast<unsigned>(t));
            if (r < 1.0 && sup) {
                const double tail = *sup * b_next / (1.0 - r);
                if (tail <= policy.tail_tol * sum) {
                    out.value = sum;
                    out.tail_bound = tail;
                    return out;
                }
            }
        }
        b = b_next;
    }
    throw TruncationError(std::string(who) + ": max_degree " + std::to_string(policy.max_degree) +
                          " reached without a certified tail");
}

inline void require_certified_region(double x, const char* who)
{
    if (!(x >= 0.0) || x > kCertifiedRegion) {
        throw std::domain_error(std::string(who) + ": |w~|^2 = " + std::to_string(x) +
                                " outside the certified region [0, 0.95]");
    }
}

} // namespace detail

/// sum_t psi(alpha, t) (alpha)_t / t! x^t, certified to policy.tail_tol relative.
inline SeriesResult psi_series(const DomainParams& params, const Weight& weight, double x,
                               const TruncationPolicy& policy)
{
    detail::require_nontrivial(params, weight);
    detail::require_certified_region(x, "psi_series");
    return detail::certified_degree_series(
        weight.alpha(), x, policy, [&](unsigned t) { return psi(params, weight, t); },
        [&](unsigned t) { return psi_sup_bound(params, weight, t); }, "psi_series");
}

/// epsilon as a function of x = |w~|^2 alone:
///   (alpha-m-n)_{m+n} (1 - x)^alpha sum_t psi(alpha, t) (alpha)_t / t! x^t.
inline SeriesResult epsilon_at(const DomainParams& params, const Weight& weight, double x,
                               const TruncationPolicy& policy)
{
    SeriesResult r = psi_series(params, weight, x, policy);
    const double scale = kernel_prefactor(params, weight) * std::exp(weight.alpha() * std::log1p(-x));
    r.value *= scale;
    r.tail_bound *= scale;
    return r;
}

/// K_alpha(z, w, zbar, wbar) on the diagonal.
inline SeriesResult kernel_diag(const DomainParams& params, const Weight& weight,
                                const DomainPoint& point, const TruncationPolicy& policy)
{
    fbh::detail::require_owned(params, point);
    SeriesResult r = psi_series(params, weight, point.w_tilde_sq(), policy);
    const double scale =
        kernel_prefactor(params, weight) *
        std::exp(params.mu() * (params.nu() + 1.0) * weight.alpha() * point.z().squaredNorm());
    r.value *= scale;
    r.tail_bound *= scale;
    return r;
}

/// Rawnsley's epsilon function exp(-alpha Phi) K_alpha on the diagonal.
inline SeriesResult epsilon(const DomainParams& params, const Weight& weight,
                            const DomainPoint& point, const TruncationPolicy& policy)
{
    fbh::detail::require_owned(params, point);
    return epsilon_at(params, weight, point.w_tilde_sq(), policy);
}

/// Left side of sum_{q in N^m} Gamma(|q|+s)/(Gamma(s) prod q_i!) x^{2q} = (1 - |x|^2)^{-s},
/// truncated with a certified relative tail.
inline SeriesResult dangelo_sum(int m, double s, const std::vector<double>& x,
                                const TruncationPolicy& policy)
{
    if (m < 1) throw std::invalid_argument("dangelo_sum: m must be >= 1");
    if (x.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("dangelo_sum: x must have length m");
    if (!(s > 0.0)) throw std::invalid_argument("dangelo_sum: s must be positive");
    double xs = 0.0;
    for (double v : x) xs += v * v;
    if (!(xs < 1.0)) throw std::domain_error("dangelo_sum: |x| must be < 1");
    return detail::certified_degree_series(
        s, xs, policy, [](unsigned) { return 1.0; },
        [](unsigned) { return std::optional<double>(1.0); }, "dangelo_sum");
}

} // namespace fbh
