// Special-function primitives: log-gamma, rising factorials, binomials and
// gamma ratios. Every closed form in the library goes through these.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

namespace fbh::specfn {

/// Largest k for which pochhammer() multiplies factors directly.
inline constexpr unsigned kDirectPochhammerLimit = 64;

/// Natural log of Gamma(x) for x > 0.
inline double log_gamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error("log_gamma: argument must be positive and finite, got " +
                                std::to_string(x));
    }
    return boost::math::lgamma(x);
}

/// Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1.
inline double pochhammer(double a, unsigned k)
{
    if (k <= kDirectPochhammerLimit || a <= 0.0) {
        double r = 1.0;
        for (unsigned i = 0; i < k; ++i) r *= a + static_cast<double>(i);
        return r;
    }
    return std::exp(log_gamma(a + static_cast<double>(k)) - log_gamma(a));
}

/// Exact binomial coefficient C(n, d). Throws when d > n or on overflow.
inline std::uint64_t binomial(unsigned n, unsigned d)
{
    if (d > n) {
        throw std::domain_error("binomial: d > n (" + std::to_string(d) + " > " +
                                std::to_string(n) + ")");
    }
    if (d > n - d) d = n - d;
    std::uint64_t r = 1;
    for (unsigned i = 0; i < d; ++i) {
        // r * (n - i) is divisible by (i + 1) at every step.
        const std::uint64_t num = n - i;
        if (r > std::numeric_limits<std::uint64_t>::max() / num) {
            throw std::overflow_error("binomial: result exceeds 64 bits");
        }
        r = r * num / (i + 1);
    }
    return r;
}

/// Gamma(a) / Gamma(b), evaluated as exp(lnGamma(a) - lnGamma(b)).
inline double gamma_ratio(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::domain_error("gamma_ratio: arguments must be positive");
    }
    return std::exp(log_gamma(a) - log_gamma(b));
}

} // namespace fbh::specfn
