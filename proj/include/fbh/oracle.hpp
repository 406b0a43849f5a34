// Independent integration oracle for the Gamma-function closed forms:
// Dirichlet integrals over the standard simplex and weighted monomial norms.
//
// The monomial norm integral is reduced the same way the closed form is
// derived: polar coordinates, s_i = |z_i|^2, t~_j = exp(mu |s|) |w_j|^2. The
// s-integral is a product of one-dimensional Gamma integrals and is evaluated
// exactly; only the m-simplex integral in t~ is sampled.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fbh/bergman.hpp"
#include "fbh/core.hpp"
#include "fbh/specfn.hpp"

namespace fbh {

struct McConfig {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    std::uint64_t batch = 10000; // samples per batch; one PRNG stream per batch
    unsigned threads = 0;        // 0: hardware concurrency

    void validate() const
    {
        if (samples < 1000) throw std::invalid_argument("McConfig: samples must be >= 1000");
        if (batch == 0 || samples % batch != 0)
            throw std::invalid_argument("McConfig: batch must divide samples");
    }
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

namespace detail {

struct BatchMoments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
};

inline std::mt19937_64 batch_stream(std::uint64_t seed, std::uint64_t batch_index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(batch_index),
                      static_cast<std::uint32_t>(batch_index >> 32), 0x5eedu};
    return std::mt19937_64(seq);
}

} // namespace detail

/// Mean of f over the uniform distribution on {x in R^m : x >= 0, sum x <= 1},
/// multiplied by the simplex volume 1/m!. f receives the point and its slack
/// 1 - sum x. Points are drawn by normalised exponential spacings.
///
/// Batches are independent streams keyed by (seed, batch index) and are
/// reduced in index order, so the estimate does not depend on threading.
template <class F>
McEstimate simplex_mc(int m, F&& f, const McConfig& cfg)
{
    if (m < 1) throw std::invalid_argument("simplex_mc: m must be >= 1");
    cfg.validate();
    const std::uint64_t nbatch = cfg.samples / cfg.batch;
    std::vector<detail::BatchMoments> moments(nbatch);

    auto run_batch = [&](std::uint64_t b) {
        std::mt19937_64 rng = detail::batch_stream(cfg.seed, b);
        std::exponential_distribution<double> expo(1.0);
        std::vector<double> e(static_cast<std::size_t>(m) + 1), x(static_cast<std::size_t>(m));
        detail::BatchMoments acc;
        for (std::uint64_t i = 0; i < cfg.batch; ++i) {
            double total = 0.0;
            for (auto& v : e) {
                v = expo(rng);
                total += v;
            }
            for (int k = 0; k < m; ++k) x[k] = e[k] / total;
            const double slack = e[m] / total;
            const double y = f(static_cast<const std::vector<double>&>(x), slack);
            ++acc.count;
            const double delta = y - acc.mean;
            acc.mean += delta / static_cast<double>(acc.count);
            acc.m2 += delta * (y - acc.mean);
        }
        moments[b] = acc;
    };

    unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, nbatch));
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < nbatch; ++b) run_batch(b);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint64_t b = w; b < nbatch; b += workers) run_batch(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    // Chan et al. pairwise combination, in batch order.
    detail::BatchMoments all;
    for (const auto& bm : moments) {
        if (all.count == 0) {
            all = bm;
            continue;
        }
        const double n_a = static_cast<double>(all.count);
        const double n_b = static_cast<double>(bm.count);
        const double delta = bm.mean - all.mean;
        const double n_ab = n_a + n_b;
        all.mean += delta * n_b / n_ab;
        all.m2 += bm.m2 + delta * delta * n_a * n_b / n_ab;
        all.count += bm.count;
    }

    const double volume = std::exp(-specfn::log_gamma(m + 1.0));
    const double n = static_cast<double>(all.count);
    const double var = all.count > 1 ? all.m2 / (n - 1.0) : 0.0;
    return {volume * all.mean, volume * std::sqrt(var / n), all.count};
}

namespace detail {

inline void check_dirichlet_args(const std::vector<double>& q, double alpha, int m, int k)
{
    if (m < 1) throw std::invalid_argument("dirichlet: m must be >= 1");
    if (k < 0) throw std::invalid_argument("dirichlet: k must be >= 0");
    if (q.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("dirichlet: q must have length m");
    for (double v : q)
        if (!(v >= 0.0)) throw std::invalid_argument("dirichlet: q entries must be >= 0");
    if (!(alpha > m + k - 1.0))
        throw std::domain_error("dirichlet: integral diverges unless alpha > m + k - 1");
}

} // namespace detail

/// int_simplex prod x_i^{q_i} (1 - sum x_i)^{alpha-m-k} dx
///   = prod Gamma(q_i + 1) Gamma(alpha - m - k + 1) / Gamma(alpha + sum q_i - k + 1).
inline double dirichlet_closed_form(const std::vector<double>& q, double alpha, int m, int k)
{
    detail::check_dirichlet_args(q, alpha, m, k);
    double lg = specfn::log_gamma(alpha - m - k + 1.0);
    double qsum = 0.0;
    for (double v : q) {
        lg += specfn::log_gamma(v + 1.0);
        qsum += v;
    }
    lg -= specfn::log_gamma(alpha + qsum - k + 1.0);
    return std::exp(lg);
}

/// Monte Carlo estimate of the same simplex integral.
inline McEstimate dirichlet_simplex_mc(const std::vector<double>& q, double alpha, int m, int k,
                                       const McConfig& cfg)
{
    detail::check_dirichlet_args(q, alpha, m, k);
    const double c = alpha - m - k;
    return simplex_mc(
        m,
        [&](const std::vector<double>& x, double slack) {
            double v = std::pow(slack, c);
            for (int i = 0; i < m; ++i) v *= std::pow(x[i], q[i]);
            return v;
        },
        cfg);
}

/// Monte Carlo estimate of ||z^p w^q||^2:
///   mu^n prod Gamma(p_i+1) / [mu((nu+1) alpha + |q|)]^{|p|+n}
///   * int_simplex t~^q sum_d C(n,d) nu^{n-d} (1 - sum t~)^{alpha-m-1-d} dt~.
inline McEstimate monomial_norm_mc(const DomainParams& params, const Weight& weight,
                                   const MultiIndex& p, const MultiIndex& q, const McConfig& cfg)
{
    detail::require_nontrivial(params, weight);
    const int n = params.n();
    const int m = params.m();
    if (p.size() != static_cast<std::size_t>(n) || q.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("monomial_norm_mc: multi-index lengths must be (n, m)");
    const double a = weight.alpha();
    const double mu = params.mu();

    double log_s = n * std::log(mu);
    for (unsigned e : p.exponents) log_s += specfn::log_gamma(e + 1.0);
    log_s -= (p.degree() + n) * std::log(mu * ((params.nu() + 1.0) * a + q.degree()));
    const double s_factor = std::exp(log_s);

    std::vector<double> coeff(n + 1);
    for (int d = 0; d <= n; ++d) coeff[d] = detail::binomial_power(n, d, params.nu());

    McEstimate est = simplex_mc(
        m,
        [&](const std::vector<double>& x, double slack) {
            double mono = 1.0;
            for (int i = 0; i < m; ++i) mono *= std::pow(x[i], static_cast<double>(q.exponents[i]));
            double radial = 0.0;
            for (int d = 0; d <= n; ++d) {
                if (coeff[d] != 0.0) radial += coeff[d] * std::pow(slack, a - m - 1.0 - d);
            }
            return mono * radial;
        },
        cfg);
    est.mean *= s_factor;
    est.std_error *= s_factor;
    return est;
}

/// monomial_norm_sq along a strictly decreasing sequence of weights above m + n.
inline std::vector<double> divergence_probe(const DomainParams& params,
                                            const std::vector<double>& alphas, const MultiIndex& p,
                                            const MultiIndex& q)
{
    std::vector<double> out;
    out.reserve(alphas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (i > 0 && !(alphas[i] < alphas[i - 1]))
            throw std::invalid_argument("divergence_probe: alpha sequence must decrease");
        out.push_back(monomial_norm_sq(params, Weight(alphas[i]), p, q));
    }
    return out;
}

} // namespace fbh
