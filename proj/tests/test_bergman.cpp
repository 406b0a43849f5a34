#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "fbh/bergman.hpp"
#include "fbh/sampling.hpp"

using namespace fbh;

namespace {

CVector vec(std::initializer_list<cplx> v)
{
    CVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const auto& x : v) out(i++) = x;
    return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Visits every multi-index of the given length with total degree <= max_total.
void for_each_index(int length, unsigned max_total, const std::function<void(const MultiIndex&)>& visit)
{
    std::vector<unsigned> e(static_cast<std::size_t>(length), 0u);
    std::function<void(int, unsigned)> rec = [&](int pos, unsigned left) {
        if (pos == length) {
            visit(MultiIndex(e));
            return;
        }
        for (unsigned k = 0; k <= left; ++k) {
            e[pos] = k;
            rec(pos + 1, left - k);
        }
        e[pos] = 0;
    };
    rec(0, max_total);
}

// |z^p|^2 for a multi-index p.
double monomial_abs_sq(const CVector& z, const MultiIndex& p)
{
    double r = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) r *= std::pow(std::norm(z(static_cast<Eigen::Index>(i))), p.exponents[i]);
    return r;
}

const TruncationPolicy kPolicy{2000, 1e-10};

} // namespace

TEST(Nontrivial, Boundary)
{
    EXPECT_FALSE(is_nontrivial(DomainParams(1, 1, 1.0, 0.0), Weight(2.0)));
    EXPECT_TRUE(is_nontrivial(DomainParams(1, 1, 1.0, 0.0), Weight(2.01)));
    EXPECT_FALSE(is_nontrivial(DomainParams(2, 3, 1.0, 0.0), Weight(5.0)));
    EXPECT_THROW(Weight(0.0), std::invalid_argument);
}

TEST(Chi, Examples)
{
    const DomainParams p(1, 1, 1.0, 0.0);
    EXPECT_NEAR(chi(p, Weight(4.0), 0), 8.0, 1e-13);
    EXPECT_NEAR(chi(p, Weight(4.0), 1), 30.0, 1e-12);

    // nu = -1/2: chi = Gamma(alpha + t) / Gamma(alpha - 2).
    const DomainParams h(1, 1, 1.0, -0.5);
    for (unsigned t = 0; t <= 30; ++t) {
        const double expect = std::exp(std::lgamma(4.0 + t) - std::lgamma(2.0));
        EXPECT_NEAR(chi(h, Weight(4.0), t) / expect, 1.0, 1e-12) << t;
    }
    EXPECT_THROW(chi(p, Weight(2.0), 0), TrivialSpaceError);
}

TEST(Psi, Examples)
{
    const DomainParams p(1, 1, 1.0, 0.0);
    EXPECT_NEAR(psi(p, Weight(4.0), 0), 4.0 / 3.0, 1e-15);
    EXPECT_NEAR(psi_gamma_form(p, Weight(4.0), 0), 4.0 / 3.0, 1e-13);

    const DomainParams h(1, 1, 1.0, -0.5);
    for (unsigned t = 0; t <= 50; ++t) {
        EXPECT_NEAR(psi(h, Weight(4.0), t), 1.0, 1e-12);
        EXPECT_NEAR(psi_gamma_form(h, Weight(4.0), t), 1.0, 1e-12);
    }
}

TEST(Psi, TwoFormsAgreeOnGrid)
{
    for (int n = 1; n <= 3; ++n) {
        for (int m = 1; m <= 3; ++m) {
            for (double nu : {-0.9, -0.5, 0.0, 0.5, 1.0, 3.0}) {
                const DomainParams p(n, m, 1.0, nu);
                for (double da = 0.5; da <= 10.0; da += 0.5) {
                    const Weight wgt(n + m + da);
                    for (unsigned t = 0; t <= 100; ++t) {
                        const double a = psi_pochhammer_form(p, wgt, t);
                        const double b = psi_gamma_form(p, wgt, t);
                        ASSERT_LE(rel(b, a), 1e-12) << n << " " << m << " " << nu << " " << da << " " << t;
                    }
                }
            }
        }
    }
}

TEST(Psi, TendsToOne)
{
    for (int n = 1; n <= 3; ++n)
        for (int m = 1; m <= 3; ++m)
            for (double nu : {-0.9, -0.5, 0.0, 0.5, 1.0, 3.0})
                for (double da = 0.5; da <= 10.0; da += 0.5) {
                    const double v = psi(DomainParams(n, m, 1.0, nu), Weight(n + m + da), 10000);
                    EXPECT_NEAR(v, 1.0, 1e-2) << n << " " << m << " " << nu << " " << da;
                }
}

TEST(Psi, FirstOrderAsymptote)
{
    // t (psi - 1) -> n [(n + 1)/2 + nu (m + n)]
    for (int n = 1; n <= 3; ++n)
        for (int m = 1; m <= 3; ++m)
            for (double nu : {-0.9, 0.0, 10.0}) {
                const double t = 1e6;
                const double lead = n * ((n + 1) / 2.0 + nu * (m + n));
                const double v = t * (psi(DomainParams(n, m, 1.0, nu), Weight(n + m + 1.5), 1000000) - 1.0);
                EXPECT_NEAR(v, lead, 1e-2 * std::max(1.0, std::abs(lead))) << n << " " << m << " " << nu;
            }
}

TEST(Psi, SupBoundDominatesTail)
{
    for (int n = 1; n <= 3; ++n) {
        for (int m = 1; m <= 3; ++m) {
            for (double nu : {-0.9, -0.5, 0.0, 1.0, 10.0}) {
                const DomainParams p(n, m, 1.0, nu);
                const Weight wgt(n + m + 0.7);
                double running = 0.0;
                // sup over t in (after, 3000] computed from the top down
                std::vector<double> sup_from(3002, 0.0);
                for (int t = 3000; t >= 0; --t) {
                    running = std::max(running, psi(p, wgt, static_cast<unsigned>(t)));
                    sup_from[static_cast<std::size_t>(t)] = running;
                }
                for (unsigned after : {0u, 1u, 5u, 20u, 100u, 1000u}) {
                    const auto bound = psi_sup_bound(p, wgt, after);
                    if (!bound) continue;
                    EXPECT_GE(*bound * (1.0 + 1e-14), sup_from[after + 1]) << n << m << nu << after;
                }
                EXPECT_TRUE(psi_sup_bound(p, wgt, 1000).has_value());
            }
        }
    }
}

TEST(MonomialNorm, Examples)
{
    const DomainParams p(1, 1, 1.0, 0.0);
    const Weight wgt(4.0);
    EXPECT_NEAR(monomial_norm_sq(p, wgt, {0}, {0}), 1.0 / 8.0, 1e-15);
    EXPECT_NEAR(monomial_norm_sq(p, wgt, {1}, {0}), 1.0 / 32.0, 1e-15);
    EXPECT_NEAR(monomial_norm_sq(p, wgt, {0}, {1}), 1.0 / 30.0, 1e-15);
    EXPECT_THROW(monomial_norm_sq(p, Weight(2.0), {0}, {0}), TrivialSpaceError);
    EXPECT_THROW(monomial_norm_sq(p, wgt, {0, 0}, {0}), std::invalid_argument);
}

TEST(MonomialNorm, LargeDegreeStaysFinite)
{
    const DomainParams p(2, 2, 1.0, 0.3);
    const double v = monomial_norm_sq(p, Weight(6.5), {3, 1}, {5000, 5000});
    EXPECT_TRUE(std::isfinite(log_monomial_norm_sq(p, Weight(6.5), {3, 1}, {5000, 5000})));
    EXPECT_GE(v, 0.0);
}

TEST(KernelDiag, OnlyConstantTermAtZeroFibre)
{
    const DomainParams p(2, 1, 0.8, 0.4);
    const Weight wgt(4.5);
    const DomainPoint pt(p, vec({0.3, cplx(0.1, 0.2)}), vec({0.0}));
    const SeriesResult k = kernel_diag(p, wgt, pt, kPolicy);
    const double expect = kernel_prefactor(p, wgt) * psi(p, wgt, 0) *
                          std::exp(p.mu() * (p.nu() + 1.0) * wgt.alpha() * pt.z().squaredNorm());
    EXPECT_NEAR(k.value / expect, 1.0, 1e-14);
    EXPECT_EQ(k.degree, 0);
    EXPECT_EQ(k.tail_bound, 0.0);
}

TEST(KernelDiag, BalancedClosedForm)
{
    const DomainParams p(1, 1, 1.0, -0.5);
    const Weight wgt(4.0);
    std::mt19937_64 rng(21);
    for (int i = 0; i < 50; ++i) {
        const DomainPoint pt = sample_member(p, rng);
        const double x = pt.w_tilde_sq();
        const double expect = 6.0 * std::exp(2.0 * pt.z().squaredNorm()) * std::pow(1.0 - x, -4.0);
        EXPECT_LE(rel(kernel_diag(p, wgt, pt, kPolicy).value, expect), 1e-9);
    }
}

TEST(KernelDiag, MatchesOrthonormalExpansion)
{
    // K = sum_{p, q} |z^p|^2 |w^q|^2 / ||z^p w^q||^2, enumerated without the
    // degree collapse.
    struct Case {
        DomainParams params;
        double alpha;
        CVector z, w;
    };
    const std::vector<Case> cases{
        {DomainParams(1, 1, 1.0, 0.0), 4.0, vec({0.3}), vec({0.2})},
        {DomainParams(1, 2, 0.7, -0.3), 4.5, vec({cplx(0.2, 0.1)}), vec({0.2, cplx(0.0, 0.15)})},
        {DomainParams(2, 1, 1.2, 1.0), 5.2, vec({0.2, cplx(-0.1, 0.1)}), vec({0.25})},
    };
    for (const auto& c : cases) {
        const DomainPoint pt(c.params, c.z, c.w);
        const Weight wgt(c.alpha);
        double brute = 0.0;
        for_each_index(c.params.n(), 60, [&](const MultiIndex& pz) {
            const double zp = monomial_abs_sq(c.z, pz);
            for_each_index(c.params.m(), 60, [&](const MultiIndex& qw) {
                brute += zp * monomial_abs_sq(c.w, qw) / monomial_norm_sq(c.params, wgt, pz, qw);
            });
        });
        const SeriesResult k = kernel_diag(c.params, wgt, pt, kPolicy);
        EXPECT_LE(rel(k.value, brute), 1e-9);
    }
}

TEST(Epsilon, ConstantForBalancedParameters)
{
    std::mt19937_64 rng(22);
    const DomainParams p11(1, 1, 1.0, -0.5);
    const DomainParams p12(1, 2, 1.0, -1.0 / 3.0);
    for (int i = 0; i < 50; ++i) {
        EXPECT_LE(rel(epsilon(p11, Weight(4.0), sample_member(p11, rng), kPolicy).value, 6.0), 1e-9);
        EXPECT_LE(rel(epsilon(p12, Weight(5.0), sample_member(p12, rng), kPolicy).value, 24.0), 1e-9);
    }
}

TEST(Epsilon, NotConstantForNuZero)
{
    const DomainParams p(1, 1, 1.0, 0.0);
    EXPECT_NEAR(epsilon_at(p, Weight(4.0), 0.0, kPolicy).value, 8.0, 1e-12);
    const double far = epsilon_at(p, Weight(4.0), 0.9, kPolicy).value;
    EXPECT_LT(far, 8.0 - 0.5);
    EXPECT_GT(far, 6.0);
}

TEST(Epsilon, ClosedFormForNuZero)
{
    // (n, m, nu) = (1, 1, 0): eps = (1-x)^alpha (alpha-2) sum_t (alpha+t) (alpha-1)_t x^t / t!
    //                             = (alpha - 2)(alpha - x).
    const DomainParams p(1, 1, 1.0, 0.0);
    for (double alpha : {2.5, 4.0, 7.25}) {
        for (double x : {0.0, 0.1, 0.45, 0.8, 0.95}) {
            const SeriesResult r = epsilon_at(p, Weight(alpha), x, kPolicy);
            const double exact = (alpha - 2.0) * (alpha - x);
            EXPECT_LE(std::abs(r.value - exact), r.tail_bound + 1e-13 * exact) << alpha << " " << x;
            EXPECT_LE(r.value, exact * (1.0 + 1e-14));
        }
    }
}

TEST(Epsilon, EqualsWeightedKernel)
{
    std::mt19937_64 rng(23);
    for (double nu : {-0.5, 0.0, 1.5}) {
        const DomainParams p(2, 2, 0.6, nu);
        const Weight wgt(5.3);
        for (int i = 0; i < 50; ++i) {
            const DomainPoint pt = sample_member(p, rng);
            const double eps = epsilon(p, wgt, pt, kPolicy).value;
            const double k = kernel_diag(p, wgt, pt, kPolicy).value;
            EXPECT_LE(rel(std::exp(-wgt.alpha() * potential(p, pt)) * k, eps), 1e-10);
        }
    }
}

TEST(Epsilon, DependsOnlyOnReducedNorm)
{
    const DomainParams p(2, 2, 1.0, 0.7);
    const Weight wgt(6.0);
    std::mt19937_64 rng(24);
    for (int i = 0; i < 50; ++i) {
        const DomainPoint a = sample_member(p, rng);
        const CVector z = complex_gaussian(2, rng);
        const CVector dir = uniform_complex_ball(2, rng, 1.0).normalized();
        const CVector w = dir * std::sqrt(a.w_tilde_sq()) * std::exp(-0.5 * p.mu() * z.squaredNorm());
        const DomainPoint b(p, z, w);
        EXPECT_NEAR(epsilon(p, wgt, a, kPolicy).value, epsilon(p, wgt, b, kPolicy).value,
                    1e-12 * epsilon(p, wgt, a, kPolicy).value);
    }
}

TEST(Epsilon, InvariantUnderAutomorphisms)
{
    const DomainParams p(2, 2, 1.0, 0.0);
    const Weight wgt(5.5);
    std::mt19937_64 rng(25);
    for (int i = 0; i < 100; ++i) {
        const DomainPoint pt = sample_member(p, rng);
        const double e0 = epsilon(p, wgt, pt, kPolicy).value;
        const double eu = epsilon(p, wgt, apply_unitary_z(p, random_unitary(2, rng), pt), kPolicy).value;
        const double ev = epsilon(p, wgt, apply_unitary_w(p, random_unitary(2, rng), pt), kPolicy).value;
        const double ea = epsilon(p, wgt, apply_translation(p, complex_gaussian(2, rng), pt), kPolicy).value;
        EXPECT_LE(std::abs(e0 - eu), 10 * kPolicy.tail_tol);
        EXPECT_LE(std::abs(e0 - ev), 10 * kPolicy.tail_tol);
        EXPECT_LE(std::abs(e0 - ea), 10 * kPolicy.tail_tol);
    }
}

TEST(Truncation, PartialSumsIncreaseWithDegree)
{
    const DomainParams p(2, 1, 1.0, 0.5);
    const Weight wgt(4.2);
    double prev_value = 0.0;
    int prev_degree = -1;
    for (double tol : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
        const SeriesResult r = psi_series(p, wgt, 0.8, TruncationPolicy{5000, tol});
        EXPECT_GE(r.degree, prev_degree);
        EXPECT_GE(r.value, prev_value);
        EXPECT_LE(r.tail_bound, tol * r.value);
        prev_value = r.value;
        prev_degree = r.degree;
    }
    for (unsigned t = 0; t < 500; ++t) EXPECT_GT(psi(p, wgt, t), 0.0);
}

TEST(Truncation, ExhaustedPolicyIsReported)
{
    const DomainParams p(1, 1, 1.0, 0.0);
    EXPECT_THROW(epsilon_at(p, Weight(4.0), 0.9, TruncationPolicy{10, 1e-10}), TruncationError);
    EXPECT_THROW(epsilon_at(p, Weight(4.0), 0.96, kPolicy), std::domain_error);
    EXPECT_THROW(epsilon_at(p, Weight(4.0), 0.5, TruncationPolicy{0, 1e-10}), std::invalid_argument);
}

TEST(Truncation, CertifiedTailIsHonest)
{
    // Compare against a much longer sum.
    const DomainParams p(2, 2, 1.0, -0.7);
    const Weight wgt(4.3);
    const SeriesResult r = psi_series(p, wgt, 0.9, kPolicy);
    const SeriesResult longer = psi_series(p, wgt, 0.9, TruncationPolicy{20000, 1e-15});
    EXPECT_LE(longer.value - r.value, r.tail_bound * (1.0 + 1e-6) + 1e-13 * r.value);
}

TEST(DAngelo, Examples)
{
    EXPECT_EQ(dangelo_sum(2, 1.5, {0.0, 0.0}, kPolicy).value, 1.0);
    EXPECT_NEAR(dangelo_sum(1, 1.0, {std::sqrt(0.5)}, kPolicy).value, 2.0, 2.0 * 1e-10);
    const double v = dangelo_sum(2, 3.5, {std::sqrt(0.1), std::sqrt(0.2)}, kPolicy).value;
    EXPECT_LE(rel(v, std::pow(0.7, -3.5)), 1e-10);
    EXPECT_THROW(dangelo_sum(2, 1.0, {0.8, 0.8}, kPolicy), std::domain_error);
    EXPECT_THROW(dangelo_sum(2, 1.0, {0.1}, kPolicy), std::invalid_argument);
}

TEST(DAngelo, CollapseMatchesMultiIndexEnumeration)
{
    for (int m : {2, 3}) {
        std::vector<double> x;
        for (int i = 0; i < m; ++i) x.push_back(0.25 + 0.05 * i);
        const double s = 2.5;
        double brute = 0.0;
        CVector xv(m);
        for (int i = 0; i < m; ++i) xv(i) = x[static_cast<std::size_t>(i)];
        for_each_index(m, 80, [&](const MultiIndex& q) {
            double lg = std::lgamma(q.degree() + s) - std::lgamma(s);
            for (unsigned e : q.exponents) lg -= std::lgamma(e + 1.0);
            brute += std::exp(lg) * monomial_abs_sq(xv, q);
        });
        EXPECT_LE(rel(dangelo_sum(m, s, x, kPolicy).value, brute), 1e-10);
    }
}
