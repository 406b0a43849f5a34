// Random members of D_{n,m}(mu) and random unitaries, for property checks.
#pragma once

#include <cmath>
#include <random>

#include "fbh/core.hpp"

namespace fbh {

/// Standard complex Gaussian vector, E|v_i|^2 = scale^2.
template <class Rng>
CVector complex_gaussian(Eigen::Index size, Rng& rng, double scale = 1.0)
{
    std::normal_distribution<double> normal(0.0, scale / std::sqrt(2.0));
    CVector v(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = cplx(re, im);
    }
    return v;
}

/// Uniform point of the complex ball { |v| < radius } in C^size.
template <class Rng>
CVector uniform_complex_ball(Eigen::Index size, Rng& rng, double radius)
{
    CVector v = complex_gaussian(size, rng);
    while (v.norm() == 0.0) v = complex_gaussian(size, rng);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double r = radius * std::pow(unif(rng), 1.0 / (2.0 * static_cast<double>(size)));
    return v * (r / v.norm());
}

/// z complex Gaussian, w~ uniform in the ball of radius w_tilde_radius,
/// w = exp(-mu |z|^2 / 2) w~.
template <class Rng>
DomainPoint sample_member(const DomainParams& params, Rng& rng, double w_tilde_radius = 0.95,
                          double z_scale = 1.0)
{
    CVector z = complex_gaussian(params.n(), rng, z_scale);
    const CVector wt = uniform_complex_ball(params.m(), rng, w_tilde_radius);
    CVector w = wt * std::exp(-0.5 * params.mu() * z.squaredNorm());
    return DomainPoint(params, std::move(z), std::move(w));
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
template <class Rng>
CMatrix random_unitary(Eigen::Index size, Rng& rng)
{
    CMatrix g(size, size);
    for (Eigen::Index j = 0; j < size; ++j) g.col(j) = complex_gaussian(size, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < size; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0.0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

} // namespace fbh
