// Domain parameters, points of D_{n,m}(mu) = { (z, w) : |w|^2 < exp(-mu |z|^2) },
// the Kaehler potential and the explicit automorphism families.
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fbh {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Points closer than this to the boundary (in 1 - |w~|^2) are not accepted
/// as DomainPoint instances.
inline constexpr double kBoundaryGuard = 1e-14;

/// Operator-norm tolerance on U^H U - I.
inline constexpr double kUnitaryTol = 1e-12;

/// The tuple (n, m, mu, nu) fixing the domain and the metric g(mu; nu).
class DomainParams {
public:
    DomainParams(int n, int m, double mu, double nu) : n_(n), m_(m), mu_(mu), nu_(nu)
    {
        if (n < 1) throw std::invalid_argument("DomainParams: n must be >= 1");
        if (m < 1) throw std::invalid_argument("DomainParams: m must be >= 1");
        if (!(mu > 0.0) || !std::isfinite(mu))
            throw std::invalid_argument("DomainParams: mu must be positive");
        if (!(nu > -1.0) || !std::isfinite(nu))
            throw std::invalid_argument("DomainParams: nu must be > -1");
    }

    int n() const { return n_; }
    int m() const { return m_; }
    double mu() const { return mu_; }
    double nu() const { return nu_; }
    int dim() const { return n_ + m_; }

    bool operator==(const DomainParams&) const = default;

private:
    int n_;
    int m_;
    double mu_;
    double nu_;
};

inline void check_dims(const DomainParams& params, const CVector& z, const CVector& w)
{
    if (z.size() != params.n() || w.size() != params.m()) {
        throw std::invalid_argument("dimension mismatch: expected (n, m) = (" +
                                    std::to_string(params.n()) + ", " +
                                    std::to_string(params.m()) + "), got (" +
                                    std::to_string(z.size()) + ", " +
                                    std::to_string(w.size()) + ")");
    }
}

/// Strict membership test |w|^2 < exp(-mu |z|^2).
inline bool contains(const DomainParams& params, const CVector& z, const CVector& w)
{
    check_dims(params, z, w);
    return w.squaredNorm() < std::exp(-params.mu() * z.squaredNorm());
}

/// |w~|^2 = exp(mu |z|^2) |w|^2 without forming w~.
inline double reduced_norm_sq(double mu, const CVector& z, const CVector& w)
{
    const double ws = w.squaredNorm();
    if (ws == 0.0) return 0.0;
    return std::exp(mu * z.squaredNorm() + std::log(ws));
}

/// A member of D_{n,m}(mu). Construction certifies membership.
class DomainPoint {
public:
    DomainPoint(const DomainParams& params, CVector z, CVector w)
        : params_(params), z_(std::move(z)), w_(std::move(w))
    {
        check_dims(params_, z_, w_);
        if (!z_.allFinite() || !w_.allFinite())
            throw std::invalid_argument("DomainPoint: non-finite coordinates");
        if (!contains(params_, z_, w_))
            throw std::domain_error("DomainPoint: point is not in D_{n,m}(mu)");
        w_tilde_sq_ = reduced_norm_sq(params_.mu(), z_, w_);
        if (!(1.0 - w_tilde_sq_ > kBoundaryGuard))
            throw std::domain_error("DomainPoint: point lies on the boundary to working precision");
    }

    const DomainParams& params() const { return params_; }
    const CVector& z() const { return z_; }
    const CVector& w() const { return w_; }
    /// |w~|^2 = exp(mu |z|^2) |w|^2, always in [0, 1).
    double w_tilde_sq() const { return w_tilde_sq_; }

private:
    DomainParams params_;
    CVector z_;
    CVector w_;
    double w_tilde_sq_ = 0.0;
};

/// w~ = exp(mu |z|^2 / 2) w, the fibre coordinate rescaled onto the unit ball.
struct ReducedCoordinate {
    CVector w_tilde;
    double norm_sq() const { return w_tilde.squaredNorm(); }
};

namespace detail {
inline void require_owned(const DomainParams& params, const DomainPoint& point)
{
    if (!(point.params() == params))
        throw std::invalid_argument("point was certified against different domain parameters");
}
} // namespace detail

inline ReducedCoordinate reduced_w(const DomainParams& params, const DomainPoint& point)
{
    detail::require_owned(params, point);
    const double scale = std::exp(0.5 * params.mu() * point.z().squaredNorm());
    return {point.w() * scale};
}

/// Phi = nu mu |z|^2 - ln(exp(-mu |z|^2) - |w|^2), evaluated literally.
inline double potential_direct(const DomainParams& params, const DomainPoint& point)
{
    detail::require_owned(params, point);
    const double zs = point.z().squaredNorm();
    return params.nu() * params.mu() * zs -
           std::log(std::exp(-params.mu() * zs) - point.w().squaredNorm());
}

/// Phi = mu (nu + 1) |z|^2 - ln(1 - |w~|^2). Stable for large |z|.
inline double potential(const DomainParams& params, const DomainPoint& point)
{
    detail::require_owned(params, point);
    const double zs = point.z().squaredNorm();
    return params.mu() * (params.nu() + 1.0) * zs - std::log1p(-point.w_tilde_sq());
}

/// Largest |eigenvalue| of U^H U - I.
inline double unitarity_residual(const CMatrix& u)
{
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    const CMatrix r = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(r, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline void require_unitary(const CMatrix& u, Eigen::Index size, const char* who)
{
    if (u.rows() != size || u.cols() != size)
        throw std::invalid_argument(std::string(who) + ": matrix has wrong shape");
    if (!(unitarity_residual(u) <= kUnitaryTol))
        throw std::invalid_argument(std::string(who) + ": matrix is not unitary");
}

/// (z, w) -> (U z, w).
inline DomainPoint apply_unitary_z(const DomainParams& params, const CMatrix& u,
                                   const DomainPoint& point)
{
    detail::require_owned(params, point);
    require_unitary(u, params.n(), "apply_unitary_z");
    return DomainPoint(params, u * point.z(), point.w());
}

/// (z, w) -> (z, V w).
inline DomainPoint apply_unitary_w(const DomainParams& params, const CMatrix& v,
                                   const DomainPoint& point)
{
    detail::require_owned(params, point);
    require_unitary(v, params.m(), "apply_unitary_w");
    return DomainPoint(params, point.z(), v * point.w());
}

/// exp(mu <z, a> - mu/2 |a|^2), the fibre multiplier of phi_a. <z, a> = sum z_i conj(a_i).
inline cplx translation_factor(const DomainParams& params, const CVector& a, const CVector& z)
{
    const cplx za = a.dot(z);
    return std::exp(params.mu() * za - 0.5 * params.mu() * a.squaredNorm());
}

/// phi_a : (z, w) -> (z - a, exp(mu <z, a> - mu/2 |a|^2) w).
inline DomainPoint apply_translation(const DomainParams& params, const CVector& a,
                                     const DomainPoint& point)
{
    detail::require_owned(params, point);
    if (a.size() != params.n())
        throw std::invalid_argument("apply_translation: a must have length n");
    const cplx c = translation_factor(params, a, point.z());
    return DomainPoint(params, point.z() - a, c * point.w());
}

/// Holomorphic Jacobian J(k, i) = dF_k / dZ_i of phi_a at the point.
inline CMatrix translation_jacobian(const DomainParams& params, const CVector& a,
                                    const DomainPoint& point)
{
    detail::require_owned(params, point);
    if (a.size() != params.n())
        throw std::invalid_argument("translation_jacobian: a must have length n");
    const int n = params.n();
    const int m = params.m();
    const cplx c = translation_factor(params, a, point.z());
    CMatrix j = CMatrix::Zero(n + m, n + m);
    j.topLeftCorner(n, n).setIdentity();
    // d/dz_i of c(z) w_l = mu conj(a_i) c w_l
    j.bottomLeftCorner(m, n) = (params.mu() * c) * point.w() * a.adjoint();
    j.bottomRightCorner(m, m) = c * CMatrix::Identity(m, m);
    return j;
}

/// det(dF/dZ) of phi_a at the point: exp(m mu <z, a> - m mu/2 |a|^2).
inline cplx translation_jacobian_det(const DomainParams& params, const CVector& a,
                                     const DomainPoint& point)
{
    detail::require_owned(params, point);
    if (a.size() != params.n())
        throw std::invalid_argument("translation_jacobian_det: a must have length n");
    const cplx za = a.dot(point.z());
    const double m = params.m();
    return std::exp(m * params.mu() * za - 0.5 * m * params.mu() * a.squaredNorm());
}

} // namespace fbh
