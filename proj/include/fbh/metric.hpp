// Complex Hessian g_{i jbar} = d^2 Phi / dZ_i dZbar_j of the Kaehler potential,
// its closed-form determinant and automorphism-invariance residuals.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "fbh/core.hpp"

namespace fbh {

/// Pivot tolerance (relative to the largest diagonal entry) for the
/// positive-definiteness test.
inline constexpr double kCholeskyPivotTol = 1e-12;

/// Default finite-difference step for hessian_fd().
inline constexpr double kDefaultFdStep = 1e-4;

/// (n+m) x (n+m) complex matrix indexed by (Z_1, ..., Z_{n+m}) = (z, w);
/// entry (i, j) is d^2 Phi / dZ_i dZbar_j.
class HermitianMatrix {
public:
    explicit HermitianMatrix(CMatrix entries) : a_(std::move(entries))
    {
        if (a_.rows() != a_.cols()) throw std::invalid_argument("HermitianMatrix: not square");
    }

    const CMatrix& matrix() const { return a_; }
    cplx operator()(Eigen::Index i, Eigen::Index j) const { return a_(i, j); }
    Eigen::Index size() const { return a_.rows(); }

    /// max |a(i,j) - conj(a(j,i))|.
    double hermitian_residual() const { return (a_ - a_.adjoint()).cwiseAbs().maxCoeff(); }

    /// Hermitian Cholesky factorisation succeeds with every pivot above
    /// kCholeskyPivotTol times the largest diagonal entry.
    bool is_positive_definite() const
    {
        const CMatrix sym = 0.5 * (a_ + a_.adjoint());
        Eigen::LLT<CMatrix> llt(sym);
        if (llt.info() != Eigen::Success) return false;
        const double scale = sym.diagonal().real().cwiseAbs().maxCoeff();
        const CMatrix l = llt.matrixL();
        for (Eigen::Index i = 0; i < l.rows(); ++i) {
            if (!(std::norm(l(i, i)) > kCholeskyPivotTol * scale)) return false;
        }
        return true;
    }

    /// Real part of det(a); the imaginary part vanishes for Hermitian input.
    double determinant() const { return Eigen::PartialPivLU<CMatrix>(a_).determinant().real(); }

private:
    CMatrix a_;
};

/// Analytic complex Hessian of Phi. With t = |w~|^2, s = 1/(1-t), e = exp(mu|z|^2):
///   zz:  mu (nu + s) delta_ij + mu^2 t s^2 conj(z_i) z_j
///   zw:  mu e s^2 conj(z_i) w_j
///   ww:  e s delta_ij + e^2 s^2 conj(w_i) w_j
inline HermitianMatrix hessian(const DomainParams& params, const DomainPoint& point)
{
    detail::require_owned(params, point);
    const int n = params.n();
    const int m = params.m();
    const double mu = params.mu();
    const double nu = params.nu();
    const CVector& z = point.z();
    const CVector& w = point.w();
    const double t = point.w_tilde_sq();
    const double s = 1.0 / (1.0 - t);
    const double e = std::exp(mu * z.squaredNorm());

    CMatrix h(n + m, n + m);
    h.topLeftCorner(n, n) = (mu * mu * t * s * s) * (z.conjugate() * z.transpose());
    h.topLeftCorner(n, n).diagonal().array() += mu * (nu + s);
    h.topRightCorner(n, m) = (mu * e * s * s) * (z.conjugate() * w.transpose());
    h.bottomLeftCorner(m, n) = h.topRightCorner(n, m).adjoint();
    h.bottomRightCorner(m, m) = (e * e * s * s) * (w.conjugate() * w.transpose());
    h.bottomRightCorner(m, m).diagonal().array() += e * s;
    // Fused multiply-adds can leave last-bit asymmetry in the outer products.
    const CMatrix herm = 0.5 * (h + h.adjoint());
    return HermitianMatrix(herm);
}

/// Finite-difference Hessian from central second differences of potential()
/// in the real coordinates Z_k = x_k + i y_k, combined as
///   d^2/dZ_i dZbar_j = 1/4 (f_{x_i x_j} + f_{y_i y_j}) + i/4 (f_{x_i y_j} - f_{y_i x_j}).
/// z coordinates move by `step`; w coordinates move by step * exp(-mu |z|^2 / 2),
/// i.e. by `step` in units of w~, so the stencil resolves the fibre at any |z|.
/// The real Hessian is formed once and symmetric, so the result is Hermitian.
inline HermitianMatrix hessian_fd(const DomainParams& params, const DomainPoint& point,
                                  double step = kDefaultFdStep)
{
    detail::require_owned(params, point);
    if (!(step > 0.0)) throw std::invalid_argument("hessian_fd: step must be positive");
    const int n = params.n();
    const int dim = params.dim();
    const int real_dim = 2 * dim;
    const double fibre = std::exp(-0.5 * params.mu() * point.z().squaredNorm());

    // Real coordinate vector: (Re Z_0, Im Z_0, Re Z_1, Im Z_1, ...).
    std::vector<double> x0(static_cast<std::size_t>(real_dim));
    std::vector<double> h(static_cast<std::size_t>(real_dim));
    for (int k = 0; k < dim; ++k) {
        const cplx zk = k < n ? point.z()(k) : point.w()(k - n);
        x0[2 * k] = zk.real();
        x0[2 * k + 1] = zk.imag();
        h[2 * k] = h[2 * k + 1] = k < n ? step : step * fibre;
    }

    auto f = [&](const std::vector<double>& x) {
        CVector z(n), w(params.m());
        for (int k = 0; k < dim; ++k) {
            const cplx zk(x[2 * k], x[2 * k + 1]);
            if (k < n) z(k) = zk;
            else w(k - n) = zk;
        }
        try {
            return potential(params, DomainPoint(params, std::move(z), std::move(w)));
        } catch (const std::domain_error&) {
            throw std::domain_error("hessian_fd: step too large, stencil leaves the domain");
        }
    };

    const double f0 = f(x0);
    Eigen::MatrixXd r(real_dim, real_dim);
    std::vector<double> x = x0;
    for (int a = 0; a < real_dim; ++a) {
        x = x0;
        x[a] = x0[a] + h[a];
        const double fp = f(x);
        x[a] = x0[a] - h[a];
        const double fm = f(x);
        r(a, a) = (fp - 2.0 * f0 + fm) / (h[a] * h[a]);
        for (int b = a + 1; b < real_dim; ++b) {
            double acc = 0.0;
            for (int sa : {1, -1}) {
                for (int sb : {1, -1}) {
                    x = x0;
                    x[a] += sa * h[a];
                    x[b] += sb * h[b];
                    acc += sa * sb * f(x);
                }
            }
            r(a, b) = r(b, a) = acc / (4.0 * h[a] * h[b]);
        }
    }

    CMatrix hm(dim, dim);
    const cplx i_unit(0.0, 1.0);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const int xi = 2 * i, yi = 2 * i + 1, xj = 2 * j, yj = 2 * j + 1;
            hm(i, j) = 0.25 * (r(xi, xj) + r(yi, yj)) + 0.25 * i_unit * (r(xi, yj) - r(yi, xj));
        }
    }
    return HermitianMatrix(std::move(hm));
}

/// max |a - b| / max(1, max |b|): entrywise error on the scale of the reference.
inline double scaled_max_error(const CMatrix& a, const CMatrix& b)
{
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

/// mu^n [nu + (1 - |w~|^2)^{-1}]^n / (1 - |w~|^2)^{m+1} * exp(m mu |z|^2).
inline double metric_det(const DomainParams& params, const DomainPoint& point)
{
    detail::require_owned(params, point);
    const double s = 1.0 / (1.0 - point.w_tilde_sq());
    const double n = params.n();
    const double m = params.m();
    const double log_det = n * std::log(params.mu() * (params.nu() + s)) + (m + 1.0) * std::log(s) +
                           m * params.mu() * point.z().squaredNorm();
    return std::exp(log_det);
}

/// max-norm of H(point) - J^T H(image) conj(J), the pullback of the metric
/// along a holomorphic map with Jacobian J(k, i) = dF_k/dZ_i and F(point) = image.
inline double congruence_residual(const DomainParams& params, const DomainPoint& point,
                                  const DomainPoint& image, const CMatrix& jacobian)
{
    const CMatrix here = hessian(params, point).matrix();
    const CMatrix there = hessian(params, image).matrix();
    const CMatrix pulled = jacobian.transpose() * there * jacobian.conjugate();
    return (here - pulled).cwiseAbs().maxCoeff();
}

/// Invariance residual of the metric under phi_a at the point.
inline double check_invariance(const DomainParams& params, const CVector& a,
                               const DomainPoint& point)
{
    const DomainPoint image = apply_translation(params, a, point);
    return congruence_residual(params, point, image, translation_jacobian(params, a, point));
}

/// Invariance residual under phi_U (z -> U z).
inline double check_unitary_z_invariance(const DomainParams& params, const CMatrix& u,
                                         const DomainPoint& point)
{
    const DomainPoint image = apply_unitary_z(params, u, point);
    CMatrix j = CMatrix::Identity(params.dim(), params.dim());
    j.topLeftCorner(params.n(), params.n()) = u;
    return congruence_residual(params, point, image, j);
}

/// Invariance residual under phi_V (w -> V w).
inline double check_unitary_w_invariance(const DomainParams& params, const CMatrix& v,
                                         const DomainPoint& point)
{
    const DomainPoint image = apply_unitary_w(params, v, point);
    CMatrix j = CMatrix::Identity(params.dim(), params.dim());
    j.bottomRightCorner(params.m(), params.m()) = v;
    return congruence_residual(params, point, image, j);
}

} // namespace fbh
