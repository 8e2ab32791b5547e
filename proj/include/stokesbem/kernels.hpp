#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stokesbem {

// Material/fluid parameters shared by the Lame and Stokes kernels.
// A = mu / (lambda + 2 mu) is the Lame ratio; the Stokes kernels arise in
// the incompressible limit A -> 0 with nu in place of mu.
struct KernelParams {
    int d = 3;
    double nu = 1.0;  // viscosity
    double mu = 1.0;  // shear modulus
    double A = 0.5;   // mu / (lambda + 2 mu)

    double lambda() const { return mu * (1.0 - 2.0 * A) / A; }

    void validate() const {
        if (d != 2 && d != 3)
            throw std::invalid_argument("KernelParams: d must be 2 or 3");
        if (!(nu > 0.0))
            throw std::invalid_argument("KernelParams: nu must be positive");
        if (!(mu > 0.0))
            throw std::invalid_argument("KernelParams: mu must be positive");
        if (!(A > 0.0 && A < 1.0))
            throw std::invalid_argument("KernelParams: A must lie in (0,1)");
    }

    static KernelParams from_lame(int d, double mu, double lambda, double nu = 1.0) {
        KernelParams p;
        p.d = d;
        p.nu = nu;
        p.mu = mu;
        p.A = mu / (lambda + 2.0 * mu);
        return p;
    }
};

// Kernel blocks are at most 3x3 / 3x1; bounded dynamic sizes keep them on the
// stack while allowing runtime d.
using KernelMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using KernelVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

namespace kernels {

// Compile-time-dimension implementations. All take r = x - y and are valid
// for r != 0; the layer constant is 1 / (2 pi (d-1)).
template <int D>
using Vec = Eigen::Matrix<double, D, 1>;
template <int D>
using Mat = Eigen::Matrix<double, D, D>;

template <int D>
constexpr double layer_constant() {
    return 1.0 / (2.0 * std::numbers::pi * (D - 1));
}

// psi(r) = log(1/r) for d=2, 1/r for d=3.
template <int D>
inline double psi(double r) {
    if constexpr (D == 2)
        return -std::log(r);
    else
        return 1.0 / r;
}

// psi as a function of r^2, avoiding the square root in 2D.
template <int D>
inline double psi_sq(double r2) {
    if constexpr (D == 2)
        return -0.5 * std::log(r2);
    else
        return 1.0 / std::sqrt(r2);
}

// 1 / r^d.
template <int D>
inline double inv_rd(double r2) {
    if constexpr (D == 2)
        return 1.0 / r2;
    else
        return 1.0 / (r2 * std::sqrt(r2));
}

// Laplace monopole E_Delta = C psi(r) I.
template <int D>
inline Mat<D> E_delta(const Vec<D>& r) {
    const double r2 = r.squaredNorm();
    return layer_constant<D>() * psi_sq<D>(r2) * Mat<D>::Identity();
}

// Laplace dipole T_Delta = C (r.n) / r^d I.
template <int D>
inline Mat<D> T_delta(const Vec<D>& r, const Vec<D>& n) {
    const double r2 = r.squaredNorm();
    return (layer_constant<D>() * r.dot(n) * inv_rd<D>(r2)) * Mat<D>::Identity();
}

// Lame single-layer kernel E_L = (1/(4 pi (d-1) mu)) [(1+A) psi I + (1-A) r rT / r^d].
template <int D>
inline Mat<D> E_lame(const Vec<D>& r, double mu, double A) {
    const double r2 = r.squaredNorm();
    const double c = 0.5 * layer_constant<D>() / mu;
    return c * ((1.0 + A) * psi_sq<D>(r2) * Mat<D>::Identity() +
                ((1.0 - A) * inv_rd<D>(r2)) * (r * r.transpose()));
}

// Lame double-layer kernel
// T_L = C [ (A/r^d)((r.n) I - r nT + n rT) + (1-A) d (r.n) r rT / r^(d+2) ].
template <int D>
inline Mat<D> T_lame(const Vec<D>& r, const Vec<D>& n, double A) {
    const double r2 = r.squaredNorm();
    const double rd = inv_rd<D>(r2);
    const double rn = r.dot(n);
    Mat<D> out = (A * rd) * (rn * Mat<D>::Identity() - r * n.transpose() +
                             n * r.transpose());
    out += ((1.0 - A) * D * rn * rd / r2) * (r * r.transpose());
    return layer_constant<D>() * out;
}

// Stokeslet E_u = (1/(4 pi (d-1) nu)) [psi I + r rT / r^d].
template <int D>
inline Mat<D> E_u(const Vec<D>& r, double nu) {
    const double r2 = r.squaredNorm();
    const double c = 0.5 * layer_constant<D>() / nu;
    return c * (psi_sq<D>(r2) * Mat<D>::Identity() + inv_rd<D>(r2) * (r * r.transpose()));
}

// Stresslet T_u = C d (r.n) r rT / r^(d+2).
template <int D>
inline Mat<D> T_u(const Vec<D>& r, const Vec<D>& n) {
    const double r2 = r.squaredNorm();
    const double c = layer_constant<D>() * D * r.dot(n) * inv_rd<D>(r2) / r2;
    return c * (r * r.transpose());
}

// Pressure monopole e_p = C r / r^d = -C grad psi.
template <int D>
inline Vec<D> e_p(const Vec<D>& r) {
    const double r2 = r.squaredNorm();
    return (layer_constant<D>() * inv_rd<D>(r2)) * r;
}

// Pressure dipole t_p = 2 nu C [ d (r.n) r / r^(d+2) - n / r^d ].
template <int D>
inline Vec<D> t_p(const Vec<D>& r, const Vec<D>& n, double nu) {
    const double r2 = r.squaredNorm();
    const double rd = inv_rd<D>(r2);
    return (2.0 * nu * layer_constant<D>()) * ((D * r.dot(n) * rd / r2) * r - rd * n);
}

// Rotlet M = C (r nT - n rT) / r^d.
template <int D>
inline Mat<D> M_rotlet(const Vec<D>& r, const Vec<D>& n) {
    const double r2 = r.squaredNorm();
    const double c = layer_constant<D>() * inv_rd<D>(r2);
    return c * (r * n.transpose() - n * r.transpose());
}

// Traction of the stokeslet field: column j is sigma(E_u e_j, e_p.e_j)(r) n_obs
// with sigma(u,p) = 2 nu eps(u) - p I. Closed form: -T_u(r; n_obs), independent
// of nu.
template <int D>
inline Mat<D> stokeslet_stress(const Vec<D>& r, const Vec<D>& n_obs) {
    return -T_u<D>(r, n_obs);
}

// Traction of the stresslet field: column j is sigma(u_j, p_j)(r) n_obs for
// the double-layer pair u_j = T_u(.; n) e_j, p_j = t_p(.; n) . e_j:
//   H = nu C [ (d/r^(d+2)) ((n.q) r rT + (r.q) n rT + (r.n) r qT + (r.n)(r.q) I)
//              + (2/r^d) q nT - (2d(d+2)/r^(d+4)) (r.n)(r.q) r rT ],  q = n_obs.
template <int D>
inline Mat<D> stresslet_stress(const Vec<D>& r, const Vec<D>& n, const Vec<D>& q,
                               double nu) {
    const double r2 = r.squaredNorm();
    const double rd = inv_rd<D>(r2);
    const double rn = r.dot(n);
    const double rq = r.dot(q);
    const double nq = n.dot(q);
    const Mat<D> rr = r * r.transpose();
    Mat<D> out = (D * rd / r2) *
                 (nq * rr + rq * (n * r.transpose()) + rn * (r * q.transpose()) +
                  (rn * rq) * Mat<D>::Identity());
    out += (2.0 * rd) * (q * n.transpose());
    out -= (2.0 * D * (D + 2) * rn * rq * rd / (r2 * r2)) * rr;
    return (nu * layer_constant<D>()) * out;
}

}  // namespace kernels

namespace detail {

inline void check_dim(int d) {
    if (d != 2 && d != 3)
        throw std::invalid_argument("kernel: d must be 2 or 3");
}

inline void check_r(const KernelVector& r, int d) {
    check_dim(d);
    if (r.size() != d)
        throw std::invalid_argument("kernel: argument size does not match d");
    if (r.squaredNorm() == 0.0)
        throw std::domain_error("kernel: evaluation at r = 0");
}

inline void check_rn(const KernelVector& r, const KernelVector& n, int d) {
    check_r(r, d);
    if (n.size() != d)
        throw std::invalid_argument("kernel: direction size does not match d");
}

template <typename F2, typename F3>
auto dispatch(int d, F2&& f2, F3&& f3) {
    return d == 2 ? std::forward<F2>(f2)() : std::forward<F3>(f3)();
}

}  // namespace detail

inline double eval_psi(double r, int d) {
    detail::check_dim(d);
    if (!(r > 0.0))
        throw std::domain_error("eval_psi: r must be positive");
    return d == 2 ? kernels::psi<2>(r) : kernels::psi<3>(r);
}

inline KernelMatrix eval_E_delta(const KernelVector& r, int d) {
    detail::check_r(r, d);
    return detail::dispatch(
        d, [&] { return KernelMatrix(kernels::E_delta<2>(r.head<2>())); },
        [&] { return KernelMatrix(kernels::E_delta<3>(r.head<3>())); });
}

inline KernelMatrix eval_T_delta(const KernelVector& r, const KernelVector& n, int d) {
    detail::check_rn(r, n, d);
    return detail::dispatch(
        d, [&] { return KernelMatrix(kernels::T_delta<2>(r.head<2>(), n.head<2>())); },
        [&] { return KernelMatrix(kernels::T_delta<3>(r.head<3>(), n.head<3>())); });
}

inline KernelMatrix eval_E_lame(const KernelVector& r, const KernelParams& p) {
    p.validate();
    detail::check_r(r, p.d);
    return detail::dispatch(
        p.d, [&] { return KernelMatrix(kernels::E_lame<2>(r.head<2>(), p.mu, p.A)); },
        [&] { return KernelMatrix(kernels::E_lame<3>(r.head<3>(), p.mu, p.A)); });
}

inline KernelMatrix eval_T_lame(const KernelVector& r, const KernelVector& n,
                                const KernelParams& p) {
    p.validate();
    detail::check_rn(r, n, p.d);
    return detail::dispatch(
        p.d,
        [&] { return KernelMatrix(kernels::T_lame<2>(r.head<2>(), n.head<2>(), p.A)); },
        [&] { return KernelMatrix(kernels::T_lame<3>(r.head<3>(), n.head<3>(), p.A)); });
}

inline KernelMatrix eval_E_u(const KernelVector& r, const KernelParams& p) {
    p.validate();
    detail::check_r(r, p.d);
    return detail::dispatch(
        p.d, [&] { return KernelMatrix(kernels::E_u<2>(r.head<2>(), p.nu)); },
        [&] { return KernelMatrix(kernels::E_u<3>(r.head<3>(), p.nu)); });
}

inline KernelMatrix eval_T_u(const KernelVector& r, const KernelVector& n,
                             const KernelParams& p) {
    p.validate();
    detail::check_rn(r, n, p.d);
    return detail::dispatch(
        p.d, [&] { return KernelMatrix(kernels::T_u<2>(r.head<2>(), n.head<2>())); },
        [&] { return KernelMatrix(kernels::T_u<3>(r.head<3>(), n.head<3>())); });
}

inline KernelVector eval_e_p(const KernelVector& r, int d) {
    detail::check_r(r, d);
    return detail::dispatch(d, [&] { return KernelVector(kernels::e_p<2>(r.head<2>())); },
                            [&] { return KernelVector(kernels::e_p<3>(r.head<3>())); });
}

inline KernelVector eval_t_p(const KernelVector& r, const KernelVector& n,
                             const KernelParams& p) {
    p.validate();
    detail::check_rn(r, n, p.d);
    return detail::dispatch(
        p.d, [&] { return KernelVector(kernels::t_p<2>(r.head<2>(), n.head<2>(), p.nu)); },
        [&] { return KernelVector(kernels::t_p<3>(r.head<3>(), n.head<3>(), p.nu)); });
}

inline KernelMatrix eval_M_rotlet(const KernelVector& r, const KernelVector& n, int d) {
    detail::check_rn(r, n, d);
    return detail::dispatch(
        d, [&] { return KernelMatrix(kernels::M_rotlet<2>(r.head<2>(), n.head<2>())); },
        [&] { return KernelMatrix(kernels::M_rotlet<3>(r.head<3>(), n.head<3>())); });
}

inline KernelMatrix eval_stokeslet_stress(const KernelVector& r, const KernelVector& n_obs,
                                          const KernelParams& p) {
    p.validate();
    detail::check_rn(r, n_obs, p.d);
    return detail::dispatch(
        p.d,
        [&] {
            return KernelMatrix(kernels::stokeslet_stress<2>(r.head<2>(), n_obs.head<2>()));
        },
        [&] {
            return KernelMatrix(kernels::stokeslet_stress<3>(r.head<3>(), n_obs.head<3>()));
        });
}

inline KernelMatrix eval_stresslet_stress(const KernelVector& r, const KernelVector& n,
                                          const KernelVector& n_obs,
                                          const KernelParams& p) {
    p.validate();
    detail::check_rn(r, n, p.d);
    if (n_obs.size() != p.d)
        throw std::invalid_argument("kernel: direction size does not match d");
    return detail::dispatch(
        p.d,
        [&] {
            return KernelMatrix(kernels::stresslet_stress<2>(r.head<2>(), n.head<2>(),
                                                             n_obs.head<2>(), p.nu));
        },
        [&] {
            return KernelMatrix(kernels::stresslet_stress<3>(r.head<3>(), n.head<3>(),
                                                             n_obs.head<3>(), p.nu));
        });
}

}  // namespace stokesbem
