#ifndef CBLB_OPERATORS_HPP
#define CBLB_OPERATORS_HPP

#include <array>
#include <cmath>
#include <complex>

#include "cblb/spectral_field.hpp"

namespace cblb {

enum class Axis { x, y, z };

/// Fixed-frame wall-normal wavenumber of the mode stored at (i,j,*).
inline double eff_ky(const Grid& g, int i, int j, double s) {
    return g.ky(j) - s * g.kx(i);
}

/// Fixed-frame |k|^2 of the stored mode under clock shift s.
inline double eff_k2(const Grid& g, int i, int j, int k, double s) {
    double kx = g.kx(i), ky = eff_ky(g, i, j, s), kz = g.kz(k);
    return kx * kx + ky * ky + kz * kz;
}

namespace detail {

/// Zero the Nyquist plane of one axis. Multipliers that are odd in k have no
/// Hermitian-consistent value at the self-conjugate Nyquist index.
inline void zero_nyquist(SpectralField& f, Axis axis) {
    const Grid& g = f.grid();
    if (axis == Axis::x) {
        int i = g.nx / 2;
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k) f.at(i, j, k) = 0.0;
    } else if (axis == Axis::y) {
        int j = g.ny / 2;
        for (int i = 0; i < g.nx; ++i)
            for (int k = 0; k < g.nz; ++k) f.at(i, j, k) = 0.0;
    } else {
        int k = g.nz / 2;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) f.at(i, j, k) = 0.0;
    }
}

}  // namespace detail

/// Fixed-frame partial derivative evaluated in the shear frame:
/// d/dx -> i*k1, d/dy -> i*(eta - s*k1), d/dz -> i*k3.
inline SpectralField derivative(const SpectralField& f, Axis axis, const ShearClock& clock) {
    const Grid& g = f.grid();
    SpectralField out(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k) {
                double m = axis == Axis::x   ? g.kx(i)
                           : axis == Axis::y ? eff_ky(g, i, j, clock.s)
                                             : g.kz(k);
                out.at(i, j, k) = cplx(0.0, m) * f.at(i, j, k);
            }
    detail::zero_nyquist(out, axis);
    if (axis == Axis::y && clock.s != 0.0) detail::zero_nyquist(out, Axis::x);
    return out;
}

inline SpectralField laplacian(const SpectralField& f, const ShearClock& clock) {
    const Grid& g = f.grid();
    SpectralField out(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k)
                out.at(i, j, k) = -eff_k2(g, i, j, k, clock.s) * f.at(i, j, k);
    return out;
}

inline SpectralField inverse_laplacian(const SpectralField& f, const ShearClock& clock) {
    const Grid& g = f.grid();
    double norm2 = 0.0;
    for (const auto& v : f.coeffs()) norm2 += std::norm(v);
    double norm = std::sqrt(norm2);
    if (std::abs(f.at(0, 0, 0)) > 1e-12 * norm && norm > 0.0)
        throw mean_error("inverse_laplacian: source has nonzero mean " +
                         std::to_string(std::abs(f.at(0, 0, 0))));
    SpectralField out(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                out.at(i, j, k) = f.at(i, j, k) / -eff_k2(g, i, j, k, clock.s);
            }
    out.at(0, 0, 0) = 0.0;
    return out;
}

/// 2/3-rule truncation: zero coefficients with |j| > n/3 on any axis.
inline SpectralField dealias(const SpectralField& f) {
    const Grid& g = f.grid();
    SpectralField out = f;
    int cx = g.nx / 3, cy = g.ny / 3, cz = g.nz / 3;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k)
                if (std::abs(Grid::wave(i, g.nx)) > cx || std::abs(Grid::wave(j, g.ny)) > cy ||
                    std::abs(Grid::wave(k, g.nz)) > cz)
                    out.at(i, j, k) = 0.0;
    return out;
}

/// P0: keep only k1 = 0 modes (x-average).
inline SpectralField project_zero(const SpectralField& f) {
    const Grid& g = f.grid();
    SpectralField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int k = 0; k < g.nz; ++k) out.at(0, j, k) = f.at(0, j, k);
    return out;
}

/// P_neq: keep only k1 != 0 modes.
inline SpectralField project_nonzero(const SpectralField& f) {
    SpectralField out = f;
    const Grid& g = f.grid();
    for (int j = 0; j < g.ny; ++j)
        for (int k = 0; k < g.nz; ++k) out.at(0, j, k) = 0.0;
    return out;
}

/// Fixed-frame Sobolev norm (vol * sum_k (1+|k|^2)^order |fhat_k|^2)^(1/2).
inline double sobolev_norm(const SpectralField& f, int order, const ShearClock& clock) {
    if (order < 0 || order > 4)
        throw domain_error("sobolev_norm: order must be in {0,...,4}, got " +
                           std::to_string(order));
    const Grid& g = f.grid();
    double acc = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k) {
                double w = 1.0 + eff_k2(g, i, j, k, clock.s);
                double wp = 1.0;
                for (int p = 0; p < order; ++p) wp *= w;
                acc += wp * std::norm(f.at(i, j, k));
            }
    return std::sqrt(g.volume() * acc);
}

inline double l2_norm(const SpectralField& f) { return sobolev_norm(f, 0, ShearClock{}); }

/// L2 norm of the fixed-frame gradient, vol^(1/2) (sum |k|^2 |fhat|^2)^(1/2).
inline double grad_l2_norm(const SpectralField& f, const ShearClock& clock) {
    const Grid& g = f.grid();
    double acc = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k)
                acc += eff_k2(g, i, j, k, clock.s) * std::norm(f.at(i, j, k));
    return std::sqrt(g.volume() * acc);
}

/// Pointwise product in physical space, transformed back and dealiased.
inline SpectralField product(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid())) throw shape_error("product: grids differ");
    std::vector<double> pa = to_physical(a), pb = to_physical(b);
    for (std::size_t n = 0; n < pa.size(); ++n) pa[n] *= pb[n];
    return dealias(to_spectral(pa, a.grid()));
}

/// Leray projection with clock-corrected wavenumbers; the spatial mean is kept.
inline void leray_project(SpectralField& u1, SpectralField& u2, SpectralField& u3,
                          const ShearClock& clock) {
    const Grid& g = u1.grid();
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                double kx = g.kx(i), ky = eff_ky(g, i, j, clock.s), kz = g.kz(k);
                double k2 = kx * kx + ky * ky + kz * kz;
                cplx div = kx * u1.at(i, j, k) + ky * u2.at(i, j, k) + kz * u3.at(i, j, k);
                div /= k2;
                u1.at(i, j, k) -= kx * div;
                u2.at(i, j, k) -= ky * div;
                u3.at(i, j, k) -= kz * div;
            }
    detail::zero_nyquist(u1, Axis::x);
    detail::zero_nyquist(u1, Axis::y);
    detail::zero_nyquist(u1, Axis::z);
    detail::zero_nyquist(u2, Axis::x);
    detail::zero_nyquist(u2, Axis::y);
    detail::zero_nyquist(u2, Axis::z);
    detail::zero_nyquist(u3, Axis::x);
    detail::zero_nyquist(u3, Axis::y);
    detail::zero_nyquist(u3, Axis::z);
}

/// L2 norm of div(u) with clock-corrected derivatives.
inline double divergence_l2(const SpectralField& u1, const SpectralField& u2,
                            const SpectralField& u3, const ShearClock& clock) {
    const Grid& g = u1.grid();
    double acc = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k) {
                double kx = g.kx(i), ky = eff_ky(g, i, j, clock.s), kz = g.kz(k);
                cplx div = cplx(0.0, 1.0) * (kx * u1.at(i, j, k) + ky * u2.at(i, j, k) +
                                             kz * u3.at(i, j, k));
                acc += std::norm(div);
            }
    return std::sqrt(g.volume() * acc);
}

}  // namespace cblb

#endif
