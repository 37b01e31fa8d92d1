#ifndef CBLB_SPECTRAL_FIELD_HPP
#define CBLB_SPECTRAL_FIELD_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cblb/errors.hpp"
#include "cblb/fft.hpp"
#include "cblb/grid.hpp"

namespace cblb {

using cplx = std::complex<double>;

/// Fourier coefficients of one real scalar field on the shear-periodic box,
/// normalized so that f(x) = sum_k fhat_k exp(i k.x). Real fields satisfy
/// coeff(-k) = conj(coeff(k)).
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(const Grid& g) : grid_(g), c_(g.size(), cplx(0.0, 0.0)) {}

    const Grid& grid() const { return grid_; }
    std::vector<cplx>& coeffs() { return c_; }
    const std::vector<cplx>& coeffs() const { return c_; }

    cplx& at(int i, int j, int k) { return c_[grid_.index(i, j, k)]; }
    const cplx& at(int i, int j, int k) const { return c_[grid_.index(i, j, k)]; }

    /// Coefficient addressed by integer wavenumbers.
    cplx& mode(int j1, int j2, int j3) {
        return c_[grid_.index(Grid::unwave(j1, grid_.nx), Grid::unwave(j2, grid_.ny),
                              Grid::unwave(j3, grid_.nz))];
    }
    const cplx& mode(int j1, int j2, int j3) const {
        return c_[grid_.index(Grid::unwave(j1, grid_.nx), Grid::unwave(j2, grid_.ny),
                              Grid::unwave(j3, grid_.nz))];
    }

    SpectralField& operator+=(const SpectralField& o) {
        for (std::size_t n = 0; n < c_.size(); ++n) c_[n] += o.c_[n];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        for (std::size_t n = 0; n < c_.size(); ++n) c_[n] -= o.c_[n];
        return *this;
    }
    SpectralField& operator*=(double a) {
        for (auto& v : c_) v *= a;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

private:
    Grid grid_;
    std::vector<cplx> c_;
};

/// Symmetrize coefficients so that coeff(-k) = conj(coeff(k)) holds exactly.
inline void enforce_hermitian(SpectralField& f) {
    const Grid& g = f.grid();
    for (int i = 0; i < g.nx; ++i) {
        int im = i == 0 ? 0 : g.nx - i;
        for (int j = 0; j < g.ny; ++j) {
            int jm = j == 0 ? 0 : g.ny - j;
            for (int k = 0; k < g.nz; ++k) {
                int km = k == 0 ? 0 : g.nz - k;
                std::size_t a = g.index(i, j, k), b = g.index(im, jm, km);
                if (a > b) continue;
                cplx va = f.coeffs()[a], vb = f.coeffs()[b];
                cplx avg = 0.5 * (va + std::conj(vb));
                f.coeffs()[a] = avg;
                f.coeffs()[b] = std::conj(avg);
            }
        }
    }
}

inline double max_abs(const SpectralField& f) {
    double m = 0.0;
    for (const auto& v : f.coeffs()) m = std::max(m, std::abs(v));
    return m;
}

inline bool is_hermitian(const SpectralField& f, double rel_tol = 1e-12) {
    const Grid& g = f.grid();
    double scale = max_abs(f);
    if (scale == 0.0) return true;
    for (int i = 0; i < g.nx; ++i) {
        int im = i == 0 ? 0 : g.nx - i;
        for (int j = 0; j < g.ny; ++j) {
            int jm = j == 0 ? 0 : g.ny - j;
            for (int k = 0; k < g.nz; ++k) {
                int km = k == 0 ? 0 : g.nz - k;
                cplx d = f.at(i, j, k) - std::conj(f.at(im, jm, km));
                if (std::abs(d) > rel_tol * scale) return false;
            }
        }
    }
    return true;
}

/// Forward transform of a real collocation array (row-major x,y,z).
inline SpectralField to_spectral(const std::vector<double>& phys, const Grid& g) {
    if (phys.size() != g.size())
        throw shape_error("to_spectral: array size " + std::to_string(phys.size()) +
                          " does not match grid size " + std::to_string(g.size()));
    SpectralField f(g);
    for (std::size_t n = 0; n < phys.size(); ++n) f.coeffs()[n] = cplx(phys[n], 0.0);
    detail::FftPlans::get(g.nx, g.ny, g.nz).forward(f.coeffs().data());
    double inv = 1.0 / double(g.size());
    for (auto& v : f.coeffs()) v *= inv;
    enforce_hermitian(f);
    return f;
}

/// Inverse transform; the imaginary residue must be below 1e-12 of the field
/// scale and is discarded.
inline std::vector<double> to_physical(const SpectralField& f) {
    const Grid& g = f.grid();
    std::vector<cplx> buf = f.coeffs();
    detail::FftPlans::get(g.nx, g.ny, g.nz).backward(buf.data());
    double scale = 0.0, im_max = 0.0;
    for (const auto& v : buf) {
        scale = std::max(scale, std::abs(v));
        im_max = std::max(im_max, std::abs(v.imag()));
    }
    if (scale > 0.0 && im_max > 1e-12 * scale)
        throw symmetry_error("to_physical: Hermitian symmetry broken, |Im|/|f| = " +
                             std::to_string(im_max / scale));
    std::vector<double> out(g.size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = buf[n].real();
    return out;
}

}  // namespace cblb

#endif
