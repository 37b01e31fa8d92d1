#ifndef CBLB_GRID_HPP
#define CBLB_GRID_HPP

#include <cstddef>
#include <numbers>
#include <string>

#include "cblb/errors.hpp"

namespace cblb {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Shear-periodic spectral box. Collocation counts are even and >= 4 per axis;
/// wavenumbers on axis of length L are k = 2*pi*j/L with j in {-n/2+1,...,n/2}.
struct Grid {
    int nx = 0, ny = 0, nz = 0;
    double lx = two_pi, ly = 4.0 * two_pi, lz = two_pi;

    Grid() = default;
    Grid(int nx_, int ny_, int nz_, double lx_ = two_pi, double ly_ = 4.0 * two_pi,
         double lz_ = two_pi)
        : nx(nx_), ny(ny_), nz(nz_), lx(lx_), ly(ly_), lz(lz_) {
        auto check = [](int n, const char* name) {
            if (n < 4 || n % 2 != 0)
                throw shape_error(std::string("grid axis ") + name +
                                  " must be even and >= 4, got " + std::to_string(n));
        };
        check(nx, "nx");
        check(ny, "ny");
        check(nz, "nz");
        if (lx <= 0 || ly <= 0 || lz <= 0) throw shape_error("box periods must be positive");
    }

    std::size_t size() const { return std::size_t(nx) * ny * nz; }
    double volume() const { return lx * ly * lz; }

    std::size_t index(int i, int j, int k) const {
        return (std::size_t(i) * ny + j) * nz + k;
    }

    /// Integer wavenumber for storage index i on an n-point axis.
    static int wave(int i, int n) { return i <= n / 2 ? i : i - n; }
    /// Storage index for integer wavenumber j (must lie in the resolved band).
    static int unwave(int j, int n) { return j >= 0 ? j : j + n; }
    static bool in_band(int j, int n) { return j > -n / 2 && j <= n / 2; }

    double kx(int i) const { return two_pi * wave(i, nx) / lx; }
    double ky(int j) const { return two_pi * wave(j, ny) / ly; }
    double kz(int k) const { return two_pi * wave(k, nz) / lz; }

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz && lx == o.lx && ly == o.ly && lz == o.lz;
    }
};

/// Shear-frame clock: absolute time t and time s since the last remap.
/// A mode stored at (k1, eta, k3) has fixed-frame wall-normal wavenumber
/// eta_eff = eta - s*k1.
struct ShearClock {
    double t = 0.0;
    double s = 0.0;
};

}  // namespace cblb

#endif
