#ifndef CBLB_RANDOM_FIELDS_HPP
#define CBLB_RANDOM_FIELDS_HPP

#include <array>
#include <cstdint>
#include <random>

#include "cblb/operators.hpp"
#include "cblb/spectral_field.hpp"

namespace cblb {

enum class FieldConstraint { none, div_free, zero_mean, zero_x_mode };

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mode_key(std::uint64_t seed, int j1, int j2, int j3, int comp) {
    std::uint64_t h = seed;
    h = splitmix64(h ^ std::uint64_t(std::uint32_t(j1)));
    h = splitmix64(h ^ std::uint64_t(std::uint32_t(j2)));
    h = splitmix64(h ^ std::uint64_t(std::uint32_t(j3)));
    h = splitmix64(h ^ std::uint64_t(std::uint32_t(comp)));
    return h;
}

}  // namespace detail

/// Seeded Hermitian field with |fhat_k| ~ (1+|k|^2)^(-p/2), uniform random
/// phases, supported on the dealiased band. Deterministic in (seed, comp)
/// independent of traversal order.
inline SpectralField random_band_limited(const Grid& g, double decay_exponent,
                                         std::uint64_t seed,
                                         FieldConstraint constraint = FieldConstraint::none,
                                         int comp = 0) {
    if (decay_exponent < 0.0) throw domain_error("random_band_limited: decay_exponent < 0");
    SpectralField f(g);
    int cx = g.nx / 3, cy = g.ny / 3, cz = g.nz / 3;
    for (int j1 = -cx; j1 <= cx; ++j1)
        for (int j2 = -cy; j2 <= cy; ++j2)
            for (int j3 = -cz; j3 <= cz; ++j3) {
                // canonical representative of the conjugate pair
                bool canonical = j1 > 0 || (j1 == 0 && (j2 > 0 || (j2 == 0 && j3 > 0)));
                bool self = j1 == 0 && j2 == 0 && j3 == 0;
                if (!canonical && !self) continue;
                double kx = two_pi * j1 / g.lx, ky = two_pi * j2 / g.ly, kz = two_pi * j3 / g.lz;
                double k2 = kx * kx + ky * ky + kz * kz;
                double amp = std::pow(1.0 + k2, -0.5 * decay_exponent);
                std::mt19937_64 rng(detail::mode_key(seed, j1, j2, j3, comp));
                std::uniform_real_distribution<double> uni(0.0, 1.0);
                if (self) {
                    f.mode(0, 0, 0) = cplx(amp * (2.0 * uni(rng) - 1.0), 0.0);
                } else {
                    double phase = two_pi * uni(rng);
                    cplx v = amp * cplx(std::cos(phase), std::sin(phase));
                    f.mode(j1, j2, j3) = v;
                    f.mode(-j1, -j2, -j3) = std::conj(v);
                }
            }
    switch (constraint) {
        case FieldConstraint::none:
            break;
        case FieldConstraint::zero_mean:
            f.mode(0, 0, 0) = 0.0;
            break;
        case FieldConstraint::zero_x_mode:
            f = project_nonzero(f);
            break;
        case FieldConstraint::div_free:
            throw domain_error("random_band_limited: div_free needs the vector generator");
    }
    return f;
}

/// Divergence-free random velocity triple (Leray projection of three
/// independent band-limited fields).
inline std::array<SpectralField, 3> random_band_limited_divfree(const Grid& g,
                                                                double decay_exponent,
                                                                std::uint64_t seed,
                                                                bool nonzero_modes_only = false) {
    std::array<SpectralField, 3> u = {
        random_band_limited(g, decay_exponent, seed, FieldConstraint::zero_mean, 1),
        random_band_limited(g, decay_exponent, seed, FieldConstraint::zero_mean, 2),
        random_band_limited(g, decay_exponent, seed, FieldConstraint::zero_mean, 3)};
    if (nonzero_modes_only)
        for (auto& c : u) c = project_nonzero(c);
    leray_project(u[0], u[1], u[2], ShearClock{});
    return u;
}

}  // namespace cblb

#endif
