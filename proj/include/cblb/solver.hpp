#ifndef CBLB_SOLVER_HPP
#define CBLB_SOLVER_HPP

#include <array>
#include <cmath>
#include <string>

#include "cblb/operators.hpp"
#include "cblb/random_fields.hpp"
#include "cblb/spectral_field.hpp"

namespace cblb {

struct Params {
    double nu = 1e-2;
    double mu = -1.0;  // <0 means "same as nu"
    double g = 1.0;
    double a = 0.05;
    double b = 0.08;
    double dt = 0.01;
    double t_end = 10.0;
    double eps0 = 0.05;
    double remap_period = -1.0;  // <0 means lx/ly (minimal integer-shift period)

    void validate() const {
        if (!(nu > 0.0 && nu <= 1.0)) throw domain_error("params: nu must be in (0,1]");
        double m = mu_eff();
        if (!(m > 0.0 && m <= 1.0)) throw domain_error("params: mu must be in (0,1]");
        if (!(0.0 < a && a < b && b < 2.0 * a))
            throw domain_error("params: need 0 < a < b < 2a");
        if (!(dt > 0.0)) throw domain_error("params: dt must be positive");
        if (!(t_end > 0.0)) throw domain_error("params: t_end must be positive");
    }
    double mu_eff() const { return mu < 0.0 ? nu : mu; }
    double remap_period_eff(const Grid& g_) const {
        return remap_period < 0.0 ? g_.lx / g_.ly : remap_period;
    }
};

/// Perturbation state: velocity (u1,u2,u3), temperature theta, and the
/// co-evolved zero-mode split u10_hat + u10_tilde = P0 u1.
struct State {
    SpectralField u1, u2, u3, theta;
    SpectralField u10_hat, u10_tilde;
    ShearClock clock;

    explicit State(const Grid& g)
        : u1(g), u2(g), u3(g), theta(g), u10_hat(g), u10_tilde(g) {}

    const Grid& grid() const { return u1.grid(); }

    double velocity_h2() const {
        double s = 0.0;
        for (const SpectralField* f : {&u1, &u2, &u3}) {
            double n = sobolev_norm(*f, 2, clock);
            s += n * n;
        }
        return std::sqrt(s);
    }

    double split_drift() const {
        SpectralField d = u10_hat + u10_tilde - project_zero(u1);
        double denom = l2_norm(project_zero(u1));
        if (denom < 1e-300) return l2_norm(d);
        return l2_norm(d) / denom;
    }
};

struct InitSpec {
    std::string generator = "random";  // zero | single_mode | random | rolls | rolls_noise
    double amp_u = 0.0;
    double amp_theta = 0.0;
    std::uint64_t seed = 1;
    int mode1 = 1, mode2 = 1, mode3 = 1;  // for single_mode
    double decay_exponent = 4.0;
    double noise_frac = 0.2;  // rolls_noise: nonzero-mode H2 relative to roll H2
};

namespace detail {

inline SpectralField periodic_bump_y(const Grid& g) {
    std::vector<double> phys(g.size());
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            double y = g.ly * j / g.ny;
            double b = std::exp(std::cos(two_pi * y / g.ly) - 1.0);
            for (int k = 0; k < g.nz; ++k) phys[g.index(i, j, k)] = b;
        }
    return to_spectral(phys, g);
}

inline void roll_template(const Grid& g, SpectralField& u2, SpectralField& u3) {
    // u2 = cos(2 pi z / lz) * bump(y), u3 chosen so that div = 0 exactly
    std::vector<double> p2(g.size()), p3(g.size());
    for (int j = 0; j < g.ny; ++j) {
        double y = g.ly * j / g.ny;
        double b = std::exp(std::cos(two_pi * y / g.ly) - 1.0);
        double bp = -two_pi / g.ly * std::sin(two_pi * y / g.ly) * b;
        for (int k = 0; k < g.nz; ++k) {
            double z = g.lz * k / g.nz;
            double c = std::cos(two_pi * z / g.lz);
            double cint = g.lz / two_pi * std::sin(two_pi * z / g.lz);
            for (int i = 0; i < g.nx; ++i) {
                p2[g.index(i, j, k)] = c * b;
                p3[g.index(i, j, k)] = -cint * bp;
            }
        }
    }
    u2 = dealias(to_spectral(p2, g));
    u3 = dealias(to_spectral(p3, g));
}

}  // namespace detail

inline State initial_data(const InitSpec& spec, const Grid& g, const Params& params) {
    params.validate();
    if (spec.amp_u < 0.0 || spec.amp_theta < 0.0)
        throw generator_error("initial_data: amplitudes must be nonnegative");
    State st(g);

    if (spec.generator == "zero") {
        if (spec.amp_u > 0.0 || spec.amp_theta > 0.0)
            throw generator_error("initial_data: zero template cannot reach amplitude > 0");
    } else if (spec.generator == "single_mode") {
        st.u2.mode(spec.mode1, spec.mode2, spec.mode3) = cplx(0.5, 0.0);
        st.u2.mode(-spec.mode1, -spec.mode2, -spec.mode3) = cplx(0.5, 0.0);
        st.theta.mode(spec.mode1, spec.mode2, spec.mode3) = cplx(0.5, 0.0);
        st.theta.mode(-spec.mode1, -spec.mode2, -spec.mode3) = cplx(0.5, 0.0);
    } else if (spec.generator == "random") {
        auto u = random_band_limited_divfree(g, spec.decay_exponent, spec.seed);
        st.u1 = dealias(u[0]);
        st.u2 = dealias(u[1]);
        st.u3 = dealias(u[2]);
        st.theta = dealias(random_band_limited(g, spec.decay_exponent, spec.seed + 101,
                                               FieldConstraint::zero_mean));
    } else if (spec.generator == "rolls" || spec.generator == "rolls_noise") {
        detail::roll_template(g, st.u2, st.u3);
        st.theta = product(st.u2, detail::periodic_bump_y(g));
        if (spec.generator == "rolls_noise") {
            auto noise = random_band_limited_divfree(g, spec.decay_exponent, spec.seed, true);
            double roll_h2 = st.velocity_h2();
            double nh2 = 0.0;
            for (const auto& c : noise) {
                double n = sobolev_norm(c, 2, ShearClock{});
                nh2 += n * n;
            }
            double scale = spec.noise_frac * roll_h2 / std::sqrt(nh2);
            st.u1 += dealias(noise[0]) * scale;
            st.u2 += dealias(noise[1]) * scale;
            st.u3 += dealias(noise[2]) * scale;
        }
    } else {
        throw generator_error("initial_data: unknown generator '" + spec.generator + "'");
    }

    leray_project(st.u1, st.u2, st.u3, st.clock);

    double uh2 = st.velocity_h2();
    if (spec.amp_u > 0.0) {
        if (uh2 == 0.0)
            throw generator_error("initial_data: velocity template is zero, amplitude unreachable");
        double s = spec.amp_u / uh2;
        st.u1 *= s;
        st.u2 *= s;
        st.u3 *= s;
    } else {
        st.u1 = SpectralField(g);
        st.u2 = SpectralField(g);
        st.u3 = SpectralField(g);
    }
    double th2 = sobolev_norm(st.theta, 2, st.clock);
    if (spec.amp_theta > 0.0) {
        if (th2 == 0.0)
            throw generator_error("initial_data: theta template is zero, amplitude unreachable");
        st.theta *= spec.amp_theta / th2;
    } else {
        st.theta = SpectralField(g);
    }

    st.u10_hat = SpectralField(g);
    st.u10_tilde = project_zero(st.u1);
    return st;
}

/// Explicit tendencies of the perturbation system: advection, lift-up,
/// buoyancy, and the streak split of the zero mode, with the velocity part
/// Leray-projected. Diffusion is handled by the stepper's integrating factor.
struct Tendencies {
    SpectralField u1, u2, u3, theta;
    SpectralField u10_hat, u10_tilde;
    double umax = 0.0;

    explicit Tendencies(const Grid& g)
        : u1(g), u2(g), u3(g), theta(g), u10_hat(g), u10_tilde(g) {}
};

namespace detail {

/// Pressure projection of the explicit tendency in the shear frame. The
/// effective wavenumber rotates, d(k_eff)/dt = (0,-k1,0), so keeping
/// k_eff(t).u(t) = 0 requires k_eff.T = k1*u2_hat rather than zero.
inline void project_tendency(SpectralField& t1, SpectralField& t2, SpectralField& t3,
                             const SpectralField& u2_state, const ShearClock& clock) {
    const Grid& g = t1.grid();
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                double kx = g.kx(i), ky = eff_ky(g, i, j, clock.s), kz = g.kz(k);
                double k2 = kx * kx + ky * ky + kz * kz;
                cplx excess = kx * t1.at(i, j, k) + ky * t2.at(i, j, k) +
                              kz * t3.at(i, j, k) - kx * u2_state.at(i, j, k);
                excess /= k2;
                t1.at(i, j, k) -= kx * excess;
                t2.at(i, j, k) -= ky * excess;
                t3.at(i, j, k) -= kz * excess;
            }
    zero_nyquist(t1, Axis::x);
    zero_nyquist(t1, Axis::y);
    zero_nyquist(t1, Axis::z);
    zero_nyquist(t2, Axis::x);
    zero_nyquist(t2, Axis::y);
    zero_nyquist(t2, Axis::z);
    zero_nyquist(t3, Axis::x);
    zero_nyquist(t3, Axis::y);
    zero_nyquist(t3, Axis::z);
}

inline SpectralField advection(const std::array<std::vector<double>, 3>& uphys,
                               const SpectralField& f, const ShearClock& clk) {
    const Grid& g = f.grid();
    std::vector<double> acc(g.size(), 0.0);
    for (int ax = 0; ax < 3; ++ax) {
        auto d = to_physical(derivative(f, Axis(ax), clk));
        for (std::size_t n = 0; n < acc.size(); ++n) acc[n] += uphys[ax][n] * d[n];
    }
    return dealias(to_spectral(acc, g));
}

}  // namespace detail

inline Tendencies nonlinear_rhs(const State& st, const Params& params) {
    const Grid& g = st.grid();
    const ShearClock& clk = st.clock;
    Tendencies out(g);

    std::array<std::vector<double>, 3> up = {to_physical(st.u1), to_physical(st.u2),
                                             to_physical(st.u3)};
    for (const auto& comp : up)
        for (double v : comp) out.umax = std::max(out.umax, std::abs(v));

    out.u1 = detail::advection(up, st.u1, clk) * -1.0 - st.u2;
    out.u2 = detail::advection(up, st.u2, clk) * -1.0 + st.theta * params.g;
    out.u3 = detail::advection(up, st.u3, clk) * -1.0;
    out.theta = detail::advection(up, st.theta, clk) * -1.0;

    // forcing is mean-free; pin the means to conserve perturbation momentum
    out.u1.mode(0, 0, 0) = 0.0;
    out.u2.mode(0, 0, 0) = 0.0;
    out.u3.mode(0, 0, 0) = 0.0;
    out.theta.mode(0, 0, 0) = 0.0;
    detail::project_tendency(out.u1, out.u2, out.u3, st.u2, clk);

    // streak split of the zero mode, explicit parts
    SpectralField u20 = project_zero(st.u2), u30 = project_zero(st.u3);
    auto adv0 = [&](const SpectralField& f) {
        return product(u20, derivative(f, Axis::y, clk)) +
               product(u30, derivative(f, Axis::z, clk));
    };
    out.u10_hat = (u20 + adv0(st.u10_hat)) * -1.0;

    SpectralField un1 = project_nonzero(st.u1);
    std::array<std::vector<double>, 3> unp = {to_physical(project_nonzero(st.u1)),
                                              to_physical(project_nonzero(st.u2)),
                                              to_physical(project_nonzero(st.u3))};
    SpectralField self_stretch = project_zero(detail::advection(unp, un1, clk));
    out.u10_tilde = (adv0(st.u10_tilde) + self_stretch) * -1.0;
    out.u10_hat = project_zero(out.u10_hat);
    out.u10_tilde = project_zero(out.u10_tilde);
    return out;
}

/// Full analytic time derivative of u10_hat (diffusion included); E_{1,1}
/// needs this rather than finite differences.
inline SpectralField u10_hat_time_derivative(const State& st, const Params& params) {
    const ShearClock& clk = st.clock;
    SpectralField u20 = project_zero(st.u2), u30 = project_zero(st.u3);
    SpectralField adv = product(u20, derivative(st.u10_hat, Axis::y, clk)) +
                        product(u30, derivative(st.u10_hat, Axis::z, clk));
    return laplacian(st.u10_hat, clk) * params.nu - u20 - adv;
}

/// exp(-d * int_s^{s+h} |k_eff(sigma)|^2 dsigma), applied mode by mode.
inline void apply_diffusion_factor(SpectralField& f, double d, double s, double h) {
    const Grid& g = f.grid();
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            double kx = g.kx(i), ky = g.ky(j);
            double shear_int;
            if (kx == 0.0) {
                shear_int = ky * ky * h;
            } else {
                double e0 = ky - s * kx, e1 = ky - (s + h) * kx;
                shear_int = (e0 * e0 * e0 - e1 * e1 * e1) / (3.0 * kx);
            }
            for (int k = 0; k < g.nz; ++k) {
                double kz = g.kz(k);
                double integral = (kx * kx + kz * kz) * h + shear_int;
                f.at(i, j, k) *= std::exp(-d * integral);
            }
        }
}

/// One IMEX step: explicit Heun on the nonlinear/coupling terms combined with
/// the exact per-mode diffusion factor; Leray projection re-applied at the new
/// clock.
inline State step(const State& st, const Params& params) {
    const Grid& g = st.grid();
    double h = params.dt;
    double s = st.clock.s;
    double mu = params.mu_eff();

    Tendencies k1 = nonlinear_rhs(st, params);
    double dxmin = std::min({g.lx / g.nx, g.ly / g.ny, g.lz / g.nz});
    if (k1.umax > 0.0 && h > 0.5 * dxmin / k1.umax)
        throw step_error("step: CFL violated (|u|max = " + std::to_string(k1.umax) +
                         "); suggested dt = " + std::to_string(0.4 * dxmin / k1.umax));

    auto lift = [&](const SpectralField& f, const SpectralField& tend, double w,
                    double d) {
        SpectralField out = f + tend * w;
        apply_diffusion_factor(out, d, s, h);
        return out;
    };

    State pred(g);
    pred.clock = ShearClock{st.clock.t + h, s + h};
    pred.u1 = lift(st.u1, k1.u1, h, params.nu);
    pred.u2 = lift(st.u2, k1.u2, h, params.nu);
    pred.u3 = lift(st.u3, k1.u3, h, params.nu);
    pred.theta = lift(st.theta, k1.theta, h, mu);
    pred.u10_hat = lift(st.u10_hat, k1.u10_hat, h, params.nu);
    pred.u10_tilde = lift(st.u10_tilde, k1.u10_tilde, h, params.nu);
    leray_project(pred.u1, pred.u2, pred.u3, pred.clock);

    Tendencies k2 = nonlinear_rhs(pred, params);

    State out(g);
    out.clock = pred.clock;
    out.u1 = lift(st.u1, k1.u1, 0.5 * h, params.nu) + k2.u1 * (0.5 * h);
    out.u2 = lift(st.u2, k1.u2, 0.5 * h, params.nu) + k2.u2 * (0.5 * h);
    out.u3 = lift(st.u3, k1.u3, 0.5 * h, params.nu) + k2.u3 * (0.5 * h);
    out.theta = lift(st.theta, k1.theta, 0.5 * h, mu) + k2.theta * (0.5 * h);
    out.u10_hat = lift(st.u10_hat, k1.u10_hat, 0.5 * h, params.nu) + k2.u10_hat * (0.5 * h);
    out.u10_tilde =
        lift(st.u10_tilde, k1.u10_tilde, 0.5 * h, params.nu) + k2.u10_tilde * (0.5 * h);
    leray_project(out.u1, out.u2, out.u3, out.clock);
    out.u10_hat = project_zero(out.u10_hat);
    out.u10_tilde = project_zero(out.u10_tilde);
    return out;
}

/// Rogallo remap: relabel eta -> eta - s*k1 (an exact integer lattice shift),
/// reset clock.s, zero modes shifted out of band and report their energy.
inline State remap(const State& st, double& energy_lost) {
    const Grid& g = st.grid();
    double shift = st.clock.s * g.ly / g.lx;
    long m = std::lround(shift);
    if (std::abs(shift - double(m)) > 1e-9)
        throw remap_error("remap: shear shift " + std::to_string(shift) +
                          " is not an integer lattice shift");
    energy_lost = 0.0;
    State out(g);
    out.clock = ShearClock{st.clock.t, 0.0};
    auto remap_field = [&](const SpectralField& f) {
        SpectralField r(g);
        for (int i = 0; i < g.nx; ++i) {
            int j1 = Grid::wave(i, g.nx);
            for (int j = 0; j < g.ny; ++j) {
                int j2 = Grid::wave(j, g.ny);
                long j2p = j2 - m * j1;
                // the Nyquist row is excluded so conjugate pairs live or die together
                bool keep = j2p > -g.ny / 2 && j2p < g.ny / 2;
                for (int k = 0; k < g.nz; ++k) {
                    const cplx& v = f.at(i, j, k);
                    if (keep)
                        r.mode(j1, int(j2p), Grid::wave(k, g.nz)) = v;
                    else
                        energy_lost += g.volume() * std::norm(v);
                }
            }
        }
        return r;
    };
    out.u1 = remap_field(st.u1);
    out.u2 = remap_field(st.u2);
    out.u3 = remap_field(st.u3);
    out.theta = remap_field(st.theta);
    out.u10_hat = st.u10_hat;
    out.u10_tilde = st.u10_tilde;
    return out;
}

/// One step plus the Rogallo remap when it falls due; remap losses accumulate.
/// The step is shortened when needed so the shear clock lands exactly on the
/// remap time (an integer lattice shift).
inline State advance(const State& st, const Params& params, double& remap_energy_lost) {
    double period = params.remap_period_eff(st.grid());
    double tol = 1e-9 * std::max(1.0, period);
    Params local = params;
    double remaining = period - st.clock.s;
    if (remaining > tol && remaining < local.dt) local.dt = remaining;
    State next = step(st, local);
    if (next.clock.s + tol >= period) {
        double lost = 0.0;
        next = remap(next, lost);
        remap_energy_lost += lost;
    }
    return next;
}

/// Diagnostic pressure solves: lift-up, quadratic, and buoyancy parts.
struct PressureTriple {
    SpectralField n1, n2, n3;
};

inline PressureTriple pressure_solve(const State& st) {
    const Grid& g = st.grid();
    const ShearClock& clk = st.clock;
    PressureTriple p{SpectralField(g), SpectralField(g), SpectralField(g)};

    p.n1 = inverse_laplacian(derivative(st.u2, Axis::x, clk) * -2.0, clk);

    SpectralField src(g);
    std::array<const SpectralField*, 3> u = {&st.u1, &st.u2, &st.u3};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            src -= product(derivative(*u[j], Axis(i), clk), derivative(*u[i], Axis(j), clk));
    src.mode(0, 0, 0) = 0.0;  // zero-mean up to roundoff for div-free u
    p.n2 = inverse_laplacian(src, clk);

    p.n3 = inverse_laplacian(derivative(st.theta, Axis::y, clk), clk);
    return p;
}

/// Interaction-resolved split of the quadratic pressure plus P5 = P^{N1} + P^1.
struct PressureDecomposition {
    SpectralField p0, p1, p2, p3, p4, p5;
};

inline PressureDecomposition pressure_decomposition(const State& st) {
    const Grid& g = st.grid();
    const ShearClock& clk = st.clock;
    auto solve = [&](SpectralField src) {
        src.mode(0, 0, 0) = 0.0;
        return inverse_laplacian(src, clk);
    };

    std::array<SpectralField, 3> u0 = {project_zero(st.u1), project_zero(st.u2),
                                       project_zero(st.u3)};
    std::array<SpectralField, 3> un = {project_nonzero(st.u1), project_nonzero(st.u2),
                                       project_nonzero(st.u3)};

    auto liftup_src = [&](const SpectralField& w) {
        return (product(derivative(w, Axis::y, clk), derivative(un[1], Axis::x, clk)) +
                product(derivative(w, Axis::z, clk), derivative(un[2], Axis::x, clk))) *
               -2.0;
    };

    PressureDecomposition d;
    d.p0 = solve(liftup_src(st.u10_tilde));
    d.p1 = solve(liftup_src(st.u10_hat));

    SpectralField s2(g), s3(g), s4(g);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            s2 -= product(derivative(u0[j], Axis(i), clk), derivative(u0[i], Axis(j), clk));
            s4 -= product(derivative(un[j], Axis(i), clk), derivative(un[i], Axis(j), clk));
        }
    for (int al = 1; al < 3; ++al)
        for (int be = 1; be < 3; ++be)
            s3 -= 2.0 * product(derivative(u0[be], Axis(al), clk),
                                derivative(un[al], Axis(be), clk));
    d.p2 = solve(s2);
    d.p3 = solve(s3);
    d.p4 = solve(s4);

    d.p5 = solve(derivative(st.u2, Axis::x, clk) * -2.0 + liftup_src(st.u10_hat));
    return d;
}

/// h_j: the residual forcing in the u_j equations, j in {2,3}.
inline SpectralField compute_hj(const State& st, int j) {
    if (j != 2 && j != 3) throw domain_error("compute_hj: j must be 2 or 3");
    const Grid& g = st.grid();
    const ShearClock& clk = st.clock;
    const SpectralField& uj = j == 2 ? st.u2 : st.u3;
    SpectralField u20 = project_zero(st.u2), u30 = project_zero(st.u3);

    SpectralField out = product(u20, derivative(uj, Axis::y, clk)) +
                        product(u30, derivative(uj, Axis::z, clk));
    std::array<std::vector<double>, 3> unp = {to_physical(project_nonzero(st.u1)),
                                              to_physical(project_nonzero(st.u2)),
                                              to_physical(project_nonzero(st.u3))};
    out += detail::advection(unp, uj, clk);

    PressureDecomposition d = pressure_decomposition(st);
    Axis ax = j == 2 ? Axis::y : Axis::z;
    out += derivative(d.p0 + d.p2 + d.p3 + d.p4, ax, clk);
    return dealias(out);
}

}  // namespace cblb

#endif
