#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "cblb/solver.hpp"

using namespace cblb;

namespace {

double field_max_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.coeffs().size(); ++n)
        m = std::max(m, std::abs(a.coeffs()[n] - b.coeffs()[n]));
    return m;
}

State random_small_state(const Grid& g, const Params& p, double amp, unsigned seed) {
    InitSpec spec;
    spec.generator = "random";
    spec.amp_u = amp;
    spec.amp_theta = amp;
    spec.seed = seed;
    return initial_data(spec, g, p);
}

}  // namespace

TEST_CASE("initial_data: zero amplitude gives the zero state") {
    Grid g(8, 8, 8);
    Params p;
    InitSpec spec;
    spec.generator = "zero";
    State st = initial_data(spec, g, p);
    CHECK(max_abs(st.u1) == 0.0);
    CHECK(max_abs(st.theta) == 0.0);
    CHECK(max_abs(st.u10_tilde) == 0.0);

    spec.amp_u = 1.0;
    CHECK_THROWS_AS(initial_data(spec, g, p), generator_error);
}

TEST_CASE("initial_data: roll template is divergence-free to 1e-10") {
    Grid g(16, 32, 16);
    Params p;
    InitSpec spec;
    spec.generator = "rolls";
    spec.amp_u = 0.5;
    State st = initial_data(spec, g, p);
    double div = divergence_l2(st.u1, st.u2, st.u3, st.clock);
    double gradn = grad_l2_norm(st.u2, st.clock) + grad_l2_norm(st.u3, st.clock);
    CHECK(div <= 1e-10 * gradn);
    CHECK(st.velocity_h2() == Catch::Approx(0.5).epsilon(1e-6));
    // streak split starts with the hat part empty
    CHECK(max_abs(st.u10_hat) == 0.0);
    CHECK(field_max_diff(st.u10_tilde, project_zero(st.u1)) == 0.0);
}

TEST_CASE("initial_data: small-amplitude scaling A_u = eps*nu lands exactly") {
    Grid g(16, 16, 16);
    Params p;
    p.nu = 1e-3;
    InitSpec spec;
    spec.generator = "random";
    spec.amp_u = 0.01 * p.nu;  // eps = 0.01
    spec.amp_theta = 0.01 * p.nu * p.nu;
    State st = initial_data(spec, g, p);
    CHECK(std::abs(st.velocity_h2() - 1e-5) < 1e-11);
    CHECK(std::abs(sobolev_norm(st.theta, 2, st.clock) - 1e-8) < 1e-14);
}

TEST_CASE("nonlinear_rhs: zero state gives zero tendencies") {
    Grid g(8, 8, 8);
    Params p;
    State st(g);
    Tendencies t = nonlinear_rhs(st, p);
    CHECK(max_abs(t.u1) == 0.0);
    CHECK(max_abs(t.u2) == 0.0);
    CHECK(max_abs(t.theta) == 0.0);
    CHECK(max_abs(t.u10_hat) == 0.0);
}

TEST_CASE("nonlinear_rhs: lift-up term appears as -u2 - grad P^N1") {
    Grid g(16, 16, 16, two_pi, two_pi, two_pi);
    Params p;
    State st(g);
    // u2 = cos(x): divergence-free single mode, no self-advection
    st.u2.mode(1, 0, 0) = cplx(0.5, 0.0);
    st.u2.mode(-1, 0, 0) = cplx(0.5, 0.0);
    Tendencies t = nonlinear_rhs(st, p);

    PressureTriple pr = pressure_solve(st);
    SpectralField expected1 = st.u2 * -1.0 - derivative(pr.n1, Axis::x, st.clock);
    SpectralField expected2 = derivative(pr.n1, Axis::y, st.clock) * -1.0;
    CHECK(field_max_diff(t.u1, expected1) < 1e-13);
    CHECK(field_max_diff(t.u2, expected2) < 1e-13);
}

TEST_CASE("nonlinear_rhs: tendency keeps the divergence invariant") {
    Grid g(16, 16, 16);
    Params p;
    p.nu = 0.05;
    State st = random_small_state(g, p, 0.3, 5);
    st.clock = ShearClock{0.4, 0.4};
    leray_project(st.u1, st.u2, st.u3, st.clock);
    Tendencies t = nonlinear_rhs(st, p);
    // d/dt (k_eff . u) = k_eff . T - k1 u2 must vanish mode by mode
    double resid = 0.0, scale = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k) {
                double kx = g.kx(i), ky = eff_ky(g, i, j, st.clock.s), kz = g.kz(k);
                cplx r = kx * t.u1.at(i, j, k) + ky * t.u2.at(i, j, k) +
                         kz * t.u3.at(i, j, k) - kx * st.u2.at(i, j, k);
                resid = std::max(resid, std::abs(r));
                scale = std::max(scale, std::abs(t.u2.at(i, j, k)));
            }
    CHECK(resid <= 1e-10 * std::max(scale, 1e-30));
}

TEST_CASE("step: pure diffusion of a shear-free mode") {
    Grid g(8, 8, 8, two_pi, two_pi, two_pi);
    Params p;
    p.nu = 0.1;
    p.dt = 1.0;
    State st(g);
    st.theta.mode(0, 0, 1) = cplx(0.5, 0.0);
    st.theta.mode(0, 0, -1) = cplx(0.5, 0.0);
    State out = step(st, p);
    CHECK(out.theta.mode(0, 0, 1).real() ==
          Catch::Approx(0.5 * std::exp(-0.1)).epsilon(1e-12));
    CHECK(out.clock.t == Catch::Approx(1.0));
}

TEST_CASE("step: Kelvin shear-diffusion closed form, with and without remap") {
    // mode (k1,eta,k3) = (1,0,0): amplitude(t) = exp(-nu (t + t^3/3))
    Params p;
    p.nu = 1e-3;
    p.dt = 0.05;
    p.g = 0.0;  // passive scalar: no buoyancy feedback into the velocity
    double t_final = 10.0;
    double exact = std::exp(-p.nu * (t_final + std::pow(t_final, 3) / 3.0));

    SECTION("no remap") {
        Grid g(8, 8, 8, two_pi, two_pi, two_pi);
        p.remap_period = 1e9;
        State st(g);
        st.theta.mode(1, 0, 0) = cplx(0.5, 0.0);
        st.theta.mode(-1, 0, 0) = cplx(0.5, 0.0);
        int n = int(std::round(t_final / p.dt));
        for (int i = 0; i < n; ++i) st = step(st, p);
        double amp = std::abs(st.theta.mode(1, 0, 0)) / 0.5;
        CHECK(std::abs(amp - exact) <= 1e-6 * exact);
    }
    SECTION("with remap every s = 1") {
        Grid g(8, 32, 8, two_pi, two_pi, two_pi);
        p.remap_period = 1.0;
        State st(g);
        st.theta.mode(1, 0, 0) = cplx(0.5, 0.0);
        st.theta.mode(-1, 0, 0) = cplx(0.5, 0.0);
        double lost = 0.0;
        int n = int(std::round(t_final / p.dt));
        for (int i = 0; i < n; ++i) st = advance(st, p, lost);
        CHECK(lost == 0.0);
        // after 10 remaps the label sits at eta = -10
        double amp = std::abs(st.theta.mode(1, -10, 0)) / 0.5;
        CHECK(std::abs(amp - exact) <= 1e-6 * exact);
    }
}

TEST_CASE("step: zero state stays zero; CFL violation reports a dt") {
    Grid g(8, 8, 8);
    Params p;
    State st(g);
    State out = step(st, p);
    CHECK(max_abs(out.u1) == 0.0);
    CHECK(max_abs(out.theta) == 0.0);

    Params fast;
    fast.dt = 10.0;
    State big(g);
    big.u2.mode(0, 0, 1) = cplx(2.0, 0.0);
    big.u2.mode(0, 0, -1) = cplx(2.0, 0.0);
    CHECK_THROWS_AS(step(big, fast), step_error);
}

TEST_CASE("remap: relabeling, invariance of zero modes, energy bookkeeping") {
    Grid g(8, 8, 8, two_pi, two_pi, two_pi);
    State st(g);
    st.u1.mode(1, 2, 0) = cplx(0.3, 0.1);
    st.u1.mode(-1, -2, 0) = cplx(0.3, -0.1);
    st.theta.mode(0, 1, 1) = cplx(0.2, 0.0);
    st.theta.mode(0, -1, -1) = cplx(0.2, 0.0);
    st.u1.mode(2, -3, 0) = cplx(0.05, 0.0);  // shifts to eta = -5 > band edge? stays
    st.u1.mode(-2, 3, 0) = cplx(0.05, 0.0);
    st.clock = ShearClock{1.0, 1.0};

    double before = 0.0;
    for (const auto& v : st.u1.coeffs()) before += g.volume() * std::norm(v);
    double lost = 0.0;
    State out = remap(st, lost);
    CHECK(out.clock.s == 0.0);
    CHECK(out.theta.mode(0, 1, 1) == cplx(0.2, 0.0));              // k1 = 0 unchanged
    CHECK(out.u1.mode(1, 1, 0) == cplx(0.3, 0.1));                 // eta 2 -> 1
    CHECK(std::abs(out.u1.mode(2, -5, 0)) == Catch::Approx(0.0));  // out of band, zeroed
    double after = 0.0;
    for (const auto& v : out.u1.coeffs()) after += g.volume() * std::norm(v);
    CHECK(before == Catch::Approx(after + lost).epsilon(1e-14));

    State bad(g);
    bad.clock = ShearClock{0.5, 0.5};
    double l2 = 0.0;
    CHECK_THROWS_AS(remap(bad, l2), remap_error);
}

TEST_CASE("lift-up oracle: u_{1,0}(t) = -delta t exp(-nu kz^2 t) cos(kz z)") {
    Grid g(8, 8, 16, two_pi, two_pi, two_pi);
    Params p;
    p.nu = 1e-2;
    p.dt = 0.1;
    p.remap_period = 1e9;
    double delta = 0.01, kz = 1.0;
    State st(g);
    st.u2.mode(0, 0, 1) = cplx(0.5 * delta, 0.0);
    st.u2.mode(0, 0, -1) = cplx(0.5 * delta, 0.0);
    st.u10_tilde = project_zero(st.u1);

    double t_max = 2.0 / (p.nu * kz * kz);
    int n = int(std::round(t_max / p.dt));
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        st = step(st, p);
        double t = st.clock.t;
        double exact = -delta * t * std::exp(-p.nu * kz * kz * t);
        double num = 2.0 * st.u1.mode(0, 0, 1).real();
        worst = std::max(worst, std::abs(num - exact) / std::abs(exact));
    }
    CHECK(worst <= 1e-5);
    // the hat component carries the whole lift-up response
    CHECK(std::abs(2.0 * st.u10_hat.mode(0, 0, 1).real() -
                   2.0 * st.u1.mode(0, 0, 1).real()) < 1e-10);
}

TEST_CASE("invariants over a nonlinear run: divergence, split, momentum") {
    Grid g(16, 16, 16);
    Params p;
    p.nu = 0.05;
    p.dt = 0.02;
    State st = random_small_state(g, p, 0.2, 9);
    double lost = 0.0;
    for (int i = 0; i < 50; ++i) {
        st = advance(st, p, lost);
        double div = divergence_l2(st.u1, st.u2, st.u3, st.clock);
        double gradn = grad_l2_norm(st.u1, st.clock) + grad_l2_norm(st.u2, st.clock) +
                       grad_l2_norm(st.u3, st.clock);
        CHECK(div <= 1e-10 * gradn);
        CHECK(st.u1.mode(0, 0, 0) == cplx(0.0, 0.0));
        CHECK(st.u2.mode(0, 0, 0) == cplx(0.0, 0.0));
    }
    CHECK(st.split_drift() <= 1e-8);
}

TEST_CASE("step refinement: halving dt reduces terminal error ~4x") {
    Grid g(16, 16, 16);
    Params p;
    p.nu = 0.05;
    p.remap_period = 1e9;
    State init = random_small_state(g, p, 0.3, 21);
    double t_final = 1.0;

    auto run = [&](double dt) {
        Params q = p;
        q.dt = dt;
        State st = init;
        int n = int(std::round(t_final / dt));
        for (int i = 0; i < n; ++i) st = step(st, q);
        return st;
    };
    State ref = run(1.0 / 128.0);
    auto err = [&](const State& st) {
        return field_max_diff(st.u1, ref.u1) + field_max_diff(st.u2, ref.u2) +
               field_max_diff(st.theta, ref.theta);
    };
    double e1 = err(run(1.0 / 8.0));
    double e2 = err(run(1.0 / 16.0));
    double ratio = e1 / e2;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.5);
}

TEST_CASE("pressure_solve: hand-solved single modes") {
    Grid g(16, 16, 16, two_pi, two_pi, two_pi);
    State st(g);
    // u2 = sin(x): Delta P^N1 = -2 cos(x) => P^N1 = 2 cos(x)
    st.u2.mode(1, 0, 0) = cplx(0.0, -0.5);
    st.u2.mode(-1, 0, 0) = cplx(0.0, 0.5);
    // theta = sin(y): Delta P^N3 = cos(y) => P^N3 = -cos(y)
    st.theta.mode(0, 1, 0) = cplx(0.0, -0.5);
    st.theta.mode(0, -1, 0) = cplx(0.0, 0.5);
    PressureTriple pr = pressure_solve(st);
    CHECK(pr.n1.mode(1, 0, 0).real() == Catch::Approx(1.0).margin(1e-13));
    CHECK(pr.n3.mode(0, 1, 0).real() == Catch::Approx(-0.5).margin(1e-13));

    State zero(g);
    PressureTriple pz = pressure_solve(zero);
    CHECK(max_abs(pz.n1) + max_abs(pz.n2) + max_abs(pz.n3) == 0.0);
}

TEST_CASE("pressure_decomposition: interaction dropouts") {
    Grid g(16, 16, 16);
    Params p;

    SECTION("no nonzero modes: P^N2 = P2") {
        State st(g);
        auto u = random_band_limited_divfree(g, 3.0, 31);
        st.u1 = project_zero(u[0]);
        st.u2 = project_zero(u[1]);
        st.u3 = project_zero(u[2]);
        leray_project(st.u1, st.u2, st.u3, st.clock);
        st.u10_tilde = project_zero(st.u1);
        PressureDecomposition d = pressure_decomposition(st);
        CHECK(max_abs(d.p0) == 0.0);
        CHECK(max_abs(d.p1) == 0.0);
        CHECK(max_abs(d.p3) == 0.0);
        CHECK(max_abs(d.p4) == 0.0);
        PressureTriple pr = pressure_solve(st);
        CHECK(field_max_diff(d.p2, pr.n2) < 1e-12 * std::max(1.0, max_abs(pr.n2)));
    }
    SECTION("no zero modes: P^N2 = P4") {
        State st(g);
        auto u = random_band_limited_divfree(g, 3.0, 37, true);
        st.u1 = u[0];
        st.u2 = u[1];
        st.u3 = u[2];
        PressureDecomposition d = pressure_decomposition(st);
        CHECK(max_abs(d.p0) == 0.0);
        CHECK(max_abs(d.p1) == 0.0);
        CHECK(max_abs(d.p2) == 0.0);
        CHECK(max_abs(d.p3) == 0.0);
        PressureTriple pr = pressure_solve(st);
        CHECK(field_max_diff(d.p4, pr.n2) < 1e-12 * std::max(1.0, max_abs(pr.n2)));
    }
}

TEST_CASE("compute_hj: dropouts and the time-derivative oracle") {
    Grid g(16, 16, 16);
    Params p;
    p.nu = 0.05;
    p.remap_period = 1e9;

    State zero(g);
    CHECK(max_abs(compute_hj(zero, 2)) == 0.0);
    CHECK_THROWS_AS(compute_hj(zero, 1), domain_error);

    // reassembled u2 equation against finite differences of a solver step
    State st = random_small_state(g, p, 0.05, 43);
    auto predicted_dudt = [&](const State& s) {
        const ShearClock& clk = s.clock;
        PressureTriple pr = pressure_solve(s);
        PressureDecomposition d = pressure_decomposition(s);
        SpectralField u2n = project_nonzero(s.u2);
        // fixed-frame y*dx term cancels against the shear-frame clock transport
        SpectralField rhs = laplacian(u2n, clk) * p.nu;
        rhs -= product(s.u10_hat, derivative(u2n, Axis::x, clk));
        rhs -= project_nonzero(derivative(d.p5, Axis::y, clk));
        rhs -= project_nonzero(compute_hj(s, 2));
        rhs -= product(s.u10_tilde, derivative(u2n, Axis::x, clk));
        rhs += project_nonzero(s.theta);
        rhs -= project_nonzero(derivative(pr.n3, Axis::y, clk));
        return project_nonzero(dealias(rhs));
    };

    auto residual = [&](double dt) {
        Params q = p;
        q.dt = dt;
        State next = step(st, q);
        SpectralField fd =
            (project_nonzero(next.u2) - project_nonzero(st.u2)) * (1.0 / dt);
        return field_max_diff(fd, predicted_dudt(st));
    };
    double scale = max_abs(predicted_dudt(st)) + 1e-30;
    double r1 = residual(1e-2);
    double r2 = residual(5e-3);
    CHECK(r1 < 0.1 * scale);
    CHECK(r2 < 0.7 * r1);  // O(dt) convergence of the residual
}
