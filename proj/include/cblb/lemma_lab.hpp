#ifndef CBLB_LEMMA_LAB_HPP
#define CBLB_LEMMA_LAB_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cblb/diagnostics.hpp"
#include "cblb/random_fields.hpp"
#include "cblb/solver.hpp"

namespace cblb {

// ---------------------------------------------------------------------------
// Ratio suites: inequalities are monitored as LHS/RHS statistics over
// randomized inputs, identities as residuals at spectral precision.
// ---------------------------------------------------------------------------

struct RatioSample {
    std::string tag;  // which inequality / resolution produced it
    double lhs = 0, rhs = 0, ratio = 0;
};

struct RatioSuite {
    std::string lemma_id;
    std::uint64_t seed0 = 0;
    int n_samples = 0;
    double alpha = 0.0;
    std::vector<std::string> resolutions;
    std::vector<RatioSample> samples;
    double max_ratio_base = 0.0;
    double max_ratio_fine = 0.0;
    double max_residual = 0.0;
    std::string verdict;  // "identity" | "bounded" | "growing"
};

inline nlohmann::json suite_to_json(const RatioSuite& s) {
    nlohmann::json j;
    j["lemma_id"] = s.lemma_id;
    j["seed0"] = s.seed0;
    j["n_samples"] = s.n_samples;
    j["alpha"] = s.alpha;
    j["resolutions"] = s.resolutions;
    j["max_ratio_base"] = s.max_ratio_base;
    j["max_ratio_fine"] = s.max_ratio_fine;
    j["max_residual"] = s.max_residual;
    j["verdict"] = s.verdict;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& sm : s.samples)
        arr.push_back({{"tag", sm.tag}, {"lhs", sm.lhs}, {"rhs", sm.rhs},
                       {"ratio", sm.ratio}});
    j["samples"] = arr;
    return j;
}

inline RatioSuite suite_from_json(const nlohmann::json& j) {
    RatioSuite s;
    s.lemma_id = j.at("lemma_id").get<std::string>();
    s.seed0 = j.at("seed0").get<std::uint64_t>();
    s.n_samples = j.at("n_samples").get<int>();
    s.alpha = j.at("alpha").get<double>();
    s.resolutions = j.at("resolutions").get<std::vector<std::string>>();
    s.max_ratio_base = j.at("max_ratio_base").get<double>();
    s.max_ratio_fine = j.at("max_ratio_fine").get<double>();
    s.max_residual = j.at("max_residual").get<double>();
    s.verdict = j.at("verdict").get<std::string>();
    for (const auto& e : j.at("samples")) {
        RatioSample sm;
        sm.tag = e.at("tag").get<std::string>();
        sm.lhs = e.at("lhs").get<double>();
        sm.rhs = e.at("rhs").get<double>();
        sm.ratio = e.at("ratio").get<double>();
        s.samples.push_back(sm);
    }
    return s;
}

namespace detail {

inline std::string grid_tag(const Grid& g) {
    return std::to_string(g.nx) + "x" + std::to_string(g.ny) + "x" +
           std::to_string(g.nz);
}

/// Zero-pad f onto a grid with `factor`-times the points per axis.
inline SpectralField upsample(const SpectralField& f, int factor = 2) {
    const Grid& g = f.grid();
    Grid gf(g.nx * factor, g.ny * factor, g.nz * factor, g.lx, g.ly, g.lz);
    SpectralField out(gf);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k)
                out.mode(Grid::wave(i, g.nx), Grid::wave(j, g.ny),
                         Grid::wave(k, g.nz)) = f.at(i, j, k);
    return out;
}

/// Collocation product on the doubled grid: exact for inputs band-limited to
/// a third of the base grid, since the result fits the doubled band.
inline SpectralField exact_product(const SpectralField& a, const SpectralField& b) {
    SpectralField fa = upsample(a), fb = upsample(b);
    std::vector<double> pa = to_physical(fa), pb = to_physical(fb);
    for (std::size_t n = 0; n < pa.size(); ++n) pa[n] *= pb[n];
    return to_spectral(pa, fa.grid());
}

/// sup over the flagged axes of the L2 norm over the remaining axes,
/// evaluated at collocation points of a 2x oversampled grid.
inline double sup_l2_norm(const SpectralField& f, bool sup_x, bool sup_y, bool sup_z) {
    SpectralField fine = upsample(f);
    const Grid& g = fine.grid();
    std::vector<double> p = to_physical(fine);
    double cell = 1.0;
    if (!sup_x) cell *= g.lx / g.nx;
    if (!sup_y) cell *= g.ly / g.ny;
    if (!sup_z) cell *= g.lz / g.nz;
    int mx = sup_x ? g.nx : 1, my = sup_y ? g.ny : 1, mz = sup_z ? g.nz : 1;
    std::vector<double> acc(std::size_t(mx) * my * mz, 0.0);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k) {
                std::size_t key =
                    (std::size_t(sup_x ? i : 0) * my + (sup_y ? j : 0)) * mz +
                    (sup_z ? k : 0);
                double v = p[g.index(i, j, k)];
                acc[key] += v * v;
            }
    double best = 0.0;
    for (double v : acc) best = std::max(best, v * cell);
    return std::sqrt(best);
}

inline double sup_norm(const SpectralField& f) {
    SpectralField fine = upsample(f);
    std::vector<double> p = to_physical(fine);
    double m = 0.0;
    for (double v : p) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Identity checks: exact algebraic facts, asserted to spectral precision.
// ---------------------------------------------------------------------------

inline RatioSuite check_identities(const State& st, std::uint64_t witness_seed = 1) {
    const Grid& g = st.grid();
    const ShearClock& clk = st.clock;
    RatioSuite suite;
    suite.lemma_id = "identities";
    suite.seed0 = witness_seed;
    suite.resolutions = {detail::grid_tag(g)};

    auto push = [&](const std::string& tag, double resid, double scale) {
        RatioSample s;
        s.tag = tag;
        s.lhs = resid;
        s.rhs = scale;
        s.ratio = scale > 0.0 ? resid / scale : 0.0;
        suite.samples.push_back(s);
        suite.max_residual = std::max(suite.max_residual, s.ratio);
    };

    PressureTriple pr = pressure_solve(st);
    PressureDecomposition d = pressure_decomposition(st);

    // (i) the interaction split sums back to the quadratic pressure
    SpectralField sum = d.p0 + d.p1 + d.p2 + d.p3 + d.p4;
    push("pressure_split_sum", l2_norm(sum - pr.n2), std::max(l2_norm(pr.n2), 1e-30));

    // (ii) P5 equals the total-profile form of the lift-up pressure
    SpectralField u2n = project_nonzero(st.u2), u3n = project_nonzero(st.u3);
    SpectralField vsrc =
        derivative(u2n, Axis::x, clk) * -2.0 -
        2.0 * (product(derivative(st.u10_hat, Axis::y, clk),
                       derivative(u2n, Axis::x, clk)) +
               product(derivative(st.u10_hat, Axis::z, clk),
                       derivative(u3n, Axis::x, clk)));
    vsrc.mode(0, 0, 0) = 0.0;
    SpectralField p5v = inverse_laplacian(vsrc, clk);
    push("p5_total_profile", l2_norm(d.p5 - p5v), std::max(l2_norm(p5v), 1e-30));

    // (iii) rho decomposition of grad(kappa), evaluated at collocation points
    {
        ShearClock zero{0.0, 0.0};
        KappaBundle b = kappa_bundle(st.u10_hat);
        SpectralField w = random_band_limited(g, 3.0, witness_seed);
        auto phys = [&](const SpectralField& f) { return to_physical(f); };
        std::vector<double> uy = phys(derivative(st.u10_hat, Axis::y, zero));
        std::vector<double> uz = phys(derivative(st.u10_hat, Axis::z, zero));
        std::vector<double> kap = phys(b.kappa);
        std::vector<double> r1 = phys(b.rho1), r2 = phys(b.rho2);
        std::vector<double> ky = phys(derivative(b.kappa, Axis::y, zero));
        std::vector<double> kz = phys(derivative(b.kappa, Axis::z, zero));
        std::vector<double> wy = phys(derivative(w, Axis::y, zero));
        std::vector<double> wz = phys(derivative(w, Axis::z, zero));
        double resid2 = 0.0;
        for (std::size_t n = 0; n < kap.size(); ++n) {
            double lhs = ky[n] * wy[n] + kz[n] * wz[n];
            double rhs = r1[n] * ((1.0 + uy[n]) * wy[n] + uz[n] * wz[n]) +
                         r2[n] * (wz[n] - kap[n] * wy[n]);
            resid2 += (lhs - rhs) * (lhs - rhs);
        }
        double resid = std::sqrt(resid2 * g.volume() / double(g.size()));
        push("rho_decomposition", resid, std::max(grad_l2_norm(w, zero), 1e-30));
    }

    // (iv) the streak-split tendencies sum to the zero-mode u1 tendency
    {
        Params p;  // identity holds for any parameter values
        Tendencies t = nonlinear_rhs(st, p);
        SpectralField lhs = t.u10_hat + t.u10_tilde;
        SpectralField rhs = project_zero(t.u1);
        push("streak_split_sum", l2_norm(lhs - rhs), std::max(l2_norm(rhs), 1e-30));
    }

    suite.verdict = suite.max_residual <= 1e-9 ? "identity" : "growing";
    suite.max_ratio_base = suite.max_residual;
    return suite;
}

// ---------------------------------------------------------------------------
// Embedding / product inequality suites.
// ---------------------------------------------------------------------------

namespace detail {

struct IneqSample {
    std::string tag;
    double lhs, rhs;
};

using SampleFn =
    std::function<std::vector<IneqSample>(const Grid&, std::uint64_t, double)>;

inline std::vector<IneqSample> b1_samples(const Grid& g, std::uint64_t seed,
                                          double alpha) {
    ShearClock c{0.0, 0.0};
    SpectralField f = project_zero(random_band_limited(g, 3.0, seed));
    SpectralField dy = derivative(f, Axis::y, c), dz = derivative(f, Axis::z, c);
    SpectralField dydz = derivative(dy, Axis::z, c);
    double nf = l2_norm(f), ny = l2_norm(dy), nz = l2_norm(dz), nyz = l2_norm(dydz);
    double a = alpha;
    std::vector<IneqSample> out;
    out.push_back({"b1_linf_1", sup_norm(f),
                   std::sqrt(ny * nf) + std::sqrt(nyz) * std::pow(nz, a - 0.5) *
                                            std::pow(nf, 1.0 - a)});
    out.push_back({"b1_linf_2", sup_norm(f),
                   std::sqrt(ny * nf) + std::pow(nyz, a - 0.5) * std::sqrt(nz) *
                                            std::pow(ny, 1.0 - a)});
    out.push_back({"b1_supz", sup_l2_norm(f, false, false, true),
                   nf + std::pow(nz, a) * std::pow(nf, 1.0 - a)});
    out.push_back({"b1_supy", sup_l2_norm(f, false, true, false), std::sqrt(ny * nf)});
    return out;
}

inline std::vector<IneqSample> b2_samples(const Grid& g, std::uint64_t seed,
                                          double alpha) {
    ShearClock c{0.0, 0.0};
    SpectralField f = project_nonzero(random_band_limited(g, 3.0, seed));
    auto d = [&](const SpectralField& h, Axis ax) { return derivative(h, ax, c); };
    SpectralField fx = d(f, Axis::x), fy = d(f, Axis::y), fz = d(f, Axis::z);
    SpectralField fxy = d(fx, Axis::y), fxz = d(fx, Axis::z), fyz = d(fy, Axis::z);
    SpectralField fxx = d(fx, Axis::x);
    double nf = l2_norm(f), nx = l2_norm(fx), ny = l2_norm(fy), nz = l2_norm(fz);
    double nxy = l2_norm(fxy), nxz = l2_norm(fxz), nyz = l2_norm(fyz),
           nxx = l2_norm(fxx);
    double a = alpha;
    double a17 = std::min(alpha, 0.75);  // the 1st and 7th bounds need alpha <= 3/4
    std::vector<IneqSample> out;
    out.push_back({"b2_linf", sup_norm(f),
                   std::sqrt(nyz) * std::pow(nxz, a17 - 0.5) * std::pow(nxx, a17 - 0.5) *
                           std::pow(nx, 1.5 - 2.0 * a17) +
                       std::sqrt(nxy) * std::pow(nx, a17 - 0.5) *
                           std::pow(nf, 1.0 - a17)});
    out.push_back({"b2_supyz", sup_l2_norm(f, false, true, true),
                   std::sqrt(ny * nf) + std::sqrt(nz) * std::pow(nyz, a - 0.5) *
                                            std::pow(ny, 1.0 - a)});
    out.push_back({"b2_supxy", sup_l2_norm(f, true, true, false),
                   std::sqrt(nx) * std::pow(nxy, a - 0.5) * std::pow(ny, 1.0 - a)});
    out.push_back({"b2_supx", sup_l2_norm(f, true, false, false),
                   std::pow(nx, a) * std::pow(nf, 1.0 - a)});
    out.push_back({"b2_supz", sup_l2_norm(f, false, false, true),
                   nf + std::pow(nz, a) * std::pow(nf, 1.0 - a)});
    out.push_back({"b2_supy", sup_l2_norm(f, false, true, false), std::sqrt(ny * nf)});
    out.push_back({"b2_supxz", sup_l2_norm(f, true, false, true),
                   std::pow(nx, a17) * std::pow(nf, 1.0 - a17) +
                       std::sqrt(nxz) * std::pow(nx, a17 - 0.5) *
                           std::pow(nz, a17 - 0.5) * std::pow(nf, 1.5 - 2.0 * a17)});
    return out;
}

inline double hk(const SpectralField& f, int k) {
    return sobolev_norm(f, k, ShearClock{0.0, 0.0});
}

inline std::vector<IneqSample> b3_samples(const Grid& g, std::uint64_t seed, double) {
    ShearClock c{0.0, 0.0};
    SpectralField f1 = project_zero(random_band_limited(g, 4.0, seed));
    SpectralField f2 = random_band_limited(g, 4.0, seed + 7919);
    SpectralField prod = exact_product(f1, f2);
    SpectralField dz2 = derivative(f2, Axis::z, c);
    std::vector<IneqSample> out;
    out.push_back({"b3_h2", hk(prod, 2),
                   hk(f1, 1) * (hk(f2, 2) + hk(dz2, 2)) +
                       hk(f1, 3) * (l2_norm(f2) + l2_norm(dz2))});
    out.push_back({"b3_h3", hk(prod, 3),
                   hk(f1, 1) * (hk(f2, 3) + hk(dz2, 3)) +
                       hk(f1, 3) * (hk(f2, 1) + hk(dz2, 1))});
    return out;
}

inline std::vector<IneqSample> b4_samples(const Grid& g, std::uint64_t seed, double) {
    ShearClock c{0.0, 0.0};
    SpectralField f1 = random_band_limited(g, 3.0, seed);
    SpectralField f2 = random_band_limited(g, 3.0, seed + 104729);
    std::vector<IneqSample> out;
    for (Axis ax : {Axis::x, Axis::z}) {
        std::string j = ax == Axis::x ? "x" : "z";
        SpectralField d1 = derivative(f1, ax, c), d2 = derivative(f2, ax, c);
        SpectralField p1 = exact_product(f1, d2);
        SpectralField p = exact_product(f1, f2);
        double pre = l2_norm(d1) + l2_norm(f1);
        out.push_back({"b4_grad_" + j, l2_norm(p1), pre * l2_norm(laplacian(f2, c))});
        out.push_back({"b4_prod_" + j,
                       l2_norm(p) + l2_norm(derivative(p, ax, ShearClock{0.0, 0.0})),
                       pre * hk(f2, 2)});
    }
    return out;
}

inline std::vector<IneqSample> b5_samples(const Grid& g, std::uint64_t seed, double) {
    ShearClock c{0.0, 0.0};
    SpectralField f1 = random_band_limited(g, 3.0, seed);
    SpectralField f2 = random_band_limited(g, 3.0, seed + 15485863);
    std::vector<IneqSample> out;
    for (Axis ax : {Axis::x, Axis::z}) {
        std::string j = ax == Axis::x ? "x" : "z";
        SpectralField d1 = derivative(f1, ax, c), d2 = derivative(f2, ax, c);
        SpectralField p = exact_product(f1, f2);
        out.push_back({"b5_prod_" + j, l2_norm(p),
                       (hk(d1, 1) + hk(f1, 1)) * l2_norm(f2) +
                           (l2_norm(d1) + l2_norm(f1)) * hk(f2, 1)});
        auto pair = [&](const SpectralField& a, const SpectralField& b, int k) {
            double na = k == 0 ? l2_norm(a) : hk(a, k);
            double nb = k == 0 ? l2_norm(b) : hk(b, k);
            return std::sqrt(na * na + nb * nb);
        };
        out.push_back({"b5_dprod_" + j,
                       l2_norm(derivative(p, ax, ShearClock{0.0, 0.0})),
                       pair(d1, f1, 1) * pair(d2, f2, 0) +
                           pair(d1, f1, 0) * pair(d2, f2, 1)});
    }
    SpectralField f1n = project_nonzero(f1);
    SpectralField dx1 = derivative(f1n, Axis::x, c);
    SpectralField pn = exact_product(f1n, f2);
    for (int s = 1; s <= 3; ++s)
        out.push_back({"b5_hs_" + std::to_string(s), hk(pn, s),
                       hk(dx1, s + 1) * l2_norm(f2) + l2_norm(dx1) * hk(f2, s + 1)});
    return out;
}

inline std::vector<IneqSample> b6_samples(const Grid& g, std::uint64_t seed, double) {
    ShearClock c{0.0, 0.0};
    SpectralField uh = project_zero(random_band_limited(g, 5.0, seed + 32452843,
                                                       FieldConstraint::zero_mean));
    double h4 = hk(uh, 4);
    if (h4 > 0.0) uh *= 0.05 / h4;
    KappaBundle b = kappa_bundle(uh);
    SpectralField f1 = project_zero(random_band_limited(g, 4.0, seed));
    SpectralField f2 = project_nonzero(random_band_limited(g, 4.0, seed + 49979687));
    SpectralField gd2 = good_derivative(f2, b, c);
    SpectralField p = product(f1, f2);
    std::vector<IneqSample> out;
    out.push_back({"b6_prod", l2_norm(p),
                   hk(f1, 1) * (l2_norm(f2) + l2_norm(gd2))});
    out.push_back({"b6_gradinv", grad_l2_norm(inverse_laplacian(p, c), c),
                   l2_norm(f1) * (l2_norm(f2) + l2_norm(gd2))});
    out.push_back({"b6_grad", grad_l2_norm(p, c),
                   hk(f1, 1) * (hk(f2, 1) + hk(gd2, 1))});
    double gdgrad = 0.0, grad2 = 0.0;
    for (Axis ax : {Axis::x, Axis::y, Axis::z}) {
        double v = l2_norm(good_derivative(derivative(f2, ax, c), b, c));
        gdgrad += v * v;
        double w = l2_norm(derivative(f2, ax, c));
        grad2 += w * w;
    }
    for (Axis ax : {Axis::y, Axis::z}) {
        std::string j = ax == Axis::y ? "y" : "z";
        SpectralField lap2 = laplacian(f2, c);
        SpectralField comm =
            derivative(inverse_laplacian(product(f1, lap2), c), ax, c) -
            product(f1, derivative(f2, ax, c));
        out.push_back({"b6_comm_" + j, hk(comm, 1),
                       hk(f1, 2) * (std::sqrt(grad2) + std::sqrt(gdgrad))});
    }
    return out;
}

inline std::vector<IneqSample> kappa_samples(const Grid& g, std::uint64_t seed,
                                             double) {
    SpectralField uh = project_zero(
        random_band_limited(g, 5.0, seed, FieldConstraint::zero_mean));
    double h4 = hk(uh, 4);
    if (h4 > 0.0) uh *= 0.1 / h4;
    KappaBundle b = kappa_bundle(uh);
    std::vector<IneqSample> out;
    out.push_back({"kappa_h1", hk(b.kappa, 1), hk(uh, 2)});
    out.push_back({"kappa_h3", hk(b.kappa, 3), hk(uh, 4)});
    out.push_back({"rho_h2", hk(b.rho1, 2) + hk(b.rho2, 2), hk(uh, 4)});
    return out;
}

inline std::vector<IneqSample> l31_samples(const Grid& g, std::uint64_t seed, double) {
    ShearClock c{0.0, 0.0};
    auto u = random_band_limited_divfree(g, 3.0, seed, true);
    auto d = [&](const SpectralField& h, Axis ax) { return derivative(h, ax, c); };
    auto vecnorm = [&](const std::vector<SpectralField>& fs) {
        double s = 0.0;
        for (const auto& f : fs) {
            double n = l2_norm(f);
            s += n * n;
        }
        return std::sqrt(s);
    };
    SpectralField lap_u2 = laplacian(u[1], c);
    SpectralField dxz_u3 = d(d(u[2], Axis::x), Axis::x) + d(d(u[2], Axis::z), Axis::z);
    std::vector<IneqSample> out;

    std::vector<SpectralField> lhs0;
    for (int j = 0; j < 3; ++j)
        for (Axis ax : {Axis::x, Axis::z}) lhs0.push_back(d(d(u[j], Axis::x), ax));
    out.push_back({"l31_k0", vecnorm(lhs0), l2_norm(dxz_u3) + l2_norm(lap_u2)});

    std::vector<SpectralField> lhs1;
    for (const auto& f : lhs0)
        for (Axis ax : {Axis::x, Axis::y, Axis::z}) lhs1.push_back(d(f, ax));
    double rhs1 = 0.0;
    {
        double s3 = 0.0, s2 = 0.0;
        for (Axis ax : {Axis::x, Axis::y, Axis::z}) {
            double a3 = l2_norm(d(dxz_u3, ax)), a2 = l2_norm(d(lap_u2, ax));
            s3 += a3 * a3;
            s2 += a2 * a2;
        }
        rhs1 = std::sqrt(s3) + std::sqrt(s2);
    }
    out.push_back({"l31_k1", vecnorm(lhs1), rhs1});

    SpectralField w2(g);
    w2 = d(u[0], Axis::z) - d(u[2], Axis::x);
    std::vector<SpectralField> lhs3;
    for (int j = 0; j < 3; ++j)
        for (Axis ax : {Axis::x, Axis::z}) lhs3.push_back(laplacian(d(u[j], ax), c));
    out.push_back({"l31_lap", vecnorm(lhs3),
                   l2_norm(laplacian(w2, c)) + grad_l2_norm(lap_u2, c)});
    return out;
}

inline std::vector<IneqSample> l32_samples(const Grid& g, std::uint64_t seed, double) {
    ShearClock c{0.0, 0.0};
    SpectralField psi = project_zero(random_band_limited(g, 4.0, seed));
    SpectralField u2 = derivative(psi, Axis::z, c);
    SpectralField u3 = derivative(psi, Axis::y, c) * -1.0;
    double lhs = hk(u2, 2) + hk(u3, 1);
    {
        double s = 0.0;
        for (Axis ax : {Axis::x, Axis::y, Axis::z}) {
            double n = hk(derivative(u2, ax, c), 1);
            s += n * n;
        }
        lhs += std::sqrt(s) + hk(derivative(u3, Axis::z, c), 1);
    }
    double rhs = l2_norm(laplacian(u2, c)) + l2_norm(u3) + grad_l2_norm(u3, c);
    return {{"l32", lhs, rhs}};
}

}  // namespace detail

/// Ratio statistics for the named embedding / product inequality, sampled at
/// the base grid and at doubled resolution; verdict "bounded" when the max
/// ratio grows by at most 2x under refinement.
inline RatioSuite embedding_ratio(const std::string& lemma_id, const Grid& base,
                                  int n_samples, std::uint64_t seed0,
                                  double alpha = 0.75) {
    detail::SampleFn fn;
    if (lemma_id == "B1") {
        fn = detail::b1_samples;
        if (!(alpha > 0.5 && alpha <= 1.0))
            throw domain_error("embedding_ratio: B1 needs alpha in (1/2, 1]");
    } else if (lemma_id == "B2") {
        fn = detail::b2_samples;
        if (!(alpha > 0.5 && alpha <= 1.0))
            throw domain_error("embedding_ratio: B2 needs alpha in (1/2, 1]");
    } else if (lemma_id == "B3")
        fn = detail::b3_samples;
    else if (lemma_id == "B4")
        fn = detail::b4_samples;
    else if (lemma_id == "B5")
        fn = detail::b5_samples;
    else if (lemma_id == "B6")
        fn = detail::b6_samples;
    else if (lemma_id == "KAPPA")
        fn = detail::kappa_samples;
    else if (lemma_id == "L3.1")
        fn = detail::l31_samples;
    else if (lemma_id == "L3.2")
        fn = detail::l32_samples;
    else
        throw domain_error("embedding_ratio: unknown lemma id '" + lemma_id + "'");

    RatioSuite suite;
    suite.lemma_id = lemma_id;
    suite.seed0 = seed0;
    suite.n_samples = n_samples;
    suite.alpha = alpha;

    Grid fine(base.nx * 2, base.ny * 2, base.nz * 2, base.lx, base.ly, base.lz);
    for (const Grid* g : std::initializer_list<const Grid*>{&base, &fine}) {
        std::string tag = detail::grid_tag(*g);
        suite.resolutions.push_back(tag);
        double& peak = g == &base ? suite.max_ratio_base : suite.max_ratio_fine;
        for (int s = 0; s < n_samples; ++s) {
            for (const auto& smp : fn(*g, seed0 + std::uint64_t(s), alpha)) {
                if (smp.lhs < 1e-14 && smp.rhs < 1e-14) continue;  // 0/0 guard
                RatioSample rs;
                rs.tag = tag + ":" + smp.tag;
                rs.lhs = smp.lhs;
                rs.rhs = smp.rhs;
                rs.ratio = smp.rhs > 0.0 ? smp.lhs / smp.rhs : 0.0;
                peak = std::max(peak, rs.ratio);
                suite.samples.push_back(rs);
            }
        }
    }
    suite.verdict =
        suite.max_ratio_fine <= 2.0 * suite.max_ratio_base ? "bounded" : "growing";
    return suite;
}

}  // namespace cblb

#endif
