#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "cblb/lemma_lab.hpp"

using namespace cblb;

TEST_CASE("random_band_limited: determinism, constraints, spectrum slope") {
    Grid g(24, 24, 24);
    SpectralField a = random_band_limited(g, 4.0, 42);
    SpectralField b = random_band_limited(g, 4.0, 42);
    for (std::size_t n = 0; n < a.coeffs().size(); ++n)
        REQUIRE(a.coeffs()[n] == b.coeffs()[n]);  // bitwise

    auto u = random_band_limited_divfree(g, 3.0, 42);
    ShearClock c{0.0, 0.0};
    CHECK(divergence_l2(u[0], u[1], u[2], c) <= 1e-12);

    // log-log fit of shell-averaged |f_k| against (1+|k|^2)
    SpectralField f = random_band_limited(g, 4.0, 9);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int j1 = -8; j1 <= 8; ++j1)
        for (int j2 = -8; j2 <= 8; ++j2)
            for (int j3 = -8; j3 <= 8; ++j3) {
                if (j1 == 0 && j2 == 0 && j3 == 0) continue;
                double k2 = double(j1) * j1 + double(j2) * j2 + double(j3) * j3;
                double amp = std::abs(f.mode(j1, j2, j3));
                if (amp <= 0.0) continue;
                double x = std::log(1.0 + k2), y = std::log(amp);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                ++n;
            }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::abs(slope - (-2.0)) <= 0.1 * 2.0);  // exponent 4 -> slope -p/2
}

TEST_CASE("check_identities: zero and zero-mode-only states") {
    Grid g(16, 16, 16);
    State zero(g);
    RatioSuite s0 = check_identities(zero);
    CHECK(s0.verdict == "identity");
    CHECK(s0.max_residual == 0.0);

    Params p;
    State st(g);
    auto u = random_band_limited_divfree(g, 3.0, 11);
    st.u1 = project_zero(u[0]);
    st.u2 = project_zero(u[1]);
    st.u3 = project_zero(u[2]);
    leray_project(st.u1, st.u2, st.u3, st.clock);
    st.u10_tilde = project_zero(st.u1);
    RatioSuite s1 = check_identities(st);
    CHECK(s1.verdict == "identity");
    // with no nonzero modes the quadratic pressure is carried by p2 alone
    PressureDecomposition d = pressure_decomposition(st);
    CHECK(max_abs(d.p0) == 0.0);
    CHECK(max_abs(d.p4) == 0.0);
}

TEST_CASE("check_identities: random states stay at spectral precision") {
    Params p;
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        Grid g(16, 16, 16);
        InitSpec spec;
        spec.generator = "random";
        spec.amp_u = 0.1;
        spec.amp_theta = 0.1;
        spec.seed = seed;
        State st = initial_data(spec, g, p);
        // give the streak split and hat part nontrivial content
        SpectralField hat = project_zero(random_band_limited(g, 5.0, seed + 55,
                                                             FieldConstraint::zero_mean));
        st.u10_hat = hat * (0.01 / std::max(max_abs(hat), 1e-30));
        st.u10_tilde = project_zero(st.u1) - st.u10_hat;
        RatioSuite s = check_identities(st, seed + 1000);
        INFO("seed " << seed << " max residual " << s.max_residual);
        CHECK(s.verdict == "identity");
    }
    // and once at doubled resolution
    Grid g(32, 32, 32);
    InitSpec spec;
    spec.generator = "random";
    spec.amp_u = 0.1;
    spec.amp_theta = 0.1;
    spec.seed = 77;
    State st = initial_data(spec, g, p);
    RatioSuite s = check_identities(st);
    CHECK(s.verdict == "identity");
}

TEST_CASE("embedding_ratio: every suite is bounded under refinement") {
    Grid base(12, 12, 12);
    for (const std::string id :
         {"B1", "B2", "B3", "B4", "B5", "B6", "KAPPA", "L3.1", "L3.2"}) {
        RatioSuite s = embedding_ratio(id, base, 3, 1234);
        INFO(id << ": base " << s.max_ratio_base << " fine " << s.max_ratio_fine);
        CHECK(s.verdict == "bounded");
        CHECK(s.max_ratio_base > 0.0);
        for (const auto& smp : s.samples) {
            CHECK(std::isfinite(smp.ratio));
            CHECK(smp.ratio >= 0.0);
        }
        CHECK(s.resolutions.size() == 2);
    }
}

TEST_CASE("embedding_ratio: parameter validation") {
    Grid base(12, 12, 12);
    CHECK_THROWS_AS(embedding_ratio("B1", base, 1, 1, 0.4), domain_error);
    CHECK_THROWS_AS(embedding_ratio("B2", base, 1, 1, 1.2), domain_error);
    CHECK_THROWS_AS(embedding_ratio("NOPE", base, 1, 1), domain_error);
}

TEST_CASE("suite reports serialize to JSON and reload bit-identically") {
    Grid base(12, 12, 12);
    RatioSuite s = embedding_ratio("KAPPA", base, 2, 99);
    nlohmann::json j1 = suite_to_json(s);
    std::string text = j1.dump();
    RatioSuite back = suite_from_json(nlohmann::json::parse(text));
    std::string text2 = suite_to_json(back).dump();
    CHECK(text == text2);
    CHECK(back.samples.size() == s.samples.size());
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        CHECK(back.samples[i].ratio == s.samples[i].ratio);  // bitwise
        CHECK(back.samples[i].tag == s.samples[i].tag);
    }
}
