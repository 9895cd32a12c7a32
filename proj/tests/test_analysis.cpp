#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "wavesat/analysis.hpp"

using namespace wavesat;

namespace {

SampledFunction wavelet(int p, int n) {
    const FilterPair f = daubechies_filters(p);
    return compute_wavelet(compute_scaling(f, n), f.g);
}

// Sign changes between consecutive samples of magnitude >= tol, plus the two
// support endpoints.
std::size_t dense_scan_count(const SampledFunction& psi, double tol) {
    std::size_t c = 0;
    double last = 0;
    for (double v : psi.values) {
        if (std::fabs(v) < tol) continue;
        if (last != 0 && (v > 0) != (last > 0)) ++c;
        last = v;
    }
    return c + 2;
}

double toy(double x) {
    const double s = std::sin(std::numbers::pi * x / 2.0);
    return s * s;
}

}  // namespace

TEST_CASE("Haar saturation is identically one") {
    const SampledFunction psi = wavelet(1, 10);
    const SampledFunction S = saturation_function(psi);
    for (std::size_t i = 0; i + 1 < S.size(); ++i) CHECK(S[i] == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("saturation function matches a direct sum") {
    const SampledFunction psi = wavelet(4, 11);
    const SampledFunction S = saturation_function(psi);
    for (double x : {0.0, 0.125, 0.3, 0.5, 0.77, 1.0}) {
        double s = 0;
        for (int k = 0; k < psi.support_K; ++k) s += std::fabs(psi.interpolate(x + k));
        CHECK(S.interpolate(x) == Catch::Approx(s).margin(1e-9));
    }
}

TEST_CASE("saturation is positive for smooth wavelets") {
    const int p = GENERATE(3, 5, 10, 45);
    CAPTURE(p);
    const SampledFunction psi = wavelet(p, 12);
    const SampledFunction S = saturation_function(psi);
    CHECK(*std::min_element(S.values.begin(), S.values.end()) > 0.0);
}

TEST_CASE("db3 zero set") {
    const ZeroSet z = zero_set(wavelet(3, 15));
    REQUIRE(z.N() >= 3);
    CHECK(z.zeros.front() == 0.0);
    CHECK(z.zeros.back() == 5.0);
    CHECK(z.support_K == 5);
    CHECK(z.min_gap > 0.0);
    REQUIRE(z.crossing.size() == z.N());
    CHECK_FALSE(z.crossing.front());
    CHECK_FALSE(z.crossing.back());
    for (std::size_t i = 1; i < z.N(); ++i) CHECK(z.zeros[i] > z.zeros[i - 1]);
    double gap = INFINITY;
    for (std::size_t i = 1; i < z.N(); ++i) gap = std::min(gap, z.zeros[i] - z.zeros[i - 1]);
    CHECK(z.min_gap == gap);
}

TEST_CASE("zero count matches an independent level-18 scan") {
    const int p = GENERATE(range(3, 11));
    CAPTURE(p);
    const std::size_t oracle = dense_scan_count(wavelet(p, 18), kDefaultZeroTolerance);
    CHECK(zero_set(wavelet(p, 15)).N() == oracle);
}

TEST_CASE("db2 zero count reaches the dense scan at level 17") {
    // The db2 tail accumulates roots towards K; coarser grids absorb them into
    // the endpoint cluster.
    const std::size_t oracle = dense_scan_count(wavelet(2, 18), kDefaultZeroTolerance);
    CHECK(zero_set(wavelet(2, 17)).N() == oracle);
    CHECK(zero_set(wavelet(2, 15)).N() <= oracle);
}

TEST_CASE("zero set is stable under refinement") {
    const int p = GENERATE(range(3, 11));
    CAPTURE(p);
    for (int n = 14; n <= 15; ++n) {
        const ZeroSet a = zero_set(wavelet(p, n));
        const ZeroSet b = zero_set(wavelet(p, n + 1));
        REQUIRE(a.N() == b.N());
        for (std::size_t i = 0; i < a.N(); ++i) CHECK(std::fabs(a.zeros[i] - b.zeros[i]) < std::ldexp(1.0, -n + 1));
    }
}

TEST_CASE("polynomial roots are located") {
    // x (x - 1) (x - 2.5) (x - 4) on [0, 4]
    auto f = [](double x) { return x * (x - 1.0) * (x - 2.5) * (x - 4.0); };
    const SampledFunction s = sample_on_grid(f, 4, 12);
    const ZeroSet z = zero_set(s);
    REQUIRE(z.N() == 4);
    CHECK(z.zeros[1] == Catch::Approx(1.0).margin(1e-9));
    CHECK(z.zeros[2] == Catch::Approx(2.5).margin(1e-9));
    CHECK(z.crossing[1]);
    CHECK(z.min_gap == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("tangential zero is one cluster") {
    // Touches zero at 1 without changing sign.
    auto f = [](double x) { return (x - 1.0) * (x - 1.0) * x * (2.0 - x); };
    const SampledFunction s = sample_on_grid(f, 2, 13);
    const ZeroSet z = zero_set(s);
    REQUIRE(z.N() == 3);
    CHECK(std::fabs(z.zeros[1] - 1.0) <= std::ldexp(1.0, -13 + 2));
    CHECK_FALSE(z.crossing[1]);
}

TEST_CASE("toy function has only the endpoint zeros") {
    const SampledFunction psi = sample_on_grid(toy, 2, 14);
    const ZeroSet z = zero_set(psi);
    CHECK(z.zeros == std::vector<double>{0.0, 2.0});
    CHECK(z.min_gap == 2.0);
    const SampledFunction S = saturation_function(psi);
    for (std::size_t i = 0; i < S.size(); ++i) CHECK(S[i] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("too many zeros are reported") {
    auto f = [](double x) { return std::sin(40.0 * std::numbers::pi * x); };
    const SampledFunction s = sample_on_grid(f, 2, 12);
    CHECK_THROWS_AS(zero_set(s), TooManyZeros);
    ZeroSetOptions opt;
    opt.cap = 100;
    CHECK(zero_set(s, opt).N() == 81);
}

TEST_CASE("zero set needs a fine grid") {
    CHECK_THROWS_AS(zero_set(wavelet(3, 10)), GridTooCoarse);
}

TEST_CASE("property R passes with a large margin") {
    const int p = GENERATE(3, 7, 45);
    CAPTURE(p);
    const PropertyRReport r = check_property_R(daubechies_filters(p), default_iterations(p));
    CHECK(r.r1_pass);
    CHECK(r.r2_pass);
    CHECK(r.r3_pass);
    CHECK(r.pass());
    CHECK(r.certification_margin() >= 10.0);
    CHECK(r.eta == Catch::Approx(r.eta_tilde / r.K_psi));
    CHECK(r.eta_certified < r.eta);
    CHECK(r.eta_certified > 0.0);
    CHECK(r.eta_tilde_certified == Catch::Approx(r.eta_tilde - r.lipschitz_slack - r.error_budget));
}

TEST_CASE("db3 certificate values") {
    const PropertyRReport r = check_property_R(daubechies_filters(3), 15);
    CHECK(r.zero_set.N() == 25);
    CHECK(r.eta_certified > 0.11);
    CHECK(r.lipschitz_slack == Catch::Approx(r.M_G * std::ldexp(1.0, -16) * 5));
}

TEST_CASE("Haar fails R1") {
    const PropertyRReport r = check_property_R(daubechies_filters(1), 12);
    CHECK_FALSE(r.r1_pass);
    CHECK_FALSE(r.pass());
}

TEST_CASE("db2 fails R1") {
    const PropertyRReport r = check_property_R(daubechies_filters(2), 12);
    CHECK_FALSE(r.r1_pass);
}

TEST_CASE("toy function satisfies property R") {
    const SampledFunction psi = sample_on_grid(toy, 2, 15);
    const PropertyRReport r = check_property_R(psi, psi);
    CHECK(r.pass());
    CHECK(r.eta == Catch::Approx(0.5).margin(1e-12));
    CHECK(r.iterate_difference == 0.0);
}

TEST_CASE("property R needs enough iterations") {
    CHECK_THROWS_AS(check_property_R(daubechies_filters(3), 9), GridTooCoarse);
    CHECK(default_iterations(3) == 15);
    CHECK(default_iterations(45) == 12);
}
