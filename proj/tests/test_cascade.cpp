#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "wavesat/cascade.hpp"

using namespace wavesat;

TEST_CASE("box function is a fixed point of the Haar cascade") {
    const FilterPair f = daubechies_filters(1);
    SampledFunction box(0, 1, {1.0, 0.0});
    const SampledFunction next = cascade_step(box, f.h);
    REQUIRE(next.level_n == 1);
    CHECK(next.values[0] == Catch::Approx(1.0).margin(1e-15));
    CHECK(next.values[1] == Catch::Approx(1.0).margin(1e-15));
    CHECK(next.values[2] == 0.0);
    CHECK(sup_difference_on_common_grid(next, box) < 1e-15);

    const SampledFunction phi = compute_scaling(f, 8);
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) CHECK(std::fabs(phi[i] - 1.0) < 1e-14);
    CHECK(phi.values.back() == 0.0);
}

TEST_CASE("cascade is linear and maps zero to zero") {
    const FilterPair f = daubechies_filters(3);
    const SampledFunction z(4, f.support_K, std::vector<double>(SampledFunction::expected_size(4, 5), 0.0));
    const SampledFunction out = cascade_step(z, f.h);
    for (double v : out.values) CHECK(v == 0.0);

    const SampledFunction a = compute_scaling(f, 4);
    const SampledFunction twice = cascade_step(a.scaled(2.0), f.h);
    const SampledFunction once = cascade_step(a, f.h);
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(std::fabs(twice[i] - 2.0 * once[i]) < 1e-14);
}

TEST_CASE("Haar wavelet is +1 then -1") {
    const FilterPair f = daubechies_filters(1);
    const SampledFunction psi = compute_wavelet(compute_scaling(f, 6), f.g);
    const std::size_t half = psi.size() / 2;
    for (std::size_t i = 0; i < half; ++i) CHECK(std::fabs(psi[i] - 1.0) < 1e-14);
    for (std::size_t i = half; i + 1 < psi.size(); ++i) CHECK(std::fabs(psi[i] + 1.0) < 1e-14);
}

TEST_CASE("delta start converges monotonically and geometrically") {
    const int p = GENERATE(range(3, 11));
    CAPTURE(p);
    const FilterPair f = daubechies_filters(p);
    SampledFunction prev = compute_scaling(f, 3, CascadeInit::Delta);
    double last = INFINITY;
    for (int n = 4; n <= 13; ++n) {
        const SampledFunction cur = cascade_step(prev, f.h);
        const double d = sup_difference_on_common_grid(cur, prev);
        CHECK(d < last);
        if (n >= 6) CHECK(d < 0.75 * last);
        last = d;
        prev = cur;
    }
}

TEST_CASE("db2 delta cascade decreases") {
    const FilterPair f = daubechies_filters(2);
    const SampledFunction p2 = compute_scaling(f, 2, CascadeInit::Delta);
    const SampledFunction p3 = cascade_step(p2, f.h);
    const SampledFunction p4 = cascade_step(p3, f.h);
    CHECK(sup_difference_on_common_grid(p4, p3) < sup_difference_on_common_grid(p3, p2));
}

TEST_CASE("db7 wavelet iterates converge below 1e-8") {
    const FilterPair f = daubechies_filters(7);
    const SampledFunction phi14 = compute_scaling(f, 14);
    const SampledFunction phi15 = cascade_step(phi14, f.h);
    const double d = sup_difference_on_common_grid(compute_wavelet(phi15, f.g), compute_wavelet(phi14, f.g));
    CHECK(d < 1e-8);
}

TEST_CASE("partition of unity and unit integral") {
    const int p = GENERATE(2, 3, 6);
    CAPTURE(p);
    const FilterPair f = daubechies_filters(p);
    const SampledFunction phi = compute_scaling(f, 12);
    const std::int64_t ppu = phi.points_per_unit();
    for (std::int64_t i = 0; i <= ppu; i += 7) {
        double s = 0;
        for (int k = -f.support_K; k <= f.support_K; ++k) s += phi.at_index(i + k * ppu);
        CHECK(std::fabs(s - 1.0) < 1e-6);
    }
    CHECK(std::fabs(phi.integral() - 1.0) < 1e-6);
}

TEST_CASE("wavelet moments vanish") {
    const int p = GENERATE(3, 7);
    CAPTURE(p);
    const FilterPair f = daubechies_filters(p);
    const SampledFunction psi = compute_wavelet(compute_scaling(f, 14), f.g);
    for (int m = 0; m < p; ++m) {
        long double s = 0;
        for (std::size_t i = 0; i < psi.size(); ++i) s += std::pow(static_cast<long double>(psi.x(i)), m) * psi[i];
        CHECK(std::fabs(static_cast<double>(s) * psi.step()) < 1e-9);
    }
}

TEST_CASE("integer values solve the eigenproblem") {
    const FilterPair f = daubechies_filters(4);
    const SampledFunction v = integer_values(f.h);
    double sum = 0;
    for (double x : v.values) sum += x;
    CHECK(std::fabs(sum - 1.0) < 1e-14);
    CHECK(v.values.front() == 0.0);
    CHECK(v.values.back() == 0.0);
    // phi(m) = sqrt2 sum_k h_k phi(2m - k)
    for (int m = 1; m < f.support_K; ++m) {
        double rhs = 0;
        for (int k = 0; k <= f.support_K; ++k) rhs += std::numbers::sqrt2 * f.h[k] * v.at_index(2 * m - k);
        CHECK(std::fabs(rhs - v.values[static_cast<std::size_t>(m)]) < 1e-14);
    }
}

TEST_CASE("coarsening and interpolation agree with the grid") {
    const FilterPair f = daubechies_filters(3);
    const SampledFunction phi = compute_scaling(f, 10);
    const SampledFunction c = phi.coarsened(7);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == phi[i * 8]);
    CHECK(phi.interpolate(phi.x(300)) == phi[300]);
    const double mid = 0.5 * (phi.x(300) + phi.x(301));
    CHECK(phi.interpolate(mid) == Catch::Approx(0.5 * (phi[300] + phi[301])));
    CHECK(phi.interpolate(-0.1) == 0.0);
    CHECK(phi.interpolate(6.0) == 0.0);
    CHECK_THROWS_AS(phi.coarsened(11), SupportMismatch);
}

TEST_CASE("derivative bound is stable for smooth wavelets") {
    const FilterPair f = daubechies_filters(3);
    const DerivativeBound b12 = derivative_bound(compute_wavelet(compute_scaling(f, 12), f.g));
    const DerivativeBound b15 = derivative_bound(compute_wavelet(compute_scaling(f, 15), f.g));
    CHECK_FALSE(b15.diverging);
    CHECK(std::fabs(b15.M_G - b12.M_G) < 0.05 * b15.M_G);
    CHECK(b15.M_G == Catch::Approx(1.1 * b15.raw));
}

TEST_CASE("derivative bound scales linearly") {
    const FilterPair f = daubechies_filters(4);
    const SampledFunction psi = compute_wavelet(compute_scaling(f, 12), f.g);
    CHECK(derivative_bound(psi.scaled(2.0)).M_G == Catch::Approx(2.0 * derivative_bound(psi).M_G).epsilon(1e-12));
}

TEST_CASE("derivative bound flags non-smooth wavelets") {
    const int p = GENERATE(1, 2);
    const FilterPair f = daubechies_filters(p);
    CHECK(derivative_bound(compute_wavelet(compute_scaling(f, 12), f.g)).diverging);
}

TEST_CASE("derivative bound needs a fine grid") {
    const FilterPair f = daubechies_filters(3);
    CHECK_THROWS_AS(derivative_bound(compute_wavelet(compute_scaling(f, 7), f.g)), GridTooCoarse);
}

TEST_CASE("truncation error bound") {
    CHECK(truncation_error_bound(1.0, 1.0, 3) == 0.125);
    CHECK(truncation_error_bound(4.0, 0.5, 4) == 1.0);
    CHECK(truncation_error_bound(2.0, 1.0, 10) < truncation_error_bound(2.0, 1.0, 9));
    CHECK(truncation_error_bound(1.0, 1.0, 10) == std::ldexp(1.0, -10));
    CHECK(truncation_error_bound(1.0, 2.0, 15) == std::ldexp(1.0, -30));
    CHECK(truncation_error_bound(0.0, 1.5, 12) == 0.0);
}

TEST_CASE("support mismatches are rejected") {
    const FilterPair f3 = daubechies_filters(3);
    const FilterPair f4 = daubechies_filters(4);
    const SampledFunction phi = compute_scaling(f3, 4);
    CHECK_THROWS_AS(cascade_step(phi, f4.h), SupportMismatch);
    CHECK_THROWS_AS(compute_wavelet(phi, f4.g), SupportMismatch);
    CHECK_THROWS_AS(SampledFunction(3, 5, std::vector<double>(10)), SupportMismatch);
    CHECK_THROWS_AS(sup_difference_on_common_grid(phi, compute_scaling(f4, 4)), SupportMismatch);
    CHECK_THROWS_AS(compute_scaling(f3, 0), SupportMismatch);
}
