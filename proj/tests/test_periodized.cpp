#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "wavesat/periodized.hpp"

using namespace wavesat;

namespace {

SampledFunction db(int p, int n) {
    const FilterPair f = daubechies_filters(p);
    return compute_wavelet(compute_scaling(f, n), f.g);
}

double toy(double x) {
    const double s = std::sin(std::numbers::pi * x / 2.0);
    return s * s;
}

// G(y) for a double y whose reduction mod K is exact in double arithmetic.
double naive_G(const SampledFunction& psi, double y) {
    const double K = psi.support_K;
    double r = std::fmod(y, K);
    if (r < 0) r += K;
    return psi.interpolate(r);
}

}  // namespace

TEST_CASE("G agrees with naive evaluation") {
    const SampledFunction psi = db(3, 12);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 500; ++t) {
        const long long num = static_cast<long long>(rng() % 4000001) - 2000000;
        const int e = static_cast<int>(rng() % 30);
        const DyadicRational x(BigInt(num), e);
        CHECK(G_eval(psi, x) == Catch::Approx(naive_G(psi, x.to_double())).margin(1e-12));
    }
}

TEST_CASE("G is K-periodic") {
    const SampledFunction psi = db(4, 12);
    const DyadicRational x = DyadicRational::parse("12345/2^15");
    const double g = G_eval(psi, x);
    for (long long m : {-3LL, 1LL, 2LL, 1000000007LL})
        CHECK(G_eval(psi, x + DyadicRational(m * psi.support_K)) == g);
    for (long long p : {0LL, 1LL, 5LL})
        CHECK(G1_eval(psi, std::int64_t{9}, p, x) == G1_eval(psi, std::int64_t{9}, p + 7 * psi.support_K, x));
}

TEST_CASE("scaled translates match naive evaluation") {
    const SampledFunction psi = db(3, 13);
    const DyadicRational x = DyadicRational::parse("777/2^12");
    for (int j = 0; j <= 12; ++j)
        for (long long p = 0; p < psi.support_K; ++p)
            CHECK(G1_eval(psi, std::int64_t{j}, p, x) ==
                  Catch::Approx(naive_G(psi, std::ldexp(777.0, j - 12) - static_cast<double>(p))).margin(1e-12));
}

TEST_CASE("huge scales reduce through modular doubling") {
    const SampledFunction psi = db(3, 10);
    const int K = psi.support_K;
    const DyadicRational x = DyadicRational::parse("13/2^3");
    for (int j : {3, 4, 17, 64, 200, 1000}) {
        // 2^(j-3) * 13 mod K by repeated doubling
        long long r = 13 % K;
        for (int s = 3; s < j; ++s) r = (2 * r) % K;
        for (long long p = 0; p < K; ++p) {
            const long long idx = ((r - p) % K + K) % K;
            CHECK(G1_eval(psi, std::int64_t{j}, p, x) == psi[static_cast<std::size_t>(idx) * 1024]);
        }
    }
    const BigInt j = BigInt(1) << 200;
    CHECK(std::isfinite(G1_eval(psi, j, 2, x)));
}

TEST_CASE("doubling orbit equals direct evaluation") {
    const SampledFunction psi = db(3, 12);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const DyadicRational x(BigInt(rng() % (5u << 20)), 20);
        DoublingOrbit orbit(x, psi.support_K);
        for (int j = 0; j <= 80; ++j) {
            REQUIRE(orbit.scale() == j);
            for (long long p : {0LL, 2LL, 4LL, -1LL}) CHECK(orbit.value(psi, p) == G1_eval(psi, std::int64_t{j}, p, x));
            orbit.advance();
        }
    }
    CHECK_FALSE(DoublingOrbit::fits(DyadicRational(BigInt(1), 61), 5));
    CHECK_THROWS_AS(DoublingOrbit(DyadicRational(BigInt(1), 61), 5), HorizonOverflow);
}

TEST_CASE("product over coordinates") {
    const SampledFunction psi = db(3, 12);
    const std::vector<DyadicRational> x{DyadicRational::parse("3/2^5"), DyadicRational::parse("11/2^7")};
    const std::vector<int> p{1, 3};
    const double want = G1_eval(psi, std::int64_t{4}, 1, x[0]) * G1_eval(psi, std::int64_t{4}, 3, x[1]);
    CHECK(Gd_eval(psi, 4, p, x) == want);
    const std::vector<int> short_p{1};
    CHECK_THROWS_AS(Gd_eval(psi, 4, short_p, x), DimensionMismatch);
    CHECK_THROWS_AS(G1_eval(psi, BigInt(-1), 0, x[0]), SupportMismatch);
}

TEST_CASE("zeros at scale") {
    ZeroSet z;
    z.zeros = {0.0, 2.0};
    z.support_K = 2;
    CHECK(zeros_at_scale(z, 1, 0, 0.0, 2.0) == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(zeros_at_scale(z, 2, 1, 0.0, 1.0) == std::vector<double>{0.25, 0.75});
    CHECK(zeros_at_scale(z, 0, 0, 0.5, 0.6).empty());
    z.zeros = {0.0, 0.5, 2.0};
    const std::vector<double> s = zeros_at_scale(z, 3, 1, 0.0, 1.0);
    for (double v : s) {
        const double y = std::fmod(8.0 * v - 1.0 + 16.0, 2.0);
        CHECK((y == 0.0 || y == 0.5));
    }
    CHECK(s.size() == 8);
}

TEST_CASE("schedule counts") {
    const std::vector<BigInt> c = schedule_counts(25, 2);
    CHECK(c[0] == 52);
    CHECK(c[1] == BigInt(2) * 53 * 53 * (BigInt(1) << 52));
    CHECK(c[1].str() == "25301222706567446528");
    const std::vector<BigInt> t = schedule_counts(2, 3);
    CHECK(t[0] == 6);
    CHECK(t[1] == 6272);
    CHECK(t[2] == BigInt(2) * BigInt(6273) * 6273 * 6273 * (BigInt(1) << 6272));
    CHECK_THROWS_AS(schedule_counts(2, 4), HorizonOverflow);
    CHECK_THROWS_AS(schedule_counts(2, 0), DimensionMismatch);
}

TEST_CASE("log2 of big integers") {
    CHECK(log2_big(BigInt(1)) == 0.0);
    CHECK(log2_big(BigInt(1024)) == 10.0);
    CHECK(log2_big(BigInt(3) << 500) == Catch::Approx(500.0 + std::log2(3.0)).epsilon(1e-15));
    CHECK(log2_big(BigInt(0)) == -INFINITY);
}

TEST_CASE("schedule parameters") {
    ZeroSet z;
    z.zeros = {0.0, 2.0};
    z.min_gap = 2.0;
    z.support_K = 2;
    const ScheduleParams s = schedule_params(z, 0.5, 2.0, -7.0, 1);
    CHECK(s.block_length() == 6);
    CHECK(s.eps_d_log2 == Catch::Approx(std::log2(0.5 / (std::exp2(7.0) * 2.0))));
    CHECK(s.eps_prime_log2 == Catch::Approx(std::log2(2.0 / (4.0 * 64.0))));
    CHECK(s.omega_log2 == std::min(s.eps_d_log2, s.eps_prime_log2));
    CHECK(s.alpha_log2 == -7.0);
    CHECK(s.alpha == std::exp2(-7.0));
    const ScheduleParams s2 = schedule_params(z, 0.5, 2.0, 0.0, 1);
    CHECK(s2.alpha_log2 == -2.0);
    const ScheduleParams s3 = schedule_params(z, 0.5, 2.0, 0.0, 3);
    CHECK(s3.omega_log2 == -INFINITY);
    CHECK(s3.eps_d_log2 == -INFINITY);
    CHECK(s3.alpha == 0.25);  // alpha_tilde is supplied by the caller here
    CHECK_THROWS_AS(schedule_params(z, 0.0, 2.0, 0.0, 1), DegenerateSchedule);
    ZeroSet one;
    one.zeros = {0.0};
    CHECK_THROWS_AS(schedule_params(one, 0.5, 2.0, 0.0, 1), DegenerateSchedule);
}

TEST_CASE("saturation floor of the toy function") {
    const SampledFunction psi = sample_on_grid(toy, 2, 14);
    const ZeroSet z = zero_set(psi);
    // omega = 2^-10 is a grid point; the minimum sits on the ball boundary
    const SaturationFloor f = saturation_floor(psi, z, -10.0);
    CHECK(f.log2_value == Catch::Approx(std::log2(toy(std::ldexp(1.0, -10)))).epsilon(1e-12));
    // unresolvable omega: slope at the endpoint times omega
    const double h = psi.step();
    const SaturationFloor g = saturation_floor(psi, z, -100.0);
    CHECK(g.log2_value == Catch::Approx(std::log2(psi[1] / h) - 100.0).epsilon(1e-12));
}

TEST_CASE("toy schedule") {
    const SampledFunction psi = sample_on_grid(toy, 2, 15);
    const PropertyRReport r = check_property_R(psi, psi);
    const ScheduleParams s = make_schedule(psi, r, 1);
    CHECK(s.N == 2);
    CHECK(s.block_length() == 6);
    CHECK(s.eta == r.eta_certified);
    CHECK(std::isfinite(s.omega_log2));
    CHECK(s.alpha_log2 <= std::log2(s.eta / 2.0));
    CHECK(s.alpha_log2 == Catch::Approx(-16.28).margin(0.01));
    const ScheduleParams s3 = make_schedule(psi, r, 3);
    CHECK(s3.alpha_log2 == -INFINITY);
}

TEST_CASE("db3 schedule") {
    const FilterPair f = daubechies_filters(3);
    const SampledFunction prev = compute_wavelet(compute_scaling(f, 14), f.g);
    const SampledFunction psi = compute_wavelet(cascade_step(compute_scaling(f, 14), f.h), f.g);
    const PropertyRReport r = check_property_R(psi, prev);
    const ScheduleParams s = make_schedule(psi, r, 1);
    CHECK(s.block_length() == 52);
    CHECK(s.omega_log2 < -50.0);
    CHECK(std::isfinite(s.alpha_log2));
    CHECK(s.alpha_tilde_log2 < s.omega_log2);
}

TEST_CASE("schedule needs a certified saturation") {
    const SampledFunction psi = sample_on_grid(toy, 2, 14);
    PropertyRReport r = check_property_R(psi, psi);
    r.r3_pass = false;
    CHECK_THROWS_AS(make_schedule(psi, r, 1), DegenerateSchedule);
}

TEST_CASE("G at grid points equals the sampled wavelet") {
    const SampledFunction psi = db(3, 15);
    CHECK(G_eval(psi, DyadicRational(0)) == 0.0);
    CHECK(G_eval(psi, DyadicRational::parse("3/2^1")) == psi[static_cast<std::size_t>(3) << 14]);
    const DyadicRational x = DyadicRational::parse("4321/2^13");
    CHECK(G1_eval(psi, std::int64_t{0}, 0, x) == G_eval(psi, x));
}

TEST_CASE("scale 2000 lands on an integer argument") {
    const SampledFunction psi = db(3, 12);
    for (long long m : {7LL, 12LL, 1000003LL}) {
        const DyadicRational x(BigInt(m), 2000);
        for (long long p : {0LL, 1LL, 4LL})
            CHECK(G1_eval(psi, std::int64_t{2000}, p, x) == G_eval(psi, DyadicRational(m - p)));
    }
}

TEST_CASE("db2 translates at small scales") {
    const SampledFunction psi = db(2, 14);
    // 2^3 * 5/8 - 2 = 3 = K, where psi vanishes
    CHECK(G1_eval(psi, std::int64_t{3}, 2, DyadicRational::parse("5/2^3")) == psi[psi.size() - 1]);
    CHECK(G1_eval(psi, std::int64_t{3}, 2, DyadicRational::parse("5/2^3")) == 0.0);
    const std::vector<DyadicRational> x{DyadicRational::parse("1/2^1"), DyadicRational::parse("1/2^2")};
    const std::vector<int> p{0, 0};
    CHECK(Gd_eval(psi, 1, p, x) == G_eval(psi, DyadicRational(1)) * G_eval(psi, DyadicRational::parse("1/2^1")));
}

TEST_CASE("one-coordinate product is the scalar translate") {
    const SampledFunction psi = db(3, 12);
    const std::vector<DyadicRational> x{DyadicRational::parse("99/2^9")};
    for (int p = 0; p < 5; ++p) {
        const std::vector<int> pv{p};
        CHECK(Gd_eval(psi, 6, pv, x) == G1_eval(psi, std::int64_t{6}, p, x[0]));
    }
    // the second coordinate sits on the endpoint zero
    const std::vector<DyadicRational> y{DyadicRational::parse("99/2^9"), DyadicRational::parse("3/2^6")};
    const std::vector<int> pv{1, 3};
    CHECK(Gd_eval(psi, 6, pv, y) == 0.0);
}

TEST_CASE("scale zero reproduces the zero set") {
    const ZeroSet z = zero_set(db(3, 15));
    CHECK(zeros_at_scale(z, 0, 0, 0.0, static_cast<double>(z.support_K)) == z.zeros);
}

TEST_CASE("schedule radius in log space") {
    ZeroSet z;
    z.zeros = {0.0, 2.0};
    z.min_gap = 2.0;
    z.support_K = 2;
    // N(1) = 6, so eps = 0.1 / (2^7 * 10)
    const ScheduleParams s = schedule_params(z, 0.1, 10.0, -20.0, 1);
    REQUIRE(s.block_length() == 6);
    CHECK(std::exp2(s.eps_d_log2) == Catch::Approx(7.8125e-5).epsilon(1e-12));
    CHECK(s.eps_d_log2 == Catch::Approx(-13.64).margin(0.005));
}
