#pragma once

// Sampled verification of the saturation lemma and the non-vanishing bound, and
// the trace coefficient 2^{-j a} prod_i |G(2^j a_i - p_{j,i})|.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "wavesat/error.hpp"
#include "wavesat/periodized.hpp"
#include "wavesat/sequence.hpp"

namespace wavesat {

enum class VerificationTarget { LemmaSaturation, Theorem1d, Theorem2d, TheoremNd, Greedy };

inline std::string_view to_string(VerificationTarget t) {
    switch (t) {
        case VerificationTarget::LemmaSaturation: return "lemma_saturation";
        case VerificationTarget::Theorem1d: return "theorem_1d";
        case VerificationTarget::Theorem2d: return "theorem_2d";
        case VerificationTarget::TheoremNd: return "theorem_nd";
        case VerificationTarget::Greedy: return "greedy";
    }
    return "?";
}

struct VerificationFailure {
    Point x;
    long long J = 0;  // window start; the scale itself for the lemma
};

struct VerificationReport {
    VerificationTarget target = VerificationTarget::LemmaSaturation;
    int dimension = 1;
    std::size_t samples_tested = 0;
    std::size_t windows_tested = 0;
    std::vector<VerificationFailure> failures;
    double min_observed_log2 = INFINITY;  // min over windows of the best value in the window
    double min_observed_product = INFINITY;
    double alpha_used_log2 = 0;   // threshold per coordinate
    double alpha_used = 0;
    long long runtime_ms = 0;

    bool pass() const { return failures.empty(); }
};

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'2024'0917ULL;
inline constexpr int kSampleBits = 20;

/// Stratified dyadic points with `bits` fractional bits in [0, K)^d. Each
/// coordinate draws one point from each of `count` equal strata, the strata
/// being matched across coordinates by independent shuffles.
inline std::vector<Point> sample_points(int d, int K, std::size_t count, std::uint64_t seed = kDefaultSeed,
                                        int bits = kSampleBits) {
    if (d < 1) throw DimensionMismatch("dimension must be at least 1");
    std::mt19937_64 rng(seed);
    const std::uint64_t cells = static_cast<std::uint64_t>(K) << bits;
    std::vector<Point> pts(count, Point(static_cast<std::size_t>(d)));
    std::vector<std::size_t> perm(count);
    for (int i = 0; i < d; ++i) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t k = count; k > 1; --k) std::swap(perm[k - 1], perm[rng() % k]);
        for (std::size_t s = 0; s < count; ++s) {
            const std::uint64_t lo = cells * perm[s] / count;
            const std::uint64_t hi = cells * (perm[s] + 1) / count;
            const std::uint64_t width = std::max<std::uint64_t>(hi - lo, 1);
            const std::uint64_t num = std::min(lo + rng() % width, cells - 1);
            pts[s][static_cast<std::size_t>(i)] = DyadicRational(BigInt(num), bits);
        }
    }
    return pts;
}

namespace detail {
inline long long elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

inline void finish(VerificationReport& r) {
    r.min_observed_product = std::exp2(r.min_observed_log2);
    r.alpha_used = std::exp2(r.alpha_used_log2);
}
}  // namespace detail

/// For every x = i / 2^grid_level in [0, 1] and every j <= j_max, checks that
/// some translate p in [0, K) gives |G(2^j x - p)| >= eta.
inline VerificationReport verify_lemma_saturation(const SampledFunction& psi, double eta, int grid_level, int j_max) {
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport r;
    r.target = VerificationTarget::LemmaSaturation;
    r.alpha_used_log2 = std::log2(eta);
    const std::int64_t count = (std::int64_t{1} << grid_level) + 1;
    for (std::int64_t i = 0; i < count; ++i) {
        const DyadicRational x(BigInt(i), grid_level);
        DoublingOrbit orbit(x, psi.support_K);
        for (int j = 0; j <= j_max; ++j) {
            double best = 0;
            for (int p = 0; p < psi.support_K; ++p) best = std::max(best, std::fabs(orbit.value(psi, p)));
            ++r.windows_tested;
            r.min_observed_log2 = std::min(r.min_observed_log2, std::log2(best));
            if (best < eta) r.failures.push_back({{x}, j});
            orbit.advance();
        }
        ++r.samples_tested;
    }
    detail::finish(r);
    r.runtime_ms = detail::elapsed_ms(t0);
    return r;
}

/// For every sample and every J in J_list, looks for j in [J, J + N(d)] with
/// prod_i |G(2^j x_i - p_{j,i})| >= alpha^d, comparing in log2.
inline VerificationReport verify_theorem(const SampledFunction& psi, const SequencePlan& plan,
                                         const ScheduleParams& params, const std::vector<Point>& samples,
                                         const std::vector<long long>& J_list) {
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport r;
    const int d = plan.dimension_d;
    r.dimension = d;
    r.target = d == 1 ? VerificationTarget::Theorem1d : d == 2 ? VerificationTarget::Theorem2d
                                                               : VerificationTarget::TheoremNd;
    r.alpha_used_log2 = params.alpha_log2;
    if (J_list.empty()) {
        detail::finish(r);
        return r;
    }
    if (plan.block_length > BigInt(std::numeric_limits<long long>::max() / 4))
        throw PlanTooShort("block length " + plan.block_length.str() + " cannot be covered by a stored plan");
    const auto window = static_cast<long long>(plan.block_length);
    const auto [mn, mx] = std::minmax_element(J_list.begin(), J_list.end());
    if (*mn < plan.first_scale || *mx + window > plan.horizon_J_max)
        throw PlanTooShort("plan covers scales " + std::to_string(plan.first_scale) + ".." +
                           std::to_string(plan.horizon_J_max) + ", verification needs " + std::to_string(*mn) + ".." +
                           std::to_string(*mx + window));

    const long long j_first = *mn;
    const long long j_last = *mx + window;
    std::vector<PlanEntry> cached;
    cached.reserve(static_cast<std::size_t>(j_last - j_first + 1));
    for (long long j = j_first; j <= j_last; ++j) cached.push_back(plan.entry(j));
    const double threshold = d * params.alpha_log2;

    for (const Point& x : samples) {
        if (x.size() != static_cast<std::size_t>(d))
            throw DimensionMismatch("sample dimension does not match the plan");
        const std::vector<double> prof = scale_profile(psi, plan, x, j_first, j_last, cached);
        for (long long J : J_list) {
            const auto b = prof.begin() + (J - j_first);
            const double best = *std::max_element(b, b + window + 1);
            ++r.windows_tested;
            r.min_observed_log2 = std::min(r.min_observed_log2, best);
            if (!(best >= threshold)) r.failures.push_back({x, J});
        }
        ++r.samples_tested;
    }
    detail::finish(r);
    r.runtime_ms = detail::elapsed_ms(t0);
    return r;
}

/// 2^{-j a} prod_i |G(2^j a_i - p_{j,i})|.
inline double trace_coefficient(const SampledFunction& psi, const SequencePlan& plan, const Point& a, long long j,
                                double alpha_exp) {
    if (a.size() != static_cast<std::size_t>(plan.dimension_d))
        throw DimensionMismatch("point dimension " + std::to_string(a.size()) + " does not match plan dimension " +
                                std::to_string(plan.dimension_d));
    const std::vector<int> p = plan.translates(j);
    double prod = std::exp2(-static_cast<double>(j) * alpha_exp);
    for (std::size_t i = 0; i < a.size(); ++i) prod *= std::fabs(G1_eval(psi, static_cast<std::int64_t>(j), p[i], a[i]));
    return prod;
}

}  // namespace wavesat
