#pragma once

// Saturation function S(x) = sum_{k<K} |psi(x + k)|, the zero set of psi, and
// numerical certification of the three conditions C^1 / finite zeros / S > 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "wavesat/cascade.hpp"
#include "wavesat/error.hpp"
#include "wavesat/filters.hpp"

namespace wavesat {

inline constexpr double kDefaultZeroTolerance = 1e-7;
inline constexpr std::size_t kDefaultZeroCap = 64;
/// Per-sample floating-point error of an order-15 cascade run.
inline constexpr double kCascadeRoundoff = 1e-14;

struct ZeroSet {
    std::vector<double> zeros;  // strictly increasing; front() == 0, back() == K
    std::vector<bool> crossing; // zeros[i] is a linear root of a sign change
    double min_gap = 0;
    int resolution = 0;
    double tolerance = 0;
    int support_K = 0;

    std::size_t N() const { return zeros.size(); }
};

/// S on the level-n grid of [0, 1].
inline SampledFunction saturation_function(const SampledFunction& psi) {
    if (psi.support_K < 1) throw SupportMismatch("saturation function needs K >= 1");
    const std::size_t P = static_cast<std::size_t>(psi.points_per_unit());
    std::vector<double> s(P + 1, 0.0);
    for (std::size_t i = 0; i <= P; ++i) {
        double acc = 0;
        for (int k = 0; k < psi.support_K; ++k) acc += std::fabs(psi[i + k * P]);
        s[i] = acc;
    }
    return SampledFunction(psi.level_n, 1, std::move(s));
}

struct ZeroSetOptions {
    double tol = kDefaultZeroTolerance;
    std::size_t cap = kDefaultZeroCap;
    int min_level = 12;
};

/// Zeros of a sampled psi: linear roots of sign changes plus near-zero grid
/// points, merged when closer than 2^{-n+2}. Clusters touching an endpoint
/// collapse onto it; 0 and K are always members.
inline ZeroSet zero_set(const SampledFunction& psi, const ZeroSetOptions& opt = {}) {
    if (psi.level_n < opt.min_level)
        throw GridTooCoarse("zero extraction needs grid level >= " + std::to_string(opt.min_level));
    const double h = psi.step();
    const double link = std::ldexp(1.0, -psi.level_n + 2);
    const double K = psi.support_K;

    struct Candidate {
        double x;
        bool root;
    };
    std::vector<Candidate> cand;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double v = psi[i];
        if (std::fabs(v) < opt.tol) cand.push_back({psi.x(i), false});
        if (i + 1 < psi.size()) {
            const double w = psi[i + 1];
            if ((v < 0 && w > 0) || (v > 0 && w < 0)) {
                const double t = std::fabs(v) / (std::fabs(v) + std::fabs(w));
                cand.push_back({psi.x(i) + t * h, true});
            }
        }
    }
    std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) { return a.x < b.x; });

    ZeroSet z;
    z.resolution = psi.level_n;
    z.tolerance = opt.tol;
    z.support_K = psi.support_K;
    z.zeros.push_back(0.0);
    z.crossing.push_back(false);

    auto close_cluster = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
        if (cand[lo].x <= link || cand[hi - 1].x >= K - link) return;  // absorbed by an endpoint
        std::vector<double> roots;
        for (std::size_t i = lo; i < hi; ++i)
            if (cand[i].root) roots.push_back(cand[i].x);
        // a cluster without strict sign flips still crosses when the nearest
        // samples of magnitude >= tol on either side have opposite signs
        auto i_lo = static_cast<std::int64_t>(std::floor(cand[lo].x / h));
        auto i_hi = static_cast<std::int64_t>(std::ceil(cand[hi - 1].x / h));
        while (i_lo > 0 && std::fabs(psi.at_index(i_lo)) < opt.tol) --i_lo;
        while (i_hi + 1 < static_cast<std::int64_t>(psi.size()) && std::fabs(psi.at_index(i_hi)) < opt.tol) ++i_hi;
        const double before = psi.at_index(i_lo), after = psi.at_index(i_hi);
        double rep;
        const bool crossing = !roots.empty() || (before < 0 && after > 0) || (before > 0 && after < 0);
        if (!roots.empty()) {
            rep = roots[roots.size() / 2];
        } else {
            // tangential zero: grid point of smallest |psi|
            double best = INFINITY;
            rep = cand[lo].x;
            for (std::size_t i = lo; i < hi; ++i) {
                const double v = std::fabs(psi.interpolate(cand[i].x));
                if (v < best) {
                    best = v;
                    rep = cand[i].x;
                }
            }
        }
        z.zeros.push_back(rep);
        z.crossing.push_back(crossing);
        if (z.zeros.size() + 1 > opt.cap)
            throw TooManyZeros("more than " + std::to_string(opt.cap) + " zeros at tolerance " +
                               std::to_string(opt.tol));
    };

    if (!cand.empty()) {
        std::size_t start = 0;
        for (std::size_t i = 1; i <= cand.size(); ++i) {
            if (i == cand.size() || cand[i].x - cand[i - 1].x > link) {
                close_cluster(start, i);
                start = i;
            }
        }
    }
    z.zeros.push_back(K);
    z.crossing.push_back(false);
    z.min_gap = INFINITY;
    for (std::size_t i = 1; i < z.zeros.size(); ++i) z.min_gap = std::min(z.min_gap, z.zeros[i] - z.zeros[i - 1]);
    return z;
}

struct PropertyRReport {
    int K_psi = 0;
    int level = 0;
    ZeroSet zero_set;
    double eta_tilde = 0;            // min S over the grid
    double eta = 0;                  // eta_tilde / K
    double M_G = 0;
    DerivativeBound derivative;
    double lipschitz_slack = 0;      // M_G 2^{-n-1} K
    double iterate_difference = 0;   // ||psi_n - psi_{n-1}|| on the common grid
    double error_budget = 0;         // K (iterate difference + roundoff)
    double eta_tilde_certified = 0;  // eta_tilde - slack - budget
    double eta_certified = 0;        // eta_tilde_certified / K
    bool endpoints_vanish = false;
    bool r1_pass = false;
    bool r2_pass = false;
    bool r3_pass = false;

    bool pass() const { return r1_pass && r2_pass && r3_pass; }
    /// Certified minimum of S measured in units of the error budget.
    double certification_margin() const {
        return error_budget > 0 ? eta_tilde_certified / error_budget : INFINITY;
    }
};

struct PropertyROptions {
    ZeroSetOptions zeros{};
    double roundoff = kCascadeRoundoff;
};

/// Certification from psi sampled at two consecutive levels; `previous` may be
/// psi itself for functions sampled from a closed form.
inline PropertyRReport check_property_R(const SampledFunction& psi, const SampledFunction& previous,
                                        const PropertyROptions& opt = {}) {
    PropertyRReport r;
    r.K_psi = psi.support_K;
    r.level = psi.level_n;
    r.derivative = derivative_bound(psi);
    r.M_G = r.derivative.M_G;
    r.zero_set = zero_set(psi, opt.zeros);

    const SampledFunction S = saturation_function(psi);
    r.eta_tilde = *std::min_element(S.values.begin(), S.values.end());
    r.eta = r.eta_tilde / r.K_psi;

    r.lipschitz_slack = r.M_G * std::ldexp(1.0, -psi.level_n - 1) * r.K_psi;
    r.iterate_difference = sup_difference_on_common_grid(psi, previous);
    r.error_budget = r.K_psi * (r.iterate_difference + opt.roundoff);
    r.eta_tilde_certified = r.eta_tilde - r.lipschitz_slack - r.error_budget;
    r.eta_certified = r.eta_tilde_certified / r.K_psi;

    r.endpoints_vanish = std::fabs(psi.values.front()) < opt.zeros.tol && std::fabs(psi.values.back()) < opt.zeros.tol;
    r.r1_pass = !r.derivative.diverging && std::isfinite(r.M_G) && r.endpoints_vanish;
    r.r2_pass = r.zero_set.N() >= 2 && r.zero_set.min_gap > 0 && std::isfinite(r.zero_set.min_gap);
    r.r3_pass = r.eta_tilde_certified > 0;
    return r;
}

/// Runs the cascade for a Daubechies pair and certifies psi_{n_iters}.
inline PropertyRReport check_property_R(const FilterPair& f, int n_iters, const PropertyROptions& opt = {}) {
    if (n_iters < 10) throw GridTooCoarse("property (R) check needs at least 10 cascade iterations");
    const SampledFunction phi_prev = compute_scaling(f, n_iters - 1);
    const SampledFunction phi = cascade_step(phi_prev, f.h);
    return check_property_R(compute_wavelet(phi, f.g), compute_wavelet(phi_prev, f.g), opt);
}

/// Default cascade depth for an order.
inline int default_iterations(int order_p) { return order_p >= 40 ? 12 : 15; }

}  // namespace wavesat
