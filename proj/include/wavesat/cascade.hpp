#pragma once

// Scaling functions and wavelets on dyadic grids via the cascade map
//   (T f)(x) = sqrt 2 * sum_k h_k f(2x - k).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavesat/error.hpp"
#include "wavesat/filters.hpp"

namespace wavesat {

/// Values of a function supported on [0, K] at x_i = i * 2^-n, i = 0 .. K 2^n.
struct SampledFunction {
    int level_n = 0;
    int support_K = 0;
    std::vector<double> values;

    SampledFunction() = default;
    SampledFunction(int level, int K, std::vector<double> v) : level_n(level), support_K(K), values(std::move(v)) {
        if (values.size() != expected_size(level, K))
            throw SupportMismatch("sample count " + std::to_string(values.size()) + " does not match K 2^n + 1 = " +
                                  std::to_string(expected_size(level, K)));
    }

    static std::size_t expected_size(int level, int K) {
        return static_cast<std::size_t>(K) * (std::size_t{1} << level) + 1;
    }

    std::size_t size() const { return values.size(); }
    std::int64_t points_per_unit() const { return std::int64_t{1} << level_n; }
    double step() const { return std::ldexp(1.0, -level_n); }
    double x(std::size_t i) const { return std::ldexp(static_cast<double>(i), -level_n); }
    double operator[](std::size_t i) const { return values[i]; }

    /// Value at an integer grid index; zero outside [0, K 2^n].
    double at_index(std::int64_t i) const {
        return (i < 0 || i >= static_cast<std::int64_t>(values.size())) ? 0.0 : values[static_cast<std::size_t>(i)];
    }

    /// Piecewise-linear interpolation; zero outside [0, K].
    double interpolate(double xv) const {
        if (!(xv >= 0.0) || xv > support_K) return 0.0;
        const double pos = std::ldexp(xv, level_n);
        const auto i = static_cast<std::int64_t>(std::floor(pos));
        const double t = pos - static_cast<double>(i);
        if (t == 0.0) return at_index(i);
        return (1.0 - t) * at_index(i) + t * at_index(i + 1);
    }

    double sup_norm() const {
        double m = 0;
        for (double v : values) m = std::max(m, std::fabs(v));
        return m;
    }

    /// Riemann sum  sum_i f(x_i) 2^-n.
    double integral() const {
        long double s = 0;
        for (double v : values) s += v;
        return static_cast<double>(std::ldexp(s, -level_n));
    }

    SampledFunction scaled(double c) const {
        SampledFunction r = *this;
        for (double& v : r.values) v *= c;
        return r;
    }

    /// Restriction to a coarser grid of level m <= n.
    SampledFunction coarsened(int m) const {
        if (m > level_n || m < 0) throw SupportMismatch("cannot coarsen to a finer level");
        const std::size_t stride = std::size_t{1} << (level_n - m);
        std::vector<double> v(expected_size(m, support_K));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = values[i * stride];
        return SampledFunction(m, support_K, std::move(v));
    }
};

/// max |a - b| over the grid points the two samplings share.
inline double sup_difference_on_common_grid(const SampledFunction& a, const SampledFunction& b) {
    if (a.support_K != b.support_K) throw SupportMismatch("supports differ");
    const int m = std::min(a.level_n, b.level_n);
    const std::size_t sa = std::size_t{1} << (a.level_n - m);
    const std::size_t sb = std::size_t{1} << (b.level_n - m);
    double d = 0;
    for (std::size_t i = 0; i < SampledFunction::expected_size(m, a.support_K); ++i)
        d = std::max(d, std::fabs(a.values[i * sa] - b.values[i * sb]));
    return d;
}

/// Samples f on the level-n grid of [0, K]. The endpoint values are set to zero,
/// which is the value of any continuous function whose support closure is [0, K].
inline SampledFunction sample_on_grid(const std::function<double(double)>& f, int K, int level) {
    std::vector<double> v(SampledFunction::expected_size(level, K));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(std::ldexp(static_cast<double>(i), -level));
    v.front() = 0.0;
    v.back() = 0.0;
    return SampledFunction(level, K, std::move(v));
}

/// One application of the cascade map; level n -> n + 1.
inline SampledFunction cascade_step(const SampledFunction& f, std::span<const double> h) {
    const int K = static_cast<int>(h.size()) - 1;
    if (K < 1 || f.support_K != K)
        throw SupportMismatch("function support [0, " + std::to_string(f.support_K) +
                              "] does not match filter length " + std::to_string(h.size()));
    const auto in_size = static_cast<std::int64_t>(f.size());
    const std::int64_t shift = f.points_per_unit();
    std::vector<double> out(SampledFunction::expected_size(f.level_n + 1, K), 0.0);
    const auto out_size = static_cast<std::int64_t>(out.size());
    // out[i] = sqrt2 * sum_k h_k f[i - k 2^n]
    for (int k = 0; k <= K; ++k) {
        const double c = std::sqrt(2.0) * h[k];
        const std::int64_t lo = k * shift;
        const std::int64_t hi = std::min(out_size, lo + in_size);
        for (std::int64_t i = lo; i < hi; ++i) out[i] += c * f.values[i - lo];
    }
    return SampledFunction(f.level_n + 1, K, std::move(out));
}

enum class CascadeInit {
    IntegerEigenvector,  // exact values of phi at the integers
    Delta,               // phi_0(m) = [m == 0], the classical starting point
};

/// Values of the scaling function at 0..K, normalized to sum 1.
inline SampledFunction integer_values(std::span<const double> h) {
    const int K = static_cast<int>(h.size()) - 1;
    if (K < 1) throw SupportMismatch("filter too short");
    std::vector<double> v(K + 1, 0.0);
    if (K == 1) {
        // Haar: right-continuous box.
        v[0] = 1.0;
        return SampledFunction(0, K, std::move(v));
    }
    // phi(0) = phi(K) = 0; interior values solve phi(m) = sqrt2 sum_k h_{2m-k} phi(k).
    using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const int n = K - 1;
    Mat A = Mat::Zero(n + 1, n);
    Vec b = Vec::Zero(n + 1);
    for (int m = 1; m <= n; ++m) {
        for (int k = 1; k <= n; ++k) {
            const int idx = 2 * m - k;
            if (idx >= 0 && idx <= K) A(m - 1, k - 1) = std::sqrt(2.0L) * h[idx];
        }
        A(m - 1, m - 1) -= 1.0L;
    }
    for (int k = 0; k < n; ++k) A(n, k) = 1.0L;
    b(n) = 1.0L;
    const Vec sol = A.colPivHouseholderQr().solve(b);
    for (int k = 1; k <= n; ++k) v[k] = static_cast<double>(sol(k - 1));
    return SampledFunction(0, K, std::move(v));
}

inline SampledFunction cascade_start(const FilterPair& f, CascadeInit init) {
    if (init == CascadeInit::IntegerEigenvector) return integer_values(f.h);
    std::vector<double> v(f.support_K + 1, 0.0);
    v[0] = 1.0;
    return SampledFunction(0, f.support_K, std::move(v));
}

/// phi_n on the level-n grid.
inline SampledFunction compute_scaling(const FilterPair& f, int n_iters,
                                       CascadeInit init = CascadeInit::IntegerEigenvector) {
    if (n_iters < 1) throw SupportMismatch("cascade needs at least one iteration");
    SampledFunction phi = cascade_start(f, init);
    for (int i = 0; i < n_iters; ++i) phi = cascade_step(phi, f.h);
    return phi;
}

/// psi_n(x) = sqrt2 sum_k g_k phi_n(2x - k), on the level-n grid.
inline SampledFunction compute_wavelet(const SampledFunction& phi, std::span<const double> g) {
    const int K = static_cast<int>(g.size()) - 1;
    if (phi.support_K != K)
        throw SupportMismatch("scaling function support does not match high-pass length");
    const std::int64_t shift = phi.points_per_unit();
    std::vector<double> out(phi.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        long double acc = 0;
        const auto two_i = static_cast<std::int64_t>(2 * i);
        for (int k = 0; k <= K; ++k) acc += g[k] * phi.at_index(two_i - k * shift);
        out[i] = static_cast<double>(std::sqrt(2.0L) * acc);
    }
    return SampledFunction(phi.level_n, K, std::move(out));
}

struct DerivativeBound {
    double M_G = 0;            // safety-scaled estimate at the finest level
    double raw = 0;            // max |central difference| at level n
    double coarse_raw = 0;     // same at level n - 3
    double growth = 0;         // raw / coarse_raw
    bool diverging = false;    // estimate grows with refinement: not C^1

    static constexpr double kSafetyFactor = 1.1;
    static constexpr double kDivergenceRatio = 1.5;
};

namespace detail {
inline double max_central_difference(const SampledFunction& f) {
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    const double inv_h = std::ldexp(1.0, f.level_n);
    double m = std::max(std::fabs(f[1] - f[0]), std::fabs(f[n - 1] - f[n - 2])) * inv_h;
    for (std::size_t i = 1; i + 1 < n; ++i) m = std::max(m, std::fabs(f[i + 1] - f[i - 1]) * 0.5 * inv_h);
    return m;
}
}  // namespace detail

/// Upper estimate of max |psi'| from finite differences. The same estimate three
/// levels coarser is compared to detect a derivative that blows up under refinement.
inline DerivativeBound derivative_bound(const SampledFunction& psi, int min_level = 8) {
    if (psi.level_n < min_level)
        throw GridTooCoarse("derivative bound needs grid level >= " + std::to_string(min_level) + ", got " +
                            std::to_string(psi.level_n));
    DerivativeBound b;
    b.raw = detail::max_central_difference(psi);
    b.coarse_raw = detail::max_central_difference(psi.coarsened(psi.level_n - 3));
    b.growth = b.coarse_raw > 0 ? b.raw / b.coarse_raw : (b.raw > 0 ? INFINITY : 1.0);
    b.diverging = b.growth > DerivativeBound::kDivergenceRatio;
    b.M_G = DerivativeBound::kSafetyFactor * b.raw;
    return b;
}

/// C 2^{-n s}.
inline double truncation_error_bound(double C, double s, int n) { return C * std::exp2(-static_cast<double>(n) * s); }

}  // namespace wavesat
