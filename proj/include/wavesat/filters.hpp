#pragma once

// Daubechies extremal-phase filter pairs built by spectral factorization.
//
// The half-band polynomial P(y) = sum_{k<p} C(p-1+k, k) y^k is factored in
// 50-digit arithmetic: companion-matrix eigenvalues (double) seed a Newton
// polish, each root y maps to the pair z, 1/z of z + 1/z = 2 - 4y, and the
// root inside the unit disk is kept. The low-pass filter is the coefficient
// sequence of (1 + z)^p * prod_k (1 - z_k z), rescaled so that sum h = sqrt 2.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "wavesat/error.hpp"

namespace wavesat {

inline constexpr int kMaxDaubechiesOrder = 45;

struct FilterPair {
    int order_p = 0;
    std::vector<double> h;  // low-pass, length 2p
    std::vector<double> g;  // high-pass, length 2p
    int support_K = 0;      // 2p - 1

    std::size_t length() const { return h.size(); }
};

/// g_k = (-1)^k h_{L-1-k}.
inline std::vector<double> qmf_highpass(const std::vector<double>& h) {
    if (h.empty() || h.size() % 2 != 0)
        throw OddLengthFilter("high-pass filter needs an even, non-empty low-pass filter (got length " +
                              std::to_string(h.size()) + ")");
    const std::size_t n = h.size();
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k)
        g[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[n - 1 - k];
    return g;
}

namespace detail {

using mp_real = boost::multiprecision::cpp_bin_float_50;
using mp_complex = boost::multiprecision::cpp_complex_50;

struct PolyEval {
    mp_complex value;
    mp_complex derivative;
};

// Horner on ascending coefficients.
inline PolyEval horner(const std::vector<mp_real>& a, const mp_complex& y) {
    mp_complex v = a.back();
    mp_complex d = 0;
    for (std::size_t i = a.size() - 1; i-- > 0;) {
        d = d * y + v;
        v = v * y + a[i];
    }
    return {v, d};
}

inline mp_real poly_abs_scale(const std::vector<mp_real>& a, const mp_complex& y) {
    mp_real s = 0, r = abs(y), pw = 1;
    for (const auto& c : a) {
        s += abs(c) * pw;
        pw *= r;
    }
    return s;
}

inline std::vector<std::complex<double>> companion_seeds(const std::vector<mp_real>& a) {
    const int deg = static_cast<int>(a.size()) - 1;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
    const mp_real lead = a.back();
    for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) C(i, deg - 1) = -static_cast<double>(a[i] / lead);
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw FactorizationFailure("companion eigenvalue solver did not converge");
    std::vector<std::complex<double>> out(deg);
    for (int i = 0; i < deg; ++i) out[i] = es.eigenvalues()[i];
    return out;
}

inline bool roots_acceptable(const std::vector<mp_real>& a, const std::vector<mp_complex>& roots,
                             const mp_real& residual_tol) {
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const mp_real scale = poly_abs_scale(a, roots[i]);
        if (!(abs(horner(a, roots[i]).value) <= residual_tol * scale)) return false;
        for (std::size_t j = 0; j < i; ++j)
            if (abs(roots[i] - roots[j]) < mp_real("1e-20") * (1 + abs(roots[i]))) return false;
    }
    return true;
}

inline void newton_polish(const std::vector<mp_real>& a, std::vector<mp_complex>& roots) {
    const mp_real stop("1e-44");
    for (auto& y : roots) {
        for (int it = 0; it < 200; ++it) {
            const PolyEval e = horner(a, y);
            if (e.derivative == mp_complex(0)) break;
            const mp_complex step = e.value / e.derivative;
            y -= step;
            if (abs(step) <= stop * (1 + abs(y))) break;
        }
    }
}

// Aberth-Ehrlich simultaneous iteration; used when independent Newton polishing
// lets two seeds collapse onto the same root.
inline void aberth(const std::vector<mp_real>& a, std::vector<mp_complex>& roots) {
    const mp_real stop("1e-44");
    for (int it = 0; it < 500; ++it) {
        mp_real worst = 0;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            const PolyEval e = horner(a, roots[i]);
            if (e.derivative == mp_complex(0)) continue;
            const mp_complex w = e.value / e.derivative;
            mp_complex repulse = 0;
            for (std::size_t j = 0; j < roots.size(); ++j)
                if (j != i) repulse += mp_complex(1) / (roots[i] - roots[j]);
            const mp_complex step = w / (mp_complex(1) - w * repulse);
            roots[i] -= step;
            const mp_real rel = abs(step) / (1 + abs(roots[i]));
            if (rel > worst) worst = rel;
        }
        if (worst <= stop) return;
    }
}

inline std::vector<mp_real> half_band_polynomial(int p) {
    std::vector<mp_real> a(p);
    for (int k = 0; k < p; ++k) {
        boost::multiprecision::cpp_int c = 1;
        // C(p-1+k, k)
        for (int i = 1; i <= k; ++i) c = c * (p - 1 + i) / i;
        a[k] = mp_real(c);
    }
    return a;
}

}  // namespace detail

/// Extremal-phase Daubechies filters with p vanishing moments, 1 <= p <= 45.
inline FilterPair daubechies_filters(int p) {
    using namespace detail;
    if (p < 1 || p > kMaxDaubechiesOrder)
        throw OrderOutOfRange("Daubechies order must lie in [1, " + std::to_string(kMaxDaubechiesOrder) +
                              "], got " + std::to_string(p));

    std::vector<mp_complex> zroots;
    if (p > 1) {
        const std::vector<mp_real> a = half_band_polynomial(p);
        std::vector<mp_complex> y;
        for (const auto& s : companion_seeds(a)) y.emplace_back(s.real(), s.imag());
        const mp_real tol("1e-40");
        newton_polish(a, y);
        if (!roots_acceptable(a, y, tol)) {
            y.clear();
            for (const auto& s : companion_seeds(a)) y.emplace_back(s.real(), s.imag());
            aberth(a, y);
            if (!roots_acceptable(a, y, tol))
                throw FactorizationFailure("half-band polynomial roots for order " + std::to_string(p) +
                                           " did not reach the residual tolerance");
        }
        for (const auto& yk : y) {
            const mp_complex b = mp_complex(2) - mp_complex(4) * yk;
            const mp_complex disc = sqrt(b * b - mp_complex(4));
            mp_complex z = (b - disc) / 2;
            if (abs(z) > 1) z = (b + disc) / 2;
            if (!(abs(z) < mp_real("0.999999999")))
                throw FactorizationFailure("root on the unit circle while factoring order " + std::to_string(p));
            zroots.push_back(z);
        }
    }

    // (1 + z)^p * prod (1 - z_k z), ascending powers.
    std::vector<mp_complex> poly{mp_complex(1)};
    auto multiply_linear = [&poly](const mp_complex& c0, const mp_complex& c1) {
        std::vector<mp_complex> next(poly.size() + 1, mp_complex(0));
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i] * c0;
            next[i + 1] += poly[i] * c1;
        }
        poly.swap(next);
    };
    for (int i = 0; i < p; ++i) multiply_linear(mp_complex(1), mp_complex(1));
    for (const auto& z : zroots) multiply_linear(mp_complex(1), -z);

    mp_real sum = 0, imag_max = 0, real_max = 0;
    for (const auto& c : poly) {
        sum += c.real();
        imag_max = std::max<mp_real>(imag_max, abs(c.imag()));
        real_max = std::max<mp_real>(real_max, abs(c.real()));
    }
    if (imag_max > mp_real("1e-30") * real_max)
        throw FactorizationFailure("conjugate root pairing failed for order " + std::to_string(p));

    const mp_real scale = boost::multiprecision::sqrt(mp_real(2)) / sum;
    FilterPair f;
    f.order_p = p;
    f.support_K = 2 * p - 1;
    f.h.resize(poly.size());
    for (std::size_t k = 0; k < poly.size(); ++k) f.h[k] = static_cast<double>(poly[k].real() * scale);
    f.g = qmf_highpass(f.h);
    return f;
}

struct FilterValidation {
    double sum_residual = 0;            // |sum h - sqrt 2|
    double orthonormality_residual = 0; // max_m |sum h_k h_{k+2m} - delta_m|
    double qmf_residual = 0;            // max_k |g_k - (-1)^k h_{L-1-k}|
    double highpass_sum_residual = 0;   // |sum g|
    double moment_residual = 0;         // max_{m<p} |sum (k/(L-1))^m g_k|
    double tolerance = 0;
    double moment_tolerance = 0;
    bool pass = false;
};

/// Tolerance on sum/orthonormality/QMF residuals for a given order.
inline double filter_tolerance(int p) { return p <= 10 ? 1e-12 : 1e-8; }
inline constexpr double kMomentTolerance = 1e-8;

/// Residual of every FilterPair invariant. Moments use the normalized abscissa
/// k/(L-1) so that high orders stay within double range.
inline FilterValidation validate_filters(const FilterPair& f) {
    FilterValidation r;
    r.tolerance = filter_tolerance(f.order_p);
    r.moment_tolerance = kMomentTolerance;
    const std::size_t n = f.h.size();
    const bool shape_ok = n == f.g.size() && n == static_cast<std::size_t>(2 * f.order_p) && n >= 2 &&
                          f.support_K == 2 * f.order_p - 1;
    if (!shape_ok) {
        r.sum_residual = r.orthonormality_residual = r.qmf_residual = r.moment_residual = INFINITY;
        return r;
    }

    long double s = 0, sg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        s += f.h[k];
        sg += f.g[k];
    }
    r.sum_residual = static_cast<double>(std::fabs(s - std::sqrt(2.0L)));
    r.highpass_sum_residual = static_cast<double>(std::fabs(sg));

    for (std::size_t m = 0; 2 * m < n; ++m) {
        long double acc = 0;
        for (std::size_t k = 0; k + 2 * m < n; ++k) acc += static_cast<long double>(f.h[k]) * f.h[k + 2 * m];
        const long double target = m == 0 ? 1.0L : 0.0L;
        r.orthonormality_residual = std::max(r.orthonormality_residual, static_cast<double>(std::fabs(acc - target)));
    }

    for (std::size_t k = 0; k < n; ++k) {
        const double expect = (k % 2 == 0 ? 1.0 : -1.0) * f.h[n - 1 - k];
        r.qmf_residual = std::max(r.qmf_residual, std::fabs(f.g[k] - expect));
    }

    for (int m = 0; m < f.order_p; ++m) {
        long double acc = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const long double t = static_cast<long double>(k) / static_cast<long double>(n - 1);
            acc += std::pow(t, m) * f.g[k];
        }
        r.moment_residual = std::max(r.moment_residual, static_cast<double>(std::fabs(acc)));
    }

    r.pass = r.sum_residual < r.tolerance && r.orthonormality_residual < r.tolerance &&
             r.qmf_residual < r.tolerance && r.highpass_sum_residual < r.tolerance &&
             r.moment_residual < r.moment_tolerance;
    return r;
}

}  // namespace wavesat
