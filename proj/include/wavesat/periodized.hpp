#pragma once

// The K-periodic function G(x) = sum_p psi(x - pK), evaluated exactly at dyadic
// arguments, and the schedule constants of the non-vanishing construction.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wavesat/analysis.hpp"
#include "wavesat/cascade.hpp"
#include "wavesat/dyadic.hpp"
#include "wavesat/error.hpp"

namespace wavesat {

namespace detail {

// 2^-bits * rem for 0 <= rem < 2^bits.
inline double fraction(const BigInt& rem, std::int64_t bits) {
    if (rem == 0) return 0.0;
    const auto top = static_cast<std::int64_t>(boost::multiprecision::msb(rem));
    if (top <= 62) return std::ldexp(static_cast<double>(static_cast<std::uint64_t>(rem)), static_cast<int>(-std::min<std::int64_t>(bits, 100000)));
    const auto drop = static_cast<unsigned>(top - 62);
    const auto head = static_cast<std::uint64_t>(rem >> drop);
    return std::ldexp(static_cast<double>(head), static_cast<int>(std::max<std::int64_t>(-100000, static_cast<std::int64_t>(drop) - bits)));
}

inline double lerp_cell(const SampledFunction& psi, std::size_t idx, double t) {
    const double a = psi.values[idx];
    if (t == 0.0) return a;
    return (1.0 - t) * a + t * psi.values[idx + 1];
}

// psi at r / 2^L for an exact representative 0 <= r < K 2^L.
inline double value_at_reduced(const SampledFunction& psi, const BigInt& r, std::int64_t L) {
    const std::int64_t n = psi.level_n;
    if (L <= n) return psi.values[static_cast<std::size_t>(r << static_cast<unsigned>(n - L))];
    const auto shift = static_cast<unsigned>(L - n);
    const BigInt idx = r >> shift;
    const BigInt rem = r - (idx << shift);
    return lerp_cell(psi, static_cast<std::size_t>(idx), fraction(rem, shift));
}

inline double value_at_reduced(const SampledFunction& psi, std::uint64_t r, int L) {
    const int n = psi.level_n;
    if (L <= n) return psi.values[static_cast<std::size_t>(r << (n - L))];
    const int shift = L - n;
    const std::uint64_t idx = r >> shift;
    const std::uint64_t rem = r & ((std::uint64_t{1} << shift) - 1);
    return lerp_cell(psi, static_cast<std::size_t>(idx), std::ldexp(static_cast<double>(rem), -shift));
}

inline int mod_K(long long p, int K) {
    const long long r = p % K;
    return static_cast<int>(r < 0 ? r + K : r);
}

}  // namespace detail

/// G(x) = psi(x mod K): exact reduction, then grid lookup or linear interpolation.
inline double G_eval(const SampledFunction& psi, const DyadicRational& x) {
    const DyadicRational r = x.reduce_mod(psi.support_K);
    return detail::value_at_reduced(psi, r.numerator(), r.exponent());
}

namespace detail {
// psi at the integer residue of 2^e * num - p modulo K.
inline double integer_argument(const SampledFunction& psi, const BigInt& num, const BigInt& e, long long p) {
    const int K = psi.support_K;
    BigInt m = num % K;
    if (m < 0) m += K;
    const BigInt pw = boost::multiprecision::powm(BigInt(2), e, BigInt(K));
    BigInt r = (m * pw - p) % K;
    if (r < 0) r += K;
    return psi.values[static_cast<std::size_t>(r) * static_cast<std::size_t>(psi.points_per_unit())];
}
}  // namespace detail

/// G(2^j x - p). Once 2^j x is an integer the residue comes from modular
/// exponentiation, so j is unbounded.
inline double G1_eval(const SampledFunction& psi, const BigInt& j, long long p, const DyadicRational& x) {
    if (j < 0) throw SupportMismatch("scale index must be non-negative");
    if (j >= x.exponent()) return detail::integer_argument(psi, x.numerator(), j - x.exponent(), p);
    return G_eval(psi, x.times_pow2(static_cast<std::int64_t>(j)) - DyadicRational(p));
}

inline double G1_eval(const SampledFunction& psi, std::int64_t j, long long p, const DyadicRational& x) {
    return G1_eval(psi, BigInt(j), p, x);
}

/// prod_i G(2^j x_i - p_i).
inline double Gd_eval(const SampledFunction& psi, std::int64_t j, std::span<const int> p_bar,
                      std::span<const DyadicRational> x) {
    if (p_bar.size() != x.size())
        throw DimensionMismatch("translate vector has " + std::to_string(p_bar.size()) + " entries, point has " +
                                std::to_string(x.size()));
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) prod *= G1_eval(psi, j, p_bar[i], x[i]);
    return prod;
}

/// Residues r_j = 2^j num mod K 2^L of a fixed point x = num / 2^L, advanced one
/// scale at a time in 64-bit arithmetic. Usable when K 2^L < 2^62.
class DoublingOrbit {
public:
    static bool fits(const DyadicRational& x, int K) {
        return x.exponent() <= 56 && std::bit_width(static_cast<unsigned>(K)) + x.exponent() <= 62;
    }

    DoublingOrbit(const DyadicRational& x, int K) : K_(K), L_(static_cast<int>(x.exponent())) {
        if (!fits(x, K)) throw HorizonOverflow("point " + x.str() + " needs more than 62 bits per residue");
        M_ = static_cast<std::uint64_t>(K) << L_;
        BigInt r = x.numerator() % BigInt(M_);
        if (r < 0) r += M_;
        r_ = static_cast<std::uint64_t>(r);
    }

    std::int64_t scale() const { return j_; }
    void advance() {
        r_ = (r_ << 1) % M_;
        ++j_;
    }

    /// G(2^j x - p) at the current scale j.
    double value(const SampledFunction& psi, long long p) const {
        const std::uint64_t shift = static_cast<std::uint64_t>(detail::mod_K(p, K_)) << L_;
        const std::uint64_t pos = r_ >= shift ? r_ - shift : r_ + M_ - shift;
        return detail::value_at_reduced(psi, pos, L_);
    }

private:
    int K_;
    int L_;
    std::uint64_t M_ = 0;
    std::uint64_t r_ = 0;
    std::int64_t j_ = 0;
};

/// Points 2^-j (k K + p + z_i) inside [a, b], sorted, with coincident points merged.
inline std::vector<double> zeros_at_scale(const ZeroSet& z, int j, long long p, double a, double b) {
    std::vector<double> out;
    if (z.zeros.empty() || b < a) return out;
    const double K = z.support_K;
    const double scale = std::ldexp(1.0, j);
    const auto k_lo = static_cast<long long>(std::floor((a * scale - static_cast<double>(p) - K) / K)) - 1;
    const auto k_hi = static_cast<long long>(std::ceil((b * scale - static_cast<double>(p)) / K)) + 1;
    for (long long k = k_lo; k <= k_hi; ++k) {
        for (double zi : z.zeros) {
            const double v = std::ldexp(static_cast<double>(k) * K + static_cast<double>(p) + zi, -j);
            if (v >= a && v <= b) out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// log2 of a positive big integer.
inline double log2_big(const BigInt& v) {
    if (v <= 0) return -INFINITY;
    const auto top = static_cast<std::int64_t>(boost::multiprecision::msb(v));
    if (top < 62) return std::log2(static_cast<double>(v));
    const double head = static_cast<double>(static_cast<std::uint64_t>(v >> static_cast<unsigned>(top - 52)));
    return std::log2(head) + static_cast<double>(top - 52);
}

/// Largest schedule count materialized exactly, in bits.
inline constexpr std::int64_t kMaxScheduleBits = std::int64_t{1} << 24;

/// N(1) = 2(N + 1),  N(d) = 2 (N(d-1) + 1)^d 2^{N(d-1)}.
inline std::vector<BigInt> schedule_counts(std::size_t N, int d) {
    if (d < 1) throw DimensionMismatch("dimension must be at least 1");
    std::vector<BigInt> s;
    s.push_back(BigInt(2) * (BigInt(N) + 1));
    for (int dd = 2; dd <= d; ++dd) {
        const BigInt& prev = s.back();
        if (prev >= kMaxScheduleBits)
            throw HorizonOverflow("schedule count N(" + std::to_string(dd) + ") has more than 2^24 bits");
        BigInt base = prev + 1, pw = 1;
        for (int i = 0; i < dd; ++i) pw *= base;
        s.push_back(BigInt(2) * pw * (BigInt(1) << static_cast<unsigned>(prev)));
    }
    return s;
}

struct ScheduleParams {
    std::size_t N = 0;
    int d = 1;
    std::vector<BigInt> schedule;  // N(1), ..., N(d)
    double eta = 0;
    double M_G = 0;
    double min_gap = 0;
    double eps_d_log2 = 0;       // log2 (eta / (2^{N(d)+1} M_G))
    double eps_prime_log2 = 0;   // log2 (min_gap / (4 2^{N(d)}))
    double omega_log2 = 0;       // min of the two
    double alpha_tilde_log2 = 0;
    double alpha_log2 = 0;       // min(log2(eta / 2), alpha_tilde_log2)
    double alpha_tilde = 0;      // 2^alpha_tilde_log2; zero when it underflows
    double alpha = 0;            // 2^alpha_log2; zero when it underflows

    const BigInt& block_length() const { return schedule.back(); }
    const BigInt& count(int dd) const { return schedule.at(static_cast<std::size_t>(dd - 1)); }
    double omega() const { return std::exp2(omega_log2); }
};

/// Fills every schedule field; alpha_tilde_log2 is taken as given.
inline ScheduleParams schedule_params(const ZeroSet& z, double eta, double M_G, double alpha_tilde_log2, int d) {
    if (z.N() < 2) throw DegenerateSchedule("schedule needs at least the two endpoint zeros");
    if (!(eta > 0)) throw DegenerateSchedule("schedule needs eta > 0");
    if (!(M_G > 0)) throw DegenerateSchedule("schedule needs M_G > 0");
    ScheduleParams s;
    s.N = z.N();
    s.d = d;
    s.schedule = schedule_counts(z.N(), d);
    s.eta = eta;
    s.M_G = M_G;
    s.min_gap = z.min_gap;
    const double Nd = static_cast<double>(s.block_length());  // inf beyond double range
    s.eps_d_log2 = std::log2(eta) - (Nd + 1.0) - std::log2(M_G);
    s.eps_prime_log2 = std::log2(z.min_gap / 4.0) - Nd;
    s.omega_log2 = std::min(s.eps_d_log2, s.eps_prime_log2);
    s.alpha_tilde_log2 = alpha_tilde_log2;
    s.alpha_log2 = std::min(std::log2(eta / 2.0), alpha_tilde_log2);
    s.alpha_tilde = std::exp2(s.alpha_tilde_log2);
    s.alpha = std::exp2(s.alpha_log2);
    return s;
}

struct SaturationFloor {
    double log2_value = INFINITY;  // log2 min |G| over the complement of the omega-balls
    double location = 0;           // a point where it is attained
};

/// min |G| over [0, K] minus the open omega-balls around the zeros, evaluated on
/// the sampled model: all grid points outside the balls and the ball boundaries
/// z +- omega. Representatives of sign changes count as exact roots of the
/// interpolant, so their boundary value is the one-sided slope times omega.
inline SaturationFloor saturation_floor(const SampledFunction& psi, const ZeroSet& z, double omega_log2) {
    SaturationFloor best;
    if (z.zeros.empty()) return best;
    auto consider = [&best](double lg, double where) {
        if (lg < best.log2_value) {
            best.log2_value = lg;
            best.location = where;
        }
    };
    const double omega = std::exp2(omega_log2);
    const std::size_t last = psi.size() - 1;

    std::size_t zi = 0;
    for (std::size_t i = 0; i <= last; ++i) {
        const double x = psi.x(i);
        while (zi + 1 < z.zeros.size() && z.zeros[zi + 1] <= x) ++zi;
        double dist = std::fabs(x - z.zeros[zi]);
        if (zi + 1 < z.zeros.size()) dist = std::min(dist, std::fabs(z.zeros[zi + 1] - x));
        if (dist == 0.0 || dist < omega) continue;
        consider(std::log2(std::fabs(psi[i])), x);
    }

    const int n = psi.level_n;
    const bool resolvable = omega_log2 > -(n + 40.0);
    for (std::size_t k = 0; k < z.zeros.size(); ++k) {
        for (int side : {-1, 1}) {
            if (k == 0 && side < 0) continue;                     // same point as K - omega
            if (k + 1 == z.zeros.size() && side > 0) continue;    // same point as 0 + omega
            const double c = z.zeros[k];
            const double a = z.crossing[k] ? 0.0 : psi.interpolate(c);
            if (resolvable) {
                const double y = c + side * omega;
                const double v = psi.interpolate(y) - (z.crossing[k] ? psi.interpolate(c) : 0.0);
                consider(std::log2(std::fabs(v)), y);
                continue;
            }
            const double pos = std::ldexp(c, n);
            auto i = static_cast<std::size_t>(std::floor(pos));
            if (static_cast<double>(i) == pos && side < 0) i = i - 1;  // left cell of a grid point
            i = std::min(i, last - 1);
            const double slope = (psi[i + 1] - psi[i]) * std::ldexp(1.0, n);
            const double slope_log2 = std::log2(std::fabs(slope)) + omega_log2;
            if (a == 0.0) {
                consider(slope_log2, c);
            } else if (slope_log2 < std::log2(std::fabs(a)) - 60.0) {
                consider(std::log2(std::fabs(a)), c);
            } else {
                consider(std::log2(std::fabs(a + side * slope * omega)), c);
            }
        }
    }
    return best;
}

/// Schedule for psi from its property (R) report, using the certified eta.
inline ScheduleParams make_schedule(const SampledFunction& psi, const PropertyRReport& report, int d) {
    if (!report.r3_pass) throw DegenerateSchedule("saturation is not certified positive");
    ScheduleParams s = schedule_params(report.zero_set, report.eta_certified, report.M_G, 0.0, d);
    if (std::isfinite(s.omega_log2)) {
        const SaturationFloor f = saturation_floor(psi, report.zero_set, s.omega_log2);
        if (!(f.log2_value > -INFINITY))
            throw DegenerateSchedule("G vanishes outside the omega-neighbourhood of the zero set (near x = " +
                                     std::to_string(f.location) + ")");
        s = schedule_params(report.zero_set, report.eta_certified, report.M_G, f.log2_value, d);
    } else {
        s = schedule_params(report.zero_set, report.eta_certified, report.M_G, -INFINITY, d);
    }
    return s;
}

}  // namespace wavesat
