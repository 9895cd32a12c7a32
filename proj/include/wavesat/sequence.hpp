#pragma once

// Translate schedules (p_j) for which every window of N(d) + 1 consecutive scales
// contains a scale where prod_i |G(2^j x_i - p_{j,i})| is bounded below.
//
// A plan is a sequence of blocks in coordinates relative to the block's base
// scale R, y = 2^R x mod K. A block of dimension d has length
//   L(d) = 1 + N^d + sum_{k=1}^{d-1} C(d,k) N^k N(d-k)
// and is laid out as
//   offset 0                 reset: all translates 0 (y far from every zero);
//   offsets 1 .. N^d         one scale per tuple (m_1..m_d) of zero indices,
//                            each coordinate saturated at its zero centre;
//   the rest                 one range of N(d-k) scales per mixed tuple with k
//                            non-zero indices, in lexicographic order: those k
//                            coordinates stay saturated at their centres while
//                            the others follow a periodic (d-k)-dimensional plan.
// Blocks repeat with period L(d) inside a top-level period of N(d) scales.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wavesat/dyadic.hpp"
#include "wavesat/error.hpp"
#include "wavesat/periodized.hpp"

namespace wavesat {

using Point = std::vector<DyadicRational>;

enum class CellKind { BlockReset, BoundaryCell, InteriorCell };

inline std::string_view to_string(CellKind k) {
    switch (k) {
        case CellKind::BlockReset: return "block-reset";
        case CellKind::BoundaryCell: return "boundary-cell";
        case CellKind::InteriorCell: return "interior-cell";
    }
    return "?";
}

inline CellKind cell_kind_from_string(std::string_view s) {
    if (s == "block-reset") return CellKind::BlockReset;
    if (s == "boundary-cell") return CellKind::BoundaryCell;
    if (s == "interior-cell") return CellKind::InteriorCell;
    throw ParseError("unknown provenance tag '" + std::string(s) + "'");
}

struct PlanEntry {
    std::vector<int> p;  // translate per coordinate, in [0, K)
    CellKind kind = CellKind::BlockReset;
    // Per coordinate: index into the zero list of the centre it is saturated
    // at (-1 if free), and the block-relative scale of that saturation.
    std::vector<int> center;
    std::vector<BigInt> center_scale;
};

/// argmax_p |G(2^j c - p)| over p in [0, K), smallest p on ties.
inline int select_p(const SampledFunction& psi, const BigInt& j, const DyadicRational& c, double eta) {
    int best_p = 0;
    double best = -1.0;
    for (int p = 0; p < psi.support_K; ++p) {
        const double v = std::fabs(G1_eval(psi, j, p, c));
        if (v > best) {
            best = v;
            best_p = p;
        }
    }
    if (best < eta)
        throw SaturationFailure("max_p |G(2^j c - p)| = " + std::to_string(best) + " < eta = " + std::to_string(eta) +
                                " at c = " + c.str() + ", j = " + j.str());
    return best_p;
}

inline int select_p(const SampledFunction& psi, std::int64_t j, const DyadicRational& c, double eta) {
    return select_p(psi, BigInt(j), c, eta);
}

/// The recursive block structure; entries are computed on demand and memoized.
class PlanLayout {
public:
    PlanLayout(std::shared_ptr<const SampledFunction> psi, const ScheduleParams& params, int d, int p_first = 0)
        : psi_(std::move(psi)), eta_(params.eta), N_(params.N), d_(d), p_first_(p_first) {
        if (d < 1 || d > params.d)
            throw DimensionMismatch("layout dimension " + std::to_string(d) + " outside schedule dimension " +
                                    std::to_string(params.d));
        count_ = params.schedule;
        L_.assign(static_cast<std::size_t>(d) + 1, BigInt(0));
        mixed_.resize(static_cast<std::size_t>(d) + 1);
        for (int dd = 1; dd <= d; ++dd) build_level(dd);
    }

    void set_centers(const std::vector<double>& zeros) {
        centers_.clear();
        for (double v : zeros) centers_.push_back(DyadicRational::from_double(v));
        if (centers_.size() != N_) throw DimensionMismatch("zero list does not match the schedule's zero count");
    }

    int dimension() const { return d_; }
    std::size_t zero_count() const { return N_; }
    const BigInt& block_length() const { return count_.at(static_cast<std::size_t>(d_ - 1)); }
    const BigInt& inner_period(int dd) const { return L_.at(static_cast<std::size_t>(dd)); }
    const BigInt& inner_period() const { return inner_period(d_); }
    const DyadicRational& center(int m) const { return centers_.at(static_cast<std::size_t>(m)); }
    int first_shift() const { return p_first_; }

    /// Entry at plan-relative scale u >= 0.
    PlanEntry entry(const BigInt& u) const {
        const BigInt offset = (u % block_length()) % inner_period();
        const int shift = (u < inner_period()) ? p_first_ : 0;
        return block_entry(d_, offset, shift);
    }

    /// Entry at block-relative offset t of a dd-dimensional block.
    PlanEntry block_entry(int dd, const BigInt& t, int shift = 0) const {
        if (shift == 0) {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = memo_.find({dd, t});
            if (it != memo_.end()) return it->second;
        }
        PlanEntry e = compute(dd, t, shift);
        if (shift == 0) {
            std::lock_guard<std::mutex> lock(mu_);
            if (memo_.size() < kMemoCap) memo_.emplace(std::make_pair(dd, t), e);
        }
        return e;
    }

private:
    static constexpr std::size_t kMemoCap = std::size_t{1} << 20;

    struct MixedRange {
        BigInt start;  // offset of the range's first scale after the boundary cells
        BigInt span;   // N(dd - k)
        std::vector<int> m;
        int k;
    };

    BigInt pow_N(int e) const {
        BigInt r = 1;
        for (int i = 0; i < e; ++i) r *= N_;
        return r;
    }

    void build_level(int dd) {
        BigInt total = 0;
        std::vector<MixedRange>& ranges = mixed_[static_cast<std::size_t>(dd)];
        const std::size_t base = N_ + 1;
        std::size_t tuples = 1;
        for (int i = 0; i < dd; ++i) {
            if (tuples > (std::size_t{1} << 26) / base)
                throw HorizonOverflow("too many zero-index tuples for dimension " + std::to_string(dd));
            tuples *= base;
        }
        for (std::size_t idx = 0; idx < tuples; ++idx) {
            std::vector<int> m(static_cast<std::size_t>(dd));
            std::size_t v = idx;
            for (int i = dd - 1; i >= 0; --i) {  // first coordinate most significant
                m[static_cast<std::size_t>(i)] = static_cast<int>(v % base);
                v /= base;
            }
            const int k = static_cast<int>(std::count_if(m.begin(), m.end(), [](int x) { return x != 0; }));
            if (k == 0 || k == dd) continue;
            const BigInt span = count_.at(static_cast<std::size_t>(dd - k - 1));
            ranges.push_back({total, span, std::move(m), k});
            total += span;
        }
        L_[static_cast<std::size_t>(dd)] = 1 + pow_N(dd) + total;
    }

    int select(const BigInt& t, int m, int shift) const {
        const DyadicRational c = centers_.at(static_cast<std::size_t>(m)) + DyadicRational(shift);
        if (shift != 0) return select_p(*psi_, t, c, eta_);
        std::lock_guard<std::mutex> lock(mu_);
        auto it = select_memo_.find({t, m});
        if (it != select_memo_.end()) return it->second;
        const int p = select_p(*psi_, t, c, eta_);
        select_memo_.emplace(std::make_pair(t, m), p);
        return p;
    }

    PlanEntry compute(int dd, const BigInt& t, int shift) const {
        const auto n = static_cast<std::size_t>(dd);
        PlanEntry e;
        e.p.assign(n, 0);
        e.center.assign(n, -1);
        e.center_scale.assign(n, BigInt(0));
        if (t == 0) {
            std::fill(e.p.begin(), e.p.end(), detail::mod_K(shift, psi_->support_K));
            e.kind = CellKind::BlockReset;
            return e;
        }
        const BigInt boundary = pow_N(dd);
        if (t <= boundary) {
            e.kind = CellKind::BoundaryCell;
            BigInt v = t - 1;
            for (std::size_t i = 0; i < n; ++i) {
                const int m = static_cast<int>(v % N_);  // zero index m_i - 1
                v /= N_;
                e.p[i] = select(t, m, shift);
                e.center[i] = m;
                e.center_scale[i] = t;
            }
            return e;
        }
        e.kind = CellKind::InteriorCell;
        const BigInt u = t - 1 - boundary;
        const std::vector<MixedRange>& ranges = mixed_[n];
        auto it = std::upper_bound(ranges.begin(), ranges.end(), u,
                                   [](const BigInt& val, const MixedRange& r) { return val < r.start; });
        const MixedRange& r = *std::prev(it);
        const BigInt s = u - r.start;
        const int free_dim = dd - r.k;
        const PlanEntry sub = block_entry(free_dim, s % inner_period(free_dim));
        std::size_t fi = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (r.m[i] != 0) {
                const int m = r.m[i] - 1;
                e.p[i] = select(t, m, shift);
                e.center[i] = m;
                e.center_scale[i] = t;
            } else {
                e.p[i] = sub.p[fi];
                e.center[i] = sub.center[fi];
                e.center_scale[i] = sub.center_scale[fi];
                ++fi;
            }
        }
        return e;
    }

    std::shared_ptr<const SampledFunction> psi_;
    double eta_;
    std::size_t N_;
    int d_;
    int p_first_;
    std::vector<BigInt> count_;  // N(1..)
    std::vector<BigInt> L_;      // L(0..d); L(0) unused
    std::vector<std::vector<MixedRange>> mixed_;
    std::vector<DyadicRational> centers_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<int, BigInt>, PlanEntry> memo_;
    mutable std::map<std::pair<BigInt, int>, int> select_memo_;
};

struct SequencePlan {
    int dimension_d = 1;
    long long first_scale = 0;     // J of the first entry
    long long horizon_J_max = 0;   // last scale covered
    BigInt block_length = 0;       // N(d)
    BigInt inner_period = 0;       // L(d)
    std::vector<PlanEntry> entries;  // scales first_scale .. horizon_J_max, empty when lazy
    std::shared_ptr<const PlanLayout> layout;

    bool materialized() const { return !entries.empty(); }

    /// Entry at absolute scale j; periodic beyond the stored horizon.
    PlanEntry entry(long long j) const {
        if (j < first_scale) throw PlanTooShort("plan starts at scale " + std::to_string(first_scale));
        const long long u = j - first_scale;
        if (j <= horizon_J_max && materialized()) return entries[static_cast<std::size_t>(u)];
        if (layout) return layout->entry(BigInt(u));
        // periodic extension of a stored plan
        const BigInt r = BigInt(u) % block_length;
        if (r + first_scale > horizon_J_max || !materialized())
            throw PlanTooShort("scale " + std::to_string(j) + " is beyond the plan horizon " +
                               std::to_string(horizon_J_max));
        return entries[static_cast<std::size_t>(r)];
    }

    std::vector<int> translates(long long j) const { return entry(j).p; }
};

struct PlanOptions {
    bool eager = true;
    long long max_eager_entries = 1LL << 22;
};

namespace detail {
inline SequencePlan make_plan(std::shared_ptr<const PlanLayout> layout, long long first, long long horizon,
                              const PlanOptions& opt) {
    if (horizon < 0) throw HorizonOverflow("horizon must be non-negative");
    SequencePlan plan;
    plan.dimension_d = layout->dimension();
    plan.first_scale = first;
    plan.horizon_J_max = first + horizon;
    plan.block_length = layout->block_length();
    plan.inner_period = layout->inner_period();
    if (opt.eager) {
        if (layout->dimension() >= 3)
            throw HorizonOverflow("eager plans are limited to dimension 2; request a lazy plan");
        if (horizon + 1 > opt.max_eager_entries)
            throw HorizonOverflow("horizon " + std::to_string(horizon) + " exceeds the eager cap of " +
                                  std::to_string(opt.max_eager_entries) + " entries");
        plan.entries.reserve(static_cast<std::size_t>(horizon + 1));
        for (long long u = 0; u <= horizon; ++u) plan.entries.push_back(layout->entry(BigInt(u)));
    }
    plan.layout = std::move(layout);
    return plan;
}

inline std::shared_ptr<PlanLayout> make_layout(const SampledFunction& psi, const ScheduleParams& params, int d,
                                               const std::vector<double>& zeros, int p_first) {
    if (zeros.size() != params.N) throw DimensionMismatch("zero list does not match the schedule's zero count");
    auto layout = std::make_shared<PlanLayout>(std::make_shared<const SampledFunction>(psi), params, d, p_first);
    layout->set_centers(zeros);
    return layout;
}
}  // namespace detail

/// One-dimensional plan for scales J .. J + horizon; the first block is based at
/// translate p_J, later blocks reset to 0.
inline SequencePlan build_sequence_1d(const SampledFunction& psi, const ScheduleParams& params,
                                      const std::vector<double>& zeros, long long J, int p_J, long long horizon,
                                      const PlanOptions& opt = {}) {
    return detail::make_plan(detail::make_layout(psi, params, 1, zeros, p_J), J, horizon, opt);
}

/// d-dimensional plan for scales 0 .. horizon.
inline SequencePlan build_sequence_nd(const SampledFunction& psi, const ScheduleParams& params,
                                      const std::vector<double>& zeros, int d, long long horizon,
                                      const PlanOptions& opt = {}) {
    return detail::make_plan(detail::make_layout(psi, params, d, zeros, 0), 0, horizon, opt);
}

/// Per-scale log2 |G^d_{j, p_j}(x)| for j in [j_first, j_last].
inline std::vector<double> scale_profile(const SampledFunction& psi, const SequencePlan& plan, const Point& x,
                                         long long j_first, long long j_last,
                                         std::span<const PlanEntry> cached = {}) {
    if (x.size() != static_cast<std::size_t>(plan.dimension_d))
        throw DimensionMismatch("point dimension " + std::to_string(x.size()) + " does not match plan dimension " +
                                std::to_string(plan.dimension_d));
    const std::size_t count = j_last >= j_first ? static_cast<std::size_t>(j_last - j_first + 1) : 0;
    std::vector<double> out(count, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int K = psi.support_K;
        if (DoublingOrbit::fits(x[i], K)) {
            DoublingOrbit orbit(x[i], K);
            while (orbit.scale() < j_first) orbit.advance();
            for (std::size_t s = 0; s < count; ++s) {
                const long long j = j_first + static_cast<long long>(s);
                const int p = cached.empty() ? plan.entry(j).p[i] : cached[s].p[i];
                out[s] += std::log2(std::fabs(orbit.value(psi, p)));
                orbit.advance();
            }
        } else {
            for (std::size_t s = 0; s < count; ++s) {
                const long long j = j_first + static_cast<long long>(s);
                const int p = cached.empty() ? plan.entry(j).p[i] : cached[s].p[i];
                out[s] += std::log2(std::fabs(G1_eval(psi, static_cast<std::int64_t>(j), p, x[i])));
            }
        }
    }
    return out;
}

namespace detail {
inline long long window_cap(const SequencePlan& plan) {
    return plan.block_length > BigInt(std::numeric_limits<long long>::max() / 4)
               ? std::numeric_limits<long long>::max() / 4
               : static_cast<long long>(plan.block_length);
}
}  // namespace detail

/// Smallest w such that every sample and every J in [J_first, J_last] has a
/// scale j in [J, J + w] with log2 |G^d_{j,p_j}(x)| >= d alpha_log2.
inline long long greedy_window(const SampledFunction& psi, const SequencePlan& plan, double alpha_log2,
                               const std::vector<Point>& samples, long long J_first, long long J_last) {
    const long long cap = detail::window_cap(plan);
    const long long j_last = std::min(plan.horizon_J_max, J_last + cap);
    if (J_last > plan.horizon_J_max) throw PlanTooShort("J range exceeds the plan horizon");
    std::vector<PlanEntry> cached;
    for (long long j = J_first; j <= j_last; ++j) cached.push_back(plan.entry(j));
    const double threshold = plan.dimension_d * alpha_log2;
    long long w = 0;
    for (const Point& x : samples) {
        const std::vector<double> prof = scale_profile(psi, plan, x, J_first, j_last, cached);
        // next_ok[s]: first s' >= s meeting the threshold
        std::vector<long long> next_ok(prof.size() + 1, -1);
        for (std::size_t s = prof.size(); s-- > 0;)
            next_ok[s] = prof[s] >= threshold ? static_cast<long long>(s) : next_ok[s + 1];
        for (long long J = J_first; J <= J_last; ++J) {
            const long long s = next_ok[static_cast<std::size_t>(J - J_first)];
            const long long offset = s < 0 ? -1 : s - (J - J_first);
            if (offset < 0 || offset > cap)
                throw WindowNotFound("no scale within " + std::to_string(cap) + " of J = " + std::to_string(J) +
                                     " meets the bound");
            w = std::max(w, offset);
        }
    }
    return w;
}

struct MvtCheck {
    std::size_t checked = 0;   // saturated coordinates examined
    std::size_t failures = 0;
    double min_center = INFINITY;  // min |G| at the centres
    double min_edge = INFINITY;    // min |G| at centre +- omega
    bool skipped = false;          // omega not representable as a dyadic rational
};

/// Three-point check of the saturation bound over each omega-ball: for every
/// saturated coordinate in the first block, |G| >= eta at the centre and
/// >= eta / 2 at centre +- 2^floor(log2 omega).
inline MvtCheck mvt_three_point_check(const SampledFunction& psi, const SequencePlan& plan,
                                      const ScheduleParams& params) {
    MvtCheck r;
    if (!plan.layout) throw PlanTooShort("MVT check needs a generated plan");
    if (!std::isfinite(params.omega_log2) || params.omega_log2 < -double(std::int64_t{1} << 22)) {
        r.skipped = true;
        return r;
    }
    const auto e = static_cast<std::int64_t>(std::floor(params.omega_log2));
    const DyadicRational omega(BigInt(1), -e);
    const PlanLayout& layout = *plan.layout;
    const BigInt period = layout.inner_period();
    const long long count = period > 1 << 24 ? 1 << 24 : static_cast<long long>(period);
    for (long long u = 0; u < count; ++u) {
        const PlanEntry entry = layout.entry(BigInt(u));
        for (std::size_t i = 0; i < entry.p.size(); ++i) {
            if (entry.center[i] < 0) continue;
            const DyadicRational c = layout.center(entry.center[i]) + DyadicRational(layout.first_shift());
            const BigInt& t = entry.center_scale[i];
            const double vc = std::fabs(G1_eval(psi, t, entry.p[i], c));
            const double vl = std::fabs(G1_eval(psi, t, entry.p[i], c - omega));
            const double vr = std::fabs(G1_eval(psi, t, entry.p[i], c + omega));
            ++r.checked;
            r.min_center = std::min(r.min_center, vc);
            r.min_edge = std::min({r.min_edge, vl, vr});
            if (vc < params.eta || vl < params.eta / 2 || vr < params.eta / 2) ++r.failures;
        }
    }
    return r;
}

}  // namespace wavesat
