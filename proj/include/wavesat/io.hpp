#pragma once

// JSON, CSV and SVG emission. Every floating-point number is written with 17
// significant digits so artifacts are lossless and byte-stable.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavesat/analysis.hpp"
#include "wavesat/cascade.hpp"
#include "wavesat/error.hpp"
#include "wavesat/filters.hpp"
#include "wavesat/periodized.hpp"
#include "wavesat/sequence.hpp"
#include "wavesat/verify.hpp"

namespace wavesat {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Serializes j with floats as %.17g; non-finite floats become null.
inline void write_json(std::ostream& os, const Json& j, int indent = 2, int depth = 0) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string pad_close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad << Json(it.key()).dump() << ": ";
                write_json(os, it.value(), indent, depth + 1);
            }
            os << "\n" << pad_close << "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // arrays of scalars stay on one line
            const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
            os << (flat ? "[" : "[\n");
            bool first = true;
            for (const auto& e : j) {
                if (!first) os << (flat ? ", " : ",\n");
                first = false;
                if (!flat) os << pad;
                write_json(os, e, indent, depth + 1);
            }
            if (!flat) os << "\n" << pad_close;
            os << "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            os << (std::isfinite(v) ? format_double(v) : std::string("null"));
            return;
        }
        default:
            os << j.dump();
    }
}

inline std::string json_string(const Json& j) {
    std::ostringstream os;
    write_json(os, j);
    os << "\n";
    return os.str();
}

/// Big integers as JSON integers when they fit in 64 bits, else as decimal strings.
inline Json big_to_json(const BigInt& v) {
    if (v >= 0 && v <= BigInt(std::numeric_limits<std::uint64_t>::max())) return static_cast<std::uint64_t>(v);
    return v.str();
}

inline BigInt big_from_json(const Json& j) {
    if (j.is_number_unsigned()) return BigInt(j.get<std::uint64_t>());
    if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
    if (j.is_string()) return BigInt(j.get<std::string>());
    throw ParseError("expected an integer");
}

inline Json to_json(const FilterPair& f) {
    const FilterValidation v = validate_filters(f);
    return Json{{"schema_version", kSchemaVersion},
                {"order", f.order_p},
                {"support_K", f.support_K},
                {"h", f.h},
                {"g", f.g},
                {"validation",
                 {{"sum_residual", v.sum_residual},
                  {"orthonormality_residual", v.orthonormality_residual},
                  {"qmf_residual", v.qmf_residual},
                  {"highpass_sum_residual", v.highpass_sum_residual},
                  {"moment_residual", v.moment_residual},
                  {"tolerance", v.tolerance},
                  {"moment_tolerance", v.moment_tolerance},
                  {"pass", v.pass}}}};
}

inline Json to_json(const ZeroSet& z) {
    return Json{{"N", z.N()},          {"zeros", z.zeros},        {"min_gap", z.min_gap},
                {"resolution", z.resolution}, {"tolerance", z.tolerance}};
}

inline Json to_json(const PropertyRReport& r) {
    return Json{{"schema_version", kSchemaVersion},
                {"K_psi", r.K_psi},
                {"level", r.level},
                {"zero_set", to_json(r.zero_set)},
                {"eta_tilde", r.eta_tilde},
                {"eta", r.eta},
                {"M_G", r.M_G},
                {"derivative_growth", r.derivative.growth},
                {"lipschitz_slack", r.lipschitz_slack},
                {"iterate_difference", r.iterate_difference},
                {"error_budget", r.error_budget},
                {"eta_tilde_certified", r.eta_tilde_certified},
                {"eta_certified", r.eta_certified},
                {"certification_margin", r.certification_margin()},
                {"r1", r.r1_pass},
                {"r2", r.r2_pass},
                {"r3", r.r3_pass},
                {"pass", r.pass()}};
}

inline Json to_json(const ScheduleParams& s) {
    Json sched = Json::array();
    for (const auto& c : s.schedule) sched.push_back(big_to_json(c));
    return Json{{"schema_version", kSchemaVersion},
                {"N", s.N},
                {"dimension", s.d},
                {"schedule", sched},
                {"eta", s.eta},
                {"M_G", s.M_G},
                {"min_gap", s.min_gap},
                {"eps_d_log2", s.eps_d_log2},
                {"eps_prime_log2", s.eps_prime_log2},
                {"omega_log2", s.omega_log2},
                {"alpha_tilde_log2", s.alpha_tilde_log2},
                {"alpha_log2", s.alpha_log2},
                {"alpha_tilde", s.alpha_tilde},
                {"alpha", s.alpha}};
}

inline Json to_json(const SequencePlan& plan, const std::string& function_name) {
    Json entries = Json::array();
    Json prov = Json::array();
    for (std::size_t u = 0; u < plan.entries.size(); ++u) {
        entries.push_back(Json::array({plan.first_scale + static_cast<long long>(u), plan.entries[u].p}));
        prov.push_back(std::string(to_string(plan.entries[u].kind)));
    }
    return Json{{"schema_version", kSchemaVersion},
                {"function", function_name},
                {"dimension", plan.dimension_d},
                {"block_length", big_to_json(plan.block_length)},
                {"inner_period", big_to_json(plan.inner_period)},
                {"first_scale", plan.first_scale},
                {"horizon", plan.horizon_J_max},
                {"entries", entries},
                {"provenance", prov}};
}

inline SequencePlan plan_from_json(const Json& j) {
    try {
        SequencePlan plan;
        if (j.at("schema_version").get<int>() != kSchemaVersion) throw ParseError("unsupported plan schema version");
        plan.dimension_d = j.at("dimension").get<int>();
        plan.block_length = big_from_json(j.at("block_length"));
        plan.inner_period = big_from_json(j.at("inner_period"));
        plan.first_scale = j.at("first_scale").get<long long>();
        plan.horizon_J_max = j.at("horizon").get<long long>();
        const Json& entries = j.at("entries");
        const Json& prov = j.at("provenance");
        if (entries.size() != prov.size()) throw ParseError("entries and provenance differ in length");
        if (static_cast<long long>(entries.size()) != plan.horizon_J_max - plan.first_scale + 1)
            throw ParseError("entry count does not match the horizon");
        for (std::size_t u = 0; u < entries.size(); ++u) {
            if (entries[u].at(0).get<long long>() != plan.first_scale + static_cast<long long>(u))
                throw ParseError("entries are not consecutive scales");
            PlanEntry e;
            e.p = entries[u].at(1).get<std::vector<int>>();
            if (e.p.size() != static_cast<std::size_t>(plan.dimension_d))
                throw ParseError("entry at scale " + std::to_string(plan.first_scale + static_cast<long long>(u)) +
                                 " has the wrong dimension");
            e.kind = cell_kind_from_string(prov[u].get<std::string>());
            e.center.assign(e.p.size(), -1);
            e.center_scale.assign(e.p.size(), BigInt(0));
            plan.entries.push_back(std::move(e));
        }
        return plan;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed plan: ") + e.what());
    }
}

inline Json to_json(const VerificationReport& r, bool include_runtime = true) {
    Json fails = Json::array();
    for (const auto& f : r.failures) {
        Json xs = Json::array();
        for (const auto& c : f.x) xs.push_back(c.str());
        fails.push_back(Json{{"x", xs}, {"J", f.J}});
    }
    Json j{{"schema_version", kSchemaVersion},
           {"target", std::string(to_string(r.target))},
           {"dimension", r.dimension},
           {"samples_tested", r.samples_tested},
           {"windows_tested", r.windows_tested},
           {"failure_count", r.failures.size()},
           {"failures", fails},
           {"min_observed_log2", r.min_observed_log2},
           {"min_observed_product", r.min_observed_product},
           {"alpha_used_log2", r.alpha_used_log2},
           {"alpha_used", r.alpha_used},
           {"pass", r.pass()}};
    if (include_runtime) j["runtime_ms"] = r.runtime_ms;
    return j;
}

/// Two-column CSV `x,value`, ascending x.
inline void write_csv(std::ostream& os, const SampledFunction& f) {
    os << "x,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) os << format_double(f.x(i)) << ',' << format_double(f[i]) << '\n';
}

inline void write_filters_csv(std::ostream& os, const FilterPair& f) {
    os << "k,h,g\n";
    for (std::size_t k = 0; k < f.h.size(); ++k) os << k << ',' << format_double(f.h[k]) << ',' << format_double(f.g[k]) << '\n';
}

/// Self-contained line plot of f with axes and a dashed zero line. Each pixel
/// column keeps its minimum and maximum sample so extremes survive decimation.
inline void write_svg(std::ostream& os, const SampledFunction& f, const std::string& title) {
    const double W = 800, H = 400, ml = 60, mr = 20, mt = 40, mb = 40;
    const double pw = W - ml - mr, ph = H - mt - mb;
    double lo = *std::min_element(f.values.begin(), f.values.end());
    double hi = *std::max_element(f.values.begin(), f.values.end());
    const double vmin = std::min(lo, 0.0), vmax = std::max(hi, 0.0);
    const double span = vmax > vmin ? vmax - vmin : 1.0;
    const double ylo = vmin - 0.05 * span, yhi = vmax + 0.05 * span;
    auto X = [&](double x) { return ml + pw * x / f.support_K; };
    auto Y = [&](double v) { return mt + ph * (yhi - v) / (yhi - ylo); };

    const std::size_t cols = static_cast<std::size_t>(pw);
    std::vector<std::pair<double, double>> pts;
    const std::size_t n = f.size();
    for (std::size_t c = 0; c < cols && n > 0; ++c) {
        const std::size_t a = c * n / cols, b = std::max(a + 1, (c + 1) * n / cols);
        std::size_t imin = a, imax = a;
        for (std::size_t i = a; i < b && i < n; ++i) {
            if (f[i] < f[imin]) imin = i;
            if (f[i] > f[imax]) imax = i;
        }
        const std::size_t first = std::min(imin, imax), second = std::max(imin, imax);
        pts.emplace_back(f.x(first), f[first]);
        if (second != first) pts.emplace_back(f.x(second), f[second]);
    }
    if (n > 0) pts.emplace_back(f.x(n - 1), f[n - 1]);

    auto num = [](double v) {
        char b[32];
        std::snprintf(b, sizeof b, "%.3f", v);
        return std::string(b);
    };
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<title>" << title << "</title>\n";
    os << "<desc>min " << format_double(lo) << " max " << format_double(hi) << "</desc>\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\"" << mt + ph << "\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph << "\"/>\n";
    os << "</g>\n";
    os << "<line id=\"zero\" x1=\"" << ml << "\" y1=\"" << num(Y(0)) << "\" x2=\"" << ml + pw << "\" y2=\"" << num(Y(0))
       << "\" stroke=\"red\" stroke-dasharray=\"4 3\"/>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<text x=\"" << ml << "\" y=\"24\">" << title << "</text>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << num(Y(vmax)) << "\" text-anchor=\"end\">" << num(vmax) << "</text>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << num(Y(0)) << "\" text-anchor=\"end\">0</text>\n";
    os << "<text x=\"" << ml << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">0</text>\n";
    os << "<text x=\"" << ml + pw << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << f.support_K << "</text>\n";
    os << "</g>\n";
    os << "<polyline id=\"curve\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " " : "") << num(X(pts[i].first)) << ',' << num(Y(pts[i].second));
    os << "\"/>\n</svg>\n";
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace wavesat
