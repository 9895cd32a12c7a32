#pragma once

// Command dispatch for the `wavesat` tool. Argument parsing lives in the tool;
// everything here is callable from tests.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wavesat/analysis.hpp"
#include "wavesat/cascade.hpp"
#include "wavesat/dyadic.hpp"
#include "wavesat/error.hpp"
#include "wavesat/filters.hpp"
#include "wavesat/io.hpp"
#include "wavesat/periodized.hpp"
#include "wavesat/sequence.hpp"
#include "wavesat/verify.hpp"

namespace wavesat {

enum ExitCode : int { kExitPass = 0, kExitInvalidConfig = 2, kExitNumerical = 3, kExitVerification = 4 };

inline int exit_code(ErrorClass c) {
    switch (c) {
        case ErrorClass::InvalidConfig: return kExitInvalidConfig;
        case ErrorClass::Numerical: return kExitNumerical;
        case ErrorClass::Verification: return kExitVerification;
    }
    return kExitInvalidConfig;
}

inline constexpr const char* kOutDirEnv = "WAVESAT_OUT_DIR";
inline constexpr std::size_t kDefaultSamples = 1000;
inline constexpr std::size_t kBundleSamples = 200;
inline constexpr long long kMaxDefaultJ = 512;
inline constexpr int kLemmaGridLevel = 10;
inline constexpr int kLemmaMaxScale = 30;

struct RunConfig {
    std::string subcommand;  // filters cascade check-r plot-s eval-g build-plan verify report-all
    int order_p = 3;
    bool toy = false;        // sin^2(pi x / 2) on [0, 2] instead of a Daubechies wavelet
    std::optional<int> iters_n;
    std::optional<int> dim_d;
    std::optional<long long> horizon;
    std::optional<std::size_t> samples;
    std::uint64_t seed = kDefaultSeed;
    std::vector<long long> j_list;

    std::string emit = "psi";  // cascade: phi | psi
    bool json = false;         // filters, check-r: JSON on stdout
    bool csv = false;          // filters: CSV on stdout
    std::string csv_path;
    std::string json_path;     // verify: report file
    std::string svg_path;
    std::string out_path;      // build-plan: plan file
    std::string plan_path;
    std::string out_dir;       // report-all bundle directory

    long long j_scale = 0;     // eval-g
    long long p_shift = 0;
    std::string x;

    int iterations() const {
        if (iters_n) return *iters_n;
        return toy ? 15 : default_iterations(order_p);
    }
    int dimension() const { return dim_d.value_or(1); }
};

/// Relative paths are placed under $WAVESAT_OUT_DIR when it is set.
inline std::string resolve_output(const std::string& path) {
    const char* dir = std::getenv(kOutDirEnv);
    if (path.empty() || dir == nullptr || *dir == '\0' || std::filesystem::path(path).is_absolute()) return path;
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / path).string();
}

/// The function under study with everything derived from it.
struct Subject {
    std::string name;
    std::optional<FilterPair> filters;
    SampledFunction phi;
    SampledFunction psi;
    PropertyRReport report;
};

inline double toy_function(double x) {
    const double s = std::sin(std::numbers::pi * x / 2.0);
    return s * s;
}

/// Builds psi at the configured level; `certify` also runs the property (R)
/// check, which needs a grid of level >= 10 (>= 12 for the toy function).
inline Subject make_subject(const RunConfig& cfg, bool certify = true) {
    Subject s;
    const int n = cfg.iterations();
    if (n < 1 || n > 24) throw InvalidArgument("--iters must lie in [1, 24]");
    if (cfg.toy) {
        if (certify && n < 12) throw GridTooCoarse("toy function needs grid level >= 12");
        s.name = "toy-sin2";
        s.psi = sample_on_grid(toy_function, 2, n);
        if (certify) s.report = check_property_R(s.psi, s.psi);
        return s;
    }
    s.name = "db" + std::to_string(cfg.order_p);
    s.filters = daubechies_filters(cfg.order_p);
    if (!certify) {
        s.phi = compute_scaling(*s.filters, n);
        s.psi = compute_wavelet(s.phi, s.filters->g);
        return s;
    }
    if (n < 10) throw GridTooCoarse("property (R) check needs at least 10 cascade iterations");
    const SampledFunction phi_prev = compute_scaling(*s.filters, n - 1);
    s.phi = cascade_step(phi_prev, s.filters->h);
    s.psi = compute_wavelet(s.phi, s.filters->g);
    s.report = check_property_R(s.psi, compute_wavelet(phi_prev, s.filters->g));
    return s;
}

namespace detail {

inline long long default_horizon(const ScheduleParams& p, const PlanOptions& opt) {
    const BigInt h = 2 * p.block_length();
    if (h + 1 > opt.max_eager_entries)
        throw HorizonOverflow("two blocks of N(d) = " + p.block_length().str() +
                              " scales exceed the eager cap; pass --horizon");
    return static_cast<long long>(h);
}

/// All J in [first, horizon - N(d)] when there are at most kMaxDefaultJ of
/// them, else the multiples of N(d) in that range.
inline std::vector<long long> default_j_list(const SequencePlan& plan) {
    if (plan.block_length > BigInt(plan.horizon_J_max)) return {};
    const auto bl = static_cast<long long>(plan.block_length);
    const long long last = plan.horizon_J_max - bl;
    std::vector<long long> js;
    if (last < plan.first_scale) return js;
    if (last - plan.first_scale + 1 <= kMaxDefaultJ) {
        for (long long J = plan.first_scale; J <= last; ++J) js.push_back(J);
    } else {
        for (long long J = plan.first_scale; J <= last; J += bl) js.push_back(J);
    }
    return js;
}

inline void emit(std::ostream& out, const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        out << content;
    } else {
        write_file(resolve_output(path), content);
    }
}

inline std::string text_report(const PropertyRReport& r, const std::string& name) {
    std::ostringstream os;
    os << name << ": K = " << r.K_psi << ", level " << r.level << "\n"
       << "  zeros N = " << r.zero_set.N() << ", min gap " << format_double(r.zero_set.min_gap) << "\n"
       << "  min S = " << format_double(r.eta_tilde) << ", certified " << format_double(r.eta_tilde_certified)
       << " (margin " << format_double(r.certification_margin()) << " x budget)\n"
       << "  M_G = " << format_double(r.M_G) << ", derivative growth " << format_double(r.derivative.growth) << "\n"
       << "  R1 " << (r.r1_pass ? "pass" : "FAIL") << ", R2 " << (r.r2_pass ? "pass" : "FAIL") << ", R3 "
       << (r.r3_pass ? "pass" : "FAIL") << "\n";
    return os.str();
}

inline SequencePlan plan_for(const Subject& s, const ScheduleParams& params, long long horizon) {
    return build_sequence_nd(s.psi, params, s.report.zero_set.zeros, params.d, horizon);
}

inline int cmd_filters(const RunConfig& cfg, std::ostream& out) {
    if (cfg.toy) throw InvalidArgument("the toy function has no filters");
    const FilterPair f = daubechies_filters(cfg.order_p);
    std::ostringstream os;
    if (cfg.csv) {
        write_filters_csv(os, f);
    } else {
        os << json_string(to_json(f));
    }
    emit(out, cfg.out_path, os.str());
    return validate_filters(f).pass ? kExitPass : kExitNumerical;
}

inline int cmd_cascade(const RunConfig& cfg, std::ostream& out) {
    if (cfg.emit != "phi" && cfg.emit != "psi") throw InvalidArgument("--emit must be phi or psi");
    const Subject s = make_subject(cfg, false);
    if (cfg.emit == "phi" && !s.filters) throw InvalidArgument("the toy function has no scaling function");
    std::ostringstream os;
    write_csv(os, cfg.emit == "phi" ? s.phi : s.psi);
    emit(out, cfg.csv_path, os.str());
    return kExitPass;
}

inline int cmd_check_r(const RunConfig& cfg, std::ostream& out) {
    const Subject s = make_subject(cfg);
    emit(out, cfg.json_path, cfg.json ? json_string(to_json(s.report)) : text_report(s.report, s.name));
    return s.report.pass() ? kExitPass : kExitVerification;
}

inline int cmd_plot_s(const RunConfig& cfg, std::ostream& out) {
    const Subject s = make_subject(cfg, false);
    const SampledFunction S = saturation_function(s.psi);
    std::ostringstream os;
    write_svg(os, S, "S(x) = sum_k |psi(x + k)| for " + s.name + ", level " + std::to_string(s.psi.level_n));
    emit(out, cfg.svg_path, os.str());
    return kExitPass;
}

inline int cmd_eval_g(const RunConfig& cfg, std::ostream& out) {
    if (cfg.x.empty()) throw InvalidArgument("--x is required");
    if (cfg.j_scale < 0) throw InvalidArgument("--j must be non-negative");
    const DyadicRational x = DyadicRational::parse(cfg.x);
    const Subject s = make_subject(cfg, false);
    out << format_double(G1_eval(s.psi, static_cast<std::int64_t>(cfg.j_scale), cfg.p_shift, x)) << "\n";
    return kExitPass;
}

inline int cmd_build_plan(const RunConfig& cfg, std::ostream& out) {
    const Subject s = make_subject(cfg);
    const ScheduleParams params = make_schedule(s.psi, s.report, cfg.dimension());
    const long long horizon = cfg.horizon.value_or(default_horizon(params, PlanOptions{}));
    const SequencePlan plan = plan_for(s, params, horizon);
    emit(out, cfg.out_path, json_string(to_json(plan, s.name)));
    return kExitPass;
}

inline VerificationReport verify_plan(const Subject& s, const SequencePlan& plan, const ScheduleParams& params,
                                      const RunConfig& cfg, std::size_t default_samples) {
    const std::vector<Point> pts =
        sample_points(plan.dimension_d, s.psi.support_K, cfg.samples.value_or(default_samples), cfg.seed);
    const std::vector<long long> js = cfg.j_list.empty() ? default_j_list(plan) : cfg.j_list;
    if (js.empty()) throw PlanTooShort("plan horizon is shorter than one window of N(d) + 1 scales");
    return verify_theorem(s.psi, plan, params, pts, js);
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    if (cfg.plan_path.empty()) throw InvalidArgument("--plan is required");
    Json pj;
    try {
        pj = Json::parse(read_file(cfg.plan_path));
    } catch (const Json::exception& e) {
        throw ParseError(std::string("plan is not valid JSON: ") + e.what());
    }
    const SequencePlan plan = plan_from_json(pj);
    const Subject s = make_subject(cfg);
    if (pj.value("function", std::string()) != s.name)
        throw DimensionMismatch("plan was built for " + pj.value("function", std::string("?")) + ", not " + s.name);
    if (cfg.dim_d && *cfg.dim_d != plan.dimension_d)
        throw DimensionMismatch("plan has dimension " + std::to_string(plan.dimension_d) + ", --dim is " +
                                std::to_string(*cfg.dim_d));
    const ScheduleParams params = make_schedule(s.psi, s.report, plan.dimension_d);
    if (params.block_length() != plan.block_length)
        throw DimensionMismatch("plan block length " + plan.block_length.str() + " differs from the schedule's " +
                                params.block_length().str());
    const VerificationReport r = verify_plan(s, plan, params, cfg, kDefaultSamples);
    emit(out, cfg.json_path, json_string(to_json(r)));
    return r.pass() ? kExitPass : kExitVerification;
}

inline int cmd_report_all(const RunConfig& cfg, std::ostream& out) {
    const Subject s = make_subject(cfg);
    const int d = cfg.dimension();
    std::string dir = cfg.out_dir.empty() ? "bundle-" + s.name + "-d" + std::to_string(d) : cfg.out_dir;
    dir = resolve_output(dir);
    std::filesystem::create_directories(dir);
    auto path = [&](const char* f) { return (std::filesystem::path(dir) / f).string(); };
    Json files = Json::array();
    auto put = [&](const char* f, const std::string& content) {
        write_file(path(f), content);
        files.push_back(f);
    };

    if (s.filters) put("filters.json", json_string(to_json(*s.filters)));
    {
        std::ostringstream os;
        write_csv(os, s.psi);
        put("psi.csv", os.str());
    }
    put("check_r.json", json_string(to_json(s.report)));
    {
        std::ostringstream os;
        write_svg(os, saturation_function(s.psi), "S(x) for " + s.name);
        put("saturation.svg", os.str());
    }

    int status = s.report.pass() ? kExitPass : kExitVerification;
    Json summary{{"schema_version", kSchemaVersion}, {"function", s.name}, {"dimension", d},
                 {"iterations", cfg.iterations()}, {"seed", cfg.seed}, {"property_R", s.report.pass()}};
    if (s.report.pass()) {
        const ScheduleParams params = make_schedule(s.psi, s.report, d);
        put("schedule.json", json_string(to_json(params)));
        const long long horizon = cfg.horizon.value_or(default_horizon(params, PlanOptions{}));
        const SequencePlan plan = plan_for(s, params, horizon);
        put("plan.json", json_string(to_json(plan, s.name)));

        const MvtCheck mvt = mvt_three_point_check(s.psi, plan, params);
        const VerificationReport lemma = verify_lemma_saturation(s.psi, s.report.eta_certified, kLemmaGridLevel, kLemmaMaxScale);
        put("lemma.json", json_string(to_json(lemma, false)));
        const VerificationReport thm = verify_plan(s, plan, params, cfg, kBundleSamples);
        put("verify.json", json_string(to_json(thm, false)));

        const std::vector<Point> pts = sample_points(d, s.psi.support_K, cfg.samples.value_or(kBundleSamples), cfg.seed);
        const auto bl = static_cast<long long>(plan.block_length);
        const long long w = greedy_window(s.psi, plan, params.alpha_log2, pts, plan.first_scale, plan.horizon_J_max - bl);
        put("greedy.json", json_string(Json{{"schema_version", kSchemaVersion},
                                            {"N_emp", w},
                                            {"block_length", big_to_json(plan.block_length)},
                                            {"gap", bl - w}}));
        summary["mvt"] = Json{{"checked", mvt.checked}, {"failures", mvt.failures}, {"skipped", mvt.skipped}};
        summary["lemma_pass"] = lemma.pass();
        summary["theorem_pass"] = thm.pass();
        summary["N_emp"] = w;
        if (!lemma.pass() || !thm.pass() || mvt.failures > 0) status = kExitVerification;
    }
    summary["files"] = files;
    write_file(path("manifest.json"), json_string(summary));
    out << "bundle written to " << dir << "\n";
    return status;
}

}  // namespace detail

/// Runs one subcommand; errors are reported on `err` and mapped to exit codes.
inline int run(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        if (cfg.subcommand == "filters") return detail::cmd_filters(cfg, out);
        if (cfg.subcommand == "cascade") return detail::cmd_cascade(cfg, out);
        if (cfg.subcommand == "check-r") return detail::cmd_check_r(cfg, out);
        if (cfg.subcommand == "plot-s") return detail::cmd_plot_s(cfg, out);
        if (cfg.subcommand == "eval-g") return detail::cmd_eval_g(cfg, out);
        if (cfg.subcommand == "build-plan") return detail::cmd_build_plan(cfg, out);
        if (cfg.subcommand == "verify") return detail::cmd_verify(cfg, out);
        if (cfg.subcommand == "report-all") return detail::cmd_report_all(cfg, out);
        throw InvalidArgument("unknown subcommand '" + cfg.subcommand + "'");
    } catch (const Error& e) {
        err << "error (" << e.name() << "): " << e.what() << "\n";
        return exit_code(e.error_class());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error (IoError): " << e.what() << "\n";
        return kExitInvalidConfig;
    }
}

}  // namespace wavesat
