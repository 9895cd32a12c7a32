// wavesat: filters, cascade, property (R) certification, translate schedules and
// their sampled verification from the command line.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wavesat/cli.hpp"

namespace {

void add_subject(CLI::App* sub, wavesat::RunConfig& cfg) {
    sub->add_option("--order,-p", cfg.order_p, "Daubechies order p (1..45)");
    sub->add_flag("--toy", cfg.toy, "use psi(x) = sin^2(pi x / 2) on [0, 2]");
    sub->add_option("--iters,-n", cfg.iters_n, "cascade iterations / grid level (default 15, 12 for p >= 40)");
}

}  // namespace

int main(int argc, char** argv) {
    wavesat::RunConfig cfg;
    CLI::App app{"Compactly supported wavelets, saturation property (R) and non-vanishing translate schedules"};
    app.require_subcommand(1);

    auto* filters = app.add_subcommand("filters", "print the Daubechies filter pair of order p");
    filters->add_option("--order,-p", cfg.order_p, "Daubechies order p (1..45)");
    filters->add_flag("--json", cfg.json, "JSON output (default)");
    filters->add_flag("--csv", cfg.csv, "CSV output with columns k,h,g");
    filters->add_option("--out,-o", cfg.out_path, "output file (default stdout)");

    auto* cascade = app.add_subcommand("cascade", "sample phi or psi on the level-n dyadic grid");
    add_subject(cascade, cfg);
    cascade->add_option("--emit", cfg.emit, "phi or psi")->check(CLI::IsMember({"phi", "psi"}));
    cascade->add_option("--csv", cfg.csv_path, "output CSV (default stdout)");

    auto* check = app.add_subcommand("check-r", "certify property (R)");
    add_subject(check, cfg);
    check->add_flag("--json", cfg.json, "JSON report");
    check->add_option("--out,-o", cfg.json_path, "output file (default stdout)");

    auto* plot = app.add_subcommand("plot-s", "render S(x) = sum_k |psi(x + k)| on [0, 1] as SVG");
    add_subject(plot, cfg);
    plot->add_option("--svg", cfg.svg_path, "output SVG (default stdout)");

    auto* eval = app.add_subcommand("eval-g", "evaluate G(2^j x - p) at a dyadic x");
    add_subject(eval, cfg);
    eval->add_option("--j", cfg.j_scale, "scale j >= 0");
    eval->add_option("--p-shift", cfg.p_shift, "translate p");
    eval->add_option("--x", cfg.x, "point as NUM/2^L")->required();

    auto* build = app.add_subcommand("build-plan", "construct the translate schedule");
    add_subject(build, cfg);
    build->add_option("--dim,-d", cfg.dim_d, "dimension d");
    build->add_option("--horizon", cfg.horizon, "last scale (default 2 N(d))");
    build->add_option("--out,-o", cfg.out_path, "plan JSON (default stdout)");

    auto* verify = app.add_subcommand("verify", "check a plan on sampled points");
    add_subject(verify, cfg);
    verify->add_option("--dim,-d", cfg.dim_d, "expected plan dimension");
    verify->add_option("--plan", cfg.plan_path, "plan JSON")->required();
    verify->add_option("--samples", cfg.samples, "number of sampled points");
    verify->add_option("--seed", cfg.seed, "sampling seed");
    verify->add_option("--j-list", cfg.j_list, "window starts J (default: all, or multiples of N(d))")->delimiter(',');
    verify->add_option("--json", cfg.json_path, "report JSON (default stdout)");

    auto* report = app.add_subcommand("report-all", "filters, cascade, check-r, plan and verification bundle");
    add_subject(report, cfg);
    report->add_option("--dim,-d", cfg.dim_d, "dimension d");
    report->add_option("--horizon", cfg.horizon, "last scale (default 2 N(d))");
    report->add_option("--samples", cfg.samples, "number of sampled points");
    report->add_option("--seed", cfg.seed, "sampling seed");
    report->add_option("--out-dir", cfg.out_dir, "bundle directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return wavesat::kExitInvalidConfig;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    return wavesat::run(cfg);
}
