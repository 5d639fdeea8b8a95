// reserveband command-line tool: analytic solves, Monte Carlo simulation,
// optimality scans and the verification battery, driven by scenario files.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "reserveband/commands.hpp"
#include "reserveband/version.hpp"

using namespace reserveband;

namespace {

struct Overrides {
    std::string out;
    int workers = 0;
    double dt = 0.0;
    long long paths = 0;
};

Scenario load_with_overrides(const std::string& path, const Overrides& o) {
    Scenario s = load_scenario(path);
    if (!o.out.empty()) s.out_dir = o.out;
    if (o.workers > 0) s.workers = o.workers;
    if (o.dt > 0.0) s.dt = o.dt;
    if (o.paths > 0) s.n_paths = static_cast<std::size_t>(o.paths);
    return s;
}

void add_common(CLI::App* cmd, std::string& scenario, Overrides& o) {
    cmd->add_option("scenario", scenario, "scenario file")->required();
    cmd->add_option("--out", o.out, "output directory (overrides the scenario)");
    cmd->add_option("--workers", o.workers,
                    "worker thread count (results are identical for any value)");
    cmd->add_option("--dt", o.dt, "time step override");
    cmd->add_option("--paths", o.paths, "path count override");
}

void print_estimate(const char* name, const MCEstimate& e) {
    std::printf("  %-12s %14.8f  (se %.3g, n=%zu, dt=%g, T=%.4f, tail %.2e)\n", name, e.mean,
                e.std_err, e.n_paths, e.dt, e.horizon, e.tail_bound);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"band-policy solver and Monte Carlo verifier for bank reserve management"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string scn_analytic, scn_simulate, scn_scan, scn_verify;
    Overrides o_analytic, o_simulate, o_scan, o_verify;

    auto* c_analytic = app.add_subcommand("analytic", "closed forms, b*, gain/cost table");
    add_common(c_analytic, scn_analytic, o_analytic);
    auto* c_simulate = app.add_subcommand("simulate", "Monte Carlo gain and cost under the band");
    add_common(c_simulate, scn_simulate, o_simulate);
    auto* c_scan = app.add_subcommand("scan", "gain across perturbed ceilings plus floor-only");
    add_common(c_scan, scn_scan, o_scan);
    auto* c_verify = app.add_subcommand("verify", "property battery with pass/fail output");
    add_common(c_verify, scn_verify, o_verify);

    CLI11_PARSE(app, argc, argv);

    std::string scenario_path;
    try {
        if (c_analytic->parsed()) {
            scenario_path = scn_analytic;
            const Scenario s = load_with_overrides(scn_analytic, o_analytic);
            const auto rep = cmd_analytic(s);
            std::printf("analytic solution (scenario %s)\n", s.source_path.c_str());
            std::printf("  gamma1=%.12g gamma2=%.12g gamma2_bar=%.12g\n", rep.sol.roots.gamma1,
                        rep.sol.roots.gamma2, rep.sol.roots_bar.gamma2);
            std::printf("  r=%.12g c=%.12g\n", rep.sol.r, rep.sol.c);
            std::printf("  b* (threshold equation) = %.12g\n", rep.sol.b_star);
            std::printf("  b  (gain argmax)        = %.12g  (rel gap %.3g%s)\n",
                        rep.diag.b_argmax, rep.diag.b_gap_rel,
                        rep.diag.threshold_equation_discrepant
                            ? ", threshold equation flagged discrepant"
                            : "");
            std::printf("  v1 coefficients A=%.12g B=%.12g; v2 coefficient K=%.12g\n",
                        rep.sol.coef_A, rep.sol.coef_B, rep.sol.coef_K);
            std::printf("  smooth pasting |v1'(a)-c|=%.3g |v1'(b*)-r|=%.3g\n",
                        rep.diag.smooth_paste_floor, rep.diag.smooth_paste_ceiling);
            std::printf("  generator residuals v1=%.3g v2=%.3g\n", rep.diag.generator_v1,
                        rep.diag.generator_v2);
            for (const auto& f : rep.outputs)
                std::printf("  wrote %s/%s\n", s.out_dir.c_str(), f.c_str());
        } else if (c_simulate->parsed()) {
            scenario_path = scn_simulate;
            const Scenario s = load_with_overrides(scn_simulate, o_simulate);
            const auto rep = cmd_simulate(s);
            std::printf("simulation under band [%.6g, %.6g] (scenario %s)\n", s.floor, rep.b_used,
                        s.source_path.c_str());
            print_estimate("gain", rep.gain);
            print_estimate("cost", rep.cost);
            if (rep.analytic_available) {
                std::printf("  analytic gain %14.8f  gap %.4g (%s 3 se)\n", rep.analytic_gain,
                            rep.gap_vs_analytic, rep.within_three_se ? "within" : "OUTSIDE");
            }
            std::printf("  identity residuals: def %.3g (se %.3g), paper %.4g, gbm %.4g\n",
                        rep.identity.residual_def, rep.identity.residual_def_se,
                        rep.identity.residual_paper, rep.identity.residual_gbm);
            for (const auto& f : rep.outputs)
                std::printf("  wrote %s/%s\n", s.out_dir.c_str(), f.c_str());
        } else if (c_scan->parsed()) {
            scenario_path = scn_scan;
            const Scenario s = load_with_overrides(scn_scan, o_scan);
            const auto rep = cmd_scan(s);
            std::printf("optimality scan around b* = %.8g (scenario %s)\n", rep.b_star,
                        s.source_path.c_str());
            for (const auto& row : rep.scan.rows) {
                std::printf(
                    "  %-10s b=%-12.8g gain %12.6f (se %.3g) diff-vs-b* %+11.3g (se %.3g)%s\n",
                    row.policy_tag.c_str(), row.b, row.gain_estimate.mean,
                    row.gain_estimate.std_err, row.diff_vs_bstar, row.diff_vs_bstar_se,
                    row.beats_bstar ? "  BEATS b*" : "");
            }
            for (const auto& f : rep.outputs)
                std::printf("  wrote %s/%s\n", s.out_dir.c_str(), f.c_str());
        } else if (c_verify->parsed()) {
            scenario_path = scn_verify;
            const Scenario s = load_with_overrides(scn_verify, o_verify);
            const auto rep = cmd_verify(s);
            for (const auto& c : rep.checks) {
                std::printf("[%s] %-32s %s  measured %.6g  threshold %.6g%s%s\n",
                            c.hard ? "HARD" : "soft", c.name.c_str(),
                            c.hard ? (c.pass ? "PASS" : "FAIL") : "INFO", c.measured, c.threshold,
                            c.note.empty() ? "" : "  -- ", c.note.c_str());
            }
            for (const auto& f : rep.outputs)
                std::printf("wrote %s/%s\n", s.out_dir.c_str(), f.c_str());
            if (!rep.hard_pass) {
                std::printf("verify: HARD FAILURES present\n");
                return 1;
            }
            std::printf("verify: all hard checks passed\n");
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", scenario_path.c_str(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error (%s): %s\n", scenario_path.c_str(), e.what());
        return 2;
    }
    return 0;
}
