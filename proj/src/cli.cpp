#include "tflow/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tflow/diagnostics.hpp"
#include "tflow/io.hpp"
#include "tflow/stepper.hpp"
#include "tflow/verify.hpp"

namespace tflow {

namespace {

std::string snapshot_path(const std::string& dir, int step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%06d.bin", step);
    return dir + "/" + buf;
}

int do_run(const std::string& config_path, const std::string& resume,
           const std::string& outdir_override) {
    RunConfig cfg = parse_config_file(config_path);
    if (!outdir_override.empty()) cfg.output_dir = outdir_override;
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.output_dir);

    State s;
    int n0 = 0;
    const int total = static_cast<int>(std::llround(cfg.t_end / cfg.solver.dt));
    if (!resume.empty()) {
        s = read_snapshot(resume);
        if (s.grid() != cfg.make_grid())
            throw ConfigError("resume: snapshot grid does not match the config");
        n0 = static_cast<int>(std::llround(s.t / cfg.solver.dt));
    } else {
        s = build_initial_state(cfg);
    }

    const std::string csv_path = cfg.output_dir + "/diagnostics.csv";
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot write " + csv_path);
    csv << csv_header() << "\n";
    EnergyReport prev = energy(s, cfg.params);
    csv << csv_row(prev) << "\n";
    write_snapshot(s, snapshot_path(cfg.output_dir, n0));

    ValidationTolerances vt;
    vt.energy_slack = 1e-8 * std::max(1.0, std::abs(prev.e_total));

    for (int n = n0; n < total; ++n) {
        try {
            s = step(s, cfg.solver, cfg.params);
        } catch (const SolverError& e) {
            std::fprintf(stderr, "error: solver: step %d: %s\n", n + 1, e.what());
            return 4;
        }
        EnergyReport cur = energy(s, cfg.params);
        cur.energy_residual = energy_residual_between(prev, cur);
        for (const Violation& v : validate(s, cfg.params, vt, &prev))
            std::fprintf(stderr, "warning: step %d: %s: %s\n", n + 1, v.rule.c_str(),
                         v.detail.c_str());
        if ((n + 1) % cfg.cadence == 0 || n + 1 == total) {
            csv << csv_row(cur) << "\n";
            write_snapshot(s, snapshot_path(cfg.output_dir, n + 1));
        }
        prev = cur;
    }
    write_snapshot(s, cfg.output_dir + "/snapshot_final.bin");
    csv.flush();
    if (!csv.good()) throw IoError("failed writing " + csv_path);
    return 0;
}

int do_check(const std::string& snapshot, const std::string& config_path) {
    ModelParams params;
    if (!config_path.empty()) params = parse_config_file(config_path).params;
    const State s = read_snapshot(snapshot);
    const std::vector<Violation> viol = validate(s, params, ValidationTolerances{});
    if (viol.empty()) {
        std::printf("ok\n");
        return 0;
    }
    for (const Violation& v : viol)
        std::printf("violation: %s: %s\n", v.rule.c_str(), v.detail.c_str());
    return 1;
}

void print_table(const char* name, const char* study, const ConvergenceTable& t) {
    for (const ConvergenceRow& r : t.rows)
        std::printf("%s,%s,%.17g,%.17g,%.17g,%.6g,%.6g\n", name, study, r.h, r.err_l2,
                    r.err_linf, t.order_l2, t.order_linf);
}

int do_convergence(const std::string& which, int levels) {
    std::printf("subproblem,study,h,err_l2,err_linf,order_l2,order_linf\n");
    struct Entry {
        const char* name;
        Subproblem sub;
    };
    const std::vector<Entry> all = {{"heat", Subproblem::heat},
                                    {"cahn-hilliard", Subproblem::cahn_hilliard},
                                    {"stokes", Subproblem::stokes}};
    for (const Entry& e : all) {
        if (which != "all" && which != e.name) continue;
        const StudyResult r = manufactured_solution_study(e.sub, levels);
        print_table(e.name, "spatial", r.spatial);
        if (!r.temporal.rows.empty()) print_table(e.name, "temporal", r.temporal);
    }
    return 0;
}

int do_cascade(const CascadeConfig& cfg, const std::vector<double>& alphas,
               const std::vector<double>& xis) {
    const CascadeReport rep = cascade_study(cfg, alphas, xis);
    std::printf("family,parameter,distance\n");
    for (std::size_t i = 0; i < rep.alphas.size(); ++i)
        std::printf("alpha,%.6g,%.17g\n", rep.alphas[i], rep.alpha_distances[i]);
    for (std::size_t i = 0; i < rep.xis.size(); ++i)
        std::printf("xi,%.6g,%.17g\n", rep.xis[i], rep.xi_distances[i]);
    return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Phase-field two-phase flow solver with elastic coupling"};
    app.require_subcommand(1);

    std::string config_path, resume_path, outdir_override;
    CLI::App* run = app.add_subcommand("run", "March a configured scenario");
    run->add_option("config", config_path, "Config file")->required();
    run->add_option("--resume", resume_path, "Continue from a snapshot");
    run->add_option("--output-dir", outdir_override, "Override the configured output directory");

    std::string snapshot, check_config;
    CLI::App* check = app.add_subcommand("check", "Validate a snapshot against the state invariants");
    check->add_option("snapshot", snapshot, "Snapshot file")->required();
    check->add_option("--config", check_config, "Config supplying model parameters");

    std::string which = "all";
    int levels = 3;
    CLI::App* conv = app.add_subcommand("convergence", "Manufactured-solution order study");
    conv->add_option("--subproblem", which, "heat | cahn-hilliard | stokes | all")
        ->check(CLI::IsMember({"heat", "cahn-hilliard", "stokes", "all"}));
    conv->add_option("--levels", levels, "Refinement levels")->check(CLI::Range(3, 6));

    CascadeConfig cc;
    std::vector<double> alphas = {0.1, 0.05, 0.025, 0.0};
    std::vector<double> xis = {1e-2, 1e-3, 1e-4};
    CLI::App* casc = app.add_subcommand("cascade", "Regularization cascade study");
    casc->add_option("--n", cc.n, "Grid cells per side");
    casc->add_option("--t-end", cc.t_end, "Final time");
    casc->add_option("--dt", cc.dt, "Time step");
    casc->add_option("--alphas", alphas, "Filter strengths")->delimiter(',');
    casc->add_option("--xis", xis, "Potential tail widths")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run) return do_run(config_path, resume_path, outdir_override);
        if (*check) return do_check(snapshot, check_config);
        if (*conv) return do_convergence(which, levels);
        return do_cascade(cc, alphas, xis);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 3;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "error: solver: %s\n", e.what());
        return 4;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: io: %s\n", e.what());
        return 5;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 4;
    }
}

}  // namespace tflow
