// cksf: command line driver for runs, sweeps and snapshot checks.

#include "cksf/config.hpp"
#include "cksf/errors.hpp"
#include "cksf/log.hpp"
#include "cksf/run.hpp"
#include "cksf/snapshot.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

cksf::RunConfig base_config(const std::string& path) {
    return path.empty() ? cksf::RunConfig{} : cksf::load_config(path);
}

int report_sweep(const std::vector<cksf::RegimeRow>& rows) {
    std::cout << cksf::regime_csv(rows);
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            std::cerr << "alpha=" << r.alpha << " kappa=" << r.kappa << ": " << r.error << '\n';
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    cksf::configure_logging_from_env();

    CLI::App app{"Chemotaxis-fluid coral fertilization simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<double> alpha, kappa, dt, t_end;
    std::optional<int> nx, ny;
    std::optional<std::string> out;
    auto* simulate = app.add_subcommand("simulate", "Run one simulation");
    simulate->add_option("--config", config_path, "Config file (key = value)");
    simulate->add_option("--alpha", alpha, "Sensitivity exponent");
    simulate->add_option("--kappa", kappa, "Convection strength");
    simulate->add_option("--nx", nx, "Cells in x (also sets ny unless --ny is given)");
    simulate->add_option("--ny", ny, "Cells in y");
    simulate->add_option("--dt", dt, "Time step (upper bound when adaptive)");
    simulate->add_option("--t-end", t_end, "Final time");
    simulate->add_option("--out", out, "Output directory");

    std::string sweep_config;
    std::vector<double> alphas, kappas;
    std::string sweep_out;
    int jobs = 1;
    auto* sweep = app.add_subcommand("sweep", "Run an (alpha, kappa) regime sweep");
    sweep->add_option("--config", sweep_config, "Base config file");
    sweep->add_option("--alphas", alphas, "Comma-separated alpha values")->delimiter(',')->required();
    sweep->add_option("--kappas", kappas, "Comma-separated kappa values")->delimiter(',')->required();
    sweep->add_option("--out", sweep_out, "Output directory");
    sweep->add_option("--jobs", jobs, "Maximum parallel cells")->check(CLI::PositiveNumber);

    auto* defaults = app.add_subcommand("print-defaults", "Print the default config");

    std::string snapshot_path;
    auto* check = app.add_subcommand("check-snapshot", "Validate a CKSF1 snapshot file");
    check->add_option("file", snapshot_path, "Snapshot path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            cksf::RunConfig cfg = base_config(config_path);
            if (alpha) cfg.params.alpha = *alpha;
            if (kappa) cfg.params.kappa = *kappa;
            if (nx) cfg.nx = cfg.ny = *nx;
            if (ny) cfg.ny = *ny;
            if (dt) cfg.params.dt_max = *dt;
            if (t_end) cfg.params.t_end = *t_end;
            if (out) cfg.out_dir = *out;
            const cksf::RunSummary summary = cksf::run(cfg);
            if (!summary.error.empty()) std::cerr << "error: " << summary.error << '\n';
            std::cout << "completed=" << (summary.completed ? "true" : "false") << " steps=" << summary.steps
                      << " violations=" << summary.violations << " out=" << cfg.out_dir << '\n';
            return summary.exit_status();
        }
        if (*sweep) {
            cksf::SweepSpec spec;
            spec.base = base_config(sweep_config);
            if (!sweep_out.empty()) spec.base.out_dir = sweep_out;
            spec.alphas = alphas;
            spec.kappas = kappas;
            spec.jobs = jobs;
            return report_sweep(cksf::sweep(spec));
        }
        if (*defaults) {
            std::cout << cksf::serialize_config(cksf::RunConfig{});
            return 0;
        }
        if (*check) {
            const cksf::Snapshot snap = cksf::read_snapshot(snapshot_path);
            std::cout << "ok " << snap.header.field_name << ' ' << snap.header.nx << ' ' << snap.header.ny << ' '
                      << snap.header.time << '\n';
            return 0;
        }
    } catch (const cksf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
