#pragma once

#include "cksf/config.hpp"
#include "cksf/diagnostics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cksf {

struct RunSummary {
    bool completed = false;
    long steps = 0;
    double t_final = 0.0;
    double mass_n = 0.0;
    double mass_m = 0.0;
    double sup_n0 = 0.0;
    double max_sup_n = 0.0;
    double max_lyapunov_ratio = 0.0;
    long violations = 0;
    std::vector<std::string> violation_messages;
    bool suspected_unbounded = false;
    double wall_seconds = 0.0;
    /// Set when the run aborted on an exception (custom field, solver, ...).
    std::string error;

    int exit_status() const { return completed && violations == 0 && error.empty() ? 0 : 1; }
    double max_sup_n_ratio() const { return sup_n0 > 0.0 ? max_sup_n / sup_n0 : 0.0; }
};

/// Runs one simulation, writing diagnostics.csv, snapshots/ and summary.txt
/// into config.out_dir. Errors are reported in the summary, not thrown, except
/// for I/O failures on the output directory.
RunSummary run(const RunConfig& config);

struct SweepSpec {
    std::vector<double> alphas;
    std::vector<double> kappas;
    RunConfig base;
    int jobs = 1;
};

struct RegimeRow {
    double alpha = 0.0;
    double kappa = 0.0;
    bool completed = false;
    double max_sup_n_ratio = 0.0;
    long violations = 0;
    bool bounded = false;
    std::string error;
};

/// Runs every (alpha, kappa) cell into base.out_dir/alpha_<a>_kappa_<k>/ and
/// writes base.out_dir/regime.csv. Throws InvalidArgument on an empty list.
std::vector<RegimeRow> sweep(const SweepSpec& spec);

std::string regime_csv(const std::vector<RegimeRow>& rows);

} // namespace cksf
