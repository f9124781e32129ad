#include "cksf/run.hpp"

#include "cksf/errors.hpp"
#include "cksf/fluid.hpp"
#include "cksf/log.hpp"
#include "cksf/snapshot.hpp"
#include "cksf/stepper.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

namespace cksf {

namespace fs = std::filesystem;

namespace {

void write_state_snapshots(const fs::path& dir, const SimState& state) {
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "_%06ld.cksf", state.step_index);
    write_snapshot(dir / ("n" + std::string(suffix)), "n", state.t, state.n);
    write_snapshot(dir / ("c" + std::string(suffix)), "c", state.t, state.c);
    write_snapshot(dir / ("m" + std::string(suffix)), "m", state.t, state.m);
    write_snapshot(dir / ("p" + std::string(suffix)), "p", state.t, state.p);
    write_snapshot(dir / ("ux" + std::string(suffix)), "ux", state.t, cell_velocity_x(state.u));
    write_snapshot(dir / ("uy" + std::string(suffix)), "uy", state.t, cell_velocity_y(state.u));
}

void write_summary(const fs::path& path, const RunSummary& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "completed: " << (s.completed ? "true" : "false") << '\n';
    out << "t_final: " << format_double(s.t_final) << '\n';
    out << "steps: " << s.steps << '\n';
    out << "mass_n: " << format_double(s.mass_n) << '\n';
    out << "mass_m: " << format_double(s.mass_m) << '\n';
    out << "sup_n0: " << format_double(s.sup_n0) << '\n';
    out << "max_sup_n: " << format_double(s.max_sup_n) << '\n';
    out << "max_sup_n_ratio: " << format_double(s.max_sup_n_ratio()) << '\n';
    out << "max_lyapunov_ratio: " << format_double(s.max_lyapunov_ratio) << '\n';
    out << "suspected_unbounded: " << (s.suspected_unbounded ? "true" : "false") << '\n';
    out << "violations: " << s.violations << '\n';
    out << "wall_seconds: " << format_double(s.wall_seconds) << '\n';
    out << "error: " << s.error << '\n';
    for (const std::string& v : s.violation_messages) out << "violation: " << v << '\n';
}

bool is_invariant_failure(const Error& e) {
    return dynamic_cast<const InvariantViolation*>(&e) != nullptr ||
           dynamic_cast<const MonotonicityViolation*>(&e) != nullptr;
}

} // namespace

RunSummary run(const RunConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    RunSummary summary;
    const fs::path out_dir(config.out_dir);
    const fs::path snap_dir = out_dir / "snapshots";
    std::error_code ec;
    fs::create_directories(snap_dir, ec);
    if (ec) throw IoError("cannot create " + snap_dir.string() + ": " + ec.message());
    {
        std::ofstream cfg(out_dir / "config.txt", std::ios::binary);
        cfg << serialize_config(config);
    }
    std::ofstream csv(out_dir / "diagnostics.csv", std::ios::binary);
    if (!csv) throw IoError("cannot write " + (out_dir / "diagnostics.csv").string());
    DiagnosticsWriter writer(csv);

    std::optional<SimState> state;
    try {
        validate_config(config);
        const SimParams& params = config.params;
        const Grid2D grid = config.grid();
        state.emplace(make_initial_state(grid, config.initial_preset(), params));
        PoissonWorkspace ws(grid);

        const DiagnosticsRecord initial = compute_record(*state, std::nullopt);
        writer.write(initial);
        DiagnosticsRecord prev = initial;
        summary.sup_n0 = initial.sup_n;
        summary.max_sup_n = initial.sup_n;
        summary.max_lyapunov_ratio = 1.0;
        write_state_snapshots(snap_dir, *state);
        spdlog::info("run start: {}x{} grid, alpha={}, kappa={}, t_end={}", grid.nx(), grid.ny(), params.alpha,
                     params.kappa, params.t_end);

        bool reached_end = params.t_end == 0.0;
        long steps = 0;
        while (!reached_end && steps < config.max_steps) {
            DtReport report = choose_dt(*state, params);
            const double remaining = params.t_end - state->t;
            // Land exactly on t_end; absorb a sliver rather than leaving one.
            const bool last = report.dt_used >= remaining * (1.0 - 1e-9);
            if (last) report.dt_used = remaining;

            StepResult result = step_with_dt(*state, report, params, ws);
            state = std::move(result.state);
            ++steps;
            if (last) reached_end = true;

            const DiagnosticsRecord rec = compute_record(*state, prev);
            writer.write(rec);
            const std::vector<Violation> violations = assert_invariants(rec, prev, initial);
            summary.max_sup_n = std::max(summary.max_sup_n, rec.sup_n);
            if (initial.lyapunov > 0.0) {
                summary.max_lyapunov_ratio = std::max(summary.max_lyapunov_ratio, rec.lyapunov / initial.lyapunov);
            }
            spdlog::debug("step {} t={} dt={} ({}) mass_n={} sup_n={}", rec.step, rec.t, rec.dt,
                          to_string(report.limiting_constraint), rec.mass_n, rec.sup_n);
            if (!violations.empty()) {
                summary.violations += static_cast<long>(violations.size());
                for (const Violation& v : violations) {
                    summary.violation_messages.push_back("step " + std::to_string(rec.step) + ": " + v.describe());
                    spdlog::error("invariant violation at step {}: {}", rec.step, v.describe());
                }
                break;
            }
            if (config.snapshot_every > 0 && state->step_index % config.snapshot_every == 0) {
                write_state_snapshots(snap_dir, *state);
            }
            prev = rec;
        }
        summary.completed = reached_end;
        if (!reached_end && summary.violations == 0) {
            summary.error = "max_steps reached before t_end";
        }
    } catch (const Error& e) {
        summary.error = e.what();
        if (is_invariant_failure(e)) {
            ++summary.violations;
            summary.violation_messages.emplace_back(e.what());
        }
        spdlog::error("run aborted: {}", e.what());
    }
    writer.flush();

    if (state) {
        if (config.snapshot_every == 0 || state->step_index % config.snapshot_every != 0) {
            write_state_snapshots(snap_dir, *state);
        }
        summary.steps = state->step_index;
        summary.t_final = state->t;
        summary.mass_n = integrate_cellwise(state->n);
        summary.mass_m = integrate_cellwise(state->m);
    }
    summary.suspected_unbounded = summary.sup_n0 > 0.0 && summary.max_sup_n > config.bounded_ratio * summary.sup_n0;
    if (summary.suspected_unbounded) spdlog::warn("suspected unbounded: max ||n|| grew {}x", summary.max_sup_n_ratio());
    if (summary.max_lyapunov_ratio > 100.0) {
        spdlog::warn("lyapunov functional grew {}x over the run", summary.max_lyapunov_ratio);
    }
    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_summary(out_dir / "summary.txt", summary);
    spdlog::info("run finished: completed={} steps={} violations={} wall={:.2f}s", summary.completed, summary.steps,
                 summary.violations, summary.wall_seconds);
    return summary;
}

std::string regime_csv(const std::vector<RegimeRow>& rows) {
    std::string out = "alpha,kappa,completed,max_sup_n_ratio,violations,bounded\n";
    for (const RegimeRow& r : rows) {
        out += format_double(r.alpha) + "," + format_double(r.kappa) + "," + (r.completed ? "true" : "false") + "," +
               format_double(r.max_sup_n_ratio) + "," + std::to_string(r.violations) + "," +
               (r.bounded ? "true" : "false") + "\n";
    }
    return out;
}

std::vector<RegimeRow> sweep(const SweepSpec& spec) {
    if (spec.alphas.empty()) throw InvalidArgument("sweep needs a nonempty alpha list");
    if (spec.kappas.empty()) throw InvalidArgument("sweep needs a nonempty kappa list");

    std::vector<RegimeRow> rows;
    for (double a : spec.alphas)
        for (double k : spec.kappas) rows.push_back(RegimeRow{.alpha = a, .kappa = k, .error = {}});

    const fs::path root(spec.base.out_dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next++; idx < rows.size(); idx = next++) {
            RegimeRow& row = rows[idx];
            RunConfig cfg = spec.base;
            cfg.params.alpha = row.alpha;
            cfg.params.kappa = row.kappa;
            cfg.out_dir = (root / ("alpha_" + format_double(row.alpha) + "_kappa_" + format_double(row.kappa))).string();
            try {
                const RunSummary s = run(cfg);
                row.completed = s.completed && s.error.empty();
                row.max_sup_n_ratio = s.max_sup_n_ratio();
                row.violations = s.violations;
                row.error = s.error;
            } catch (const std::exception& e) {
                row.completed = false;
                row.error = e.what();
            }
            row.bounded = row.completed && row.violations == 0 && row.max_sup_n_ratio <= spec.base.bounded_ratio;
        }
    };
    const int jobs = std::clamp(spec.jobs, 1, static_cast<int>(rows.size()));
    {
        std::vector<std::jthread> pool;
        for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
        worker();
    }

    std::ofstream out(root / "regime.csv", std::ios::binary);
    if (!out) throw IoError("cannot write " + (root / "regime.csv").string());
    out << regime_csv(rows);
    return rows;
}

} // namespace cksf
