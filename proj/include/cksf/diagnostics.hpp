#pragma once

#include "cksf/grid.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cksf {

/// One row of diagnostics.csv. Integrals use midpoint quadrature; gradients
/// are face differences with zero boundary faces.
struct DiagnosticsRecord {
    long step = 0;
    double t = 0.0;
    double dt = 0.0;
    double mass_n = 0.0;
    double mass_m = 0.0;
    double mass_diff = 0.0;
    double sup_n = 0.0;
    double sup_c = 0.0;
    double sup_m = 0.0;
    double sup_u = 0.0;
    double l2_m_sq = 0.0;
    /// integral of |grad c|^2
    double grad_c_l2 = 0.0;
    /// integral of |grad c|^4
    double grad_c_l4 = 0.0;
    /// integral of (n + 1) ln(n + 1)
    double entropy = 0.0;
    double grad_u_l2_sq = 0.0;
    /// integral of ln(n + 1) + |u|^2 + |grad c|^2 (unit weights)
    double lyapunov = 0.0;
    /// running sum of dt * integral of n m
    double cum_reaction = 0.0;
    /// running sum of 2 dt ||grad m||^2
    double cum_grad_m = 0.0;
    double clamp_total = 0.0;
};

inline constexpr std::array<std::string_view, 19> kDiagnosticsColumns{
    "step",      "t",         "dt",         "mass_n",       "mass_m",   "mass_diff",    "sup_n",
    "sup_c",     "sup_m",     "sup_u",      "l2_m_sq",      "grad_c_l2", "grad_c_l4",   "entropy",
    "grad_u_l2_sq", "lyapunov", "cum_reaction", "cum_grad_m", "clamp_total"};

DiagnosticsRecord compute_record(const SimState& state, const std::optional<DiagnosticsRecord>& prev);

/// Slacks of the cumulative checks; defaults are the acceptance tolerances.
struct InvariantTolerances {
    double mass_n_rel = 1e-12;
    double mass_diff_rel = 1e-10;
    double sup_abs = 1e-9;
    double cum_reaction_abs = 1e-8;
    double l2_m_rel = 1e-6;
    double clamp_rel = 1e-9;
};

struct Violation {
    std::string check;
    double value = 0.0;
    double bound = 0.0;
    double slack = 0.0;

    std::string describe() const;
};

/// Monotonicity and conservation checks between consecutive records of one
/// run. `initial` is the t = 0 record of the same run.
std::vector<Violation> assert_invariants(const DiagnosticsRecord& curr, const DiagnosticsRecord& prev,
                                         const DiagnosticsRecord& initial,
                                         const InvariantTolerances& tolerances = {});

/// Shortest decimal that round-trips the double.
std::string format_double(double value);

std::string csv_header();
std::string csv_row(const DiagnosticsRecord& record);

/// Streams records to a CSV sink (header written on construction, LF endings).
class DiagnosticsWriter {
public:
    explicit DiagnosticsWriter(std::ostream& out);
    void write(const DiagnosticsRecord& record);
    void flush();

private:
    std::ostream& out_;
};

} // namespace cksf
