#pragma once

#include "cksf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace cksf {

struct SolveStats {
    int iterations = 0;
    /// Infinity norm of the final residual b - A x.
    double residual = 0.0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline void remove_mean(std::span<double> a) {
    if (a.empty()) return;
    const double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    for (double& v : a) v -= mean;
}

} // namespace detail

/**
 * Preconditioned conjugate gradients for a symmetric positive (semi)definite
 * operator. `apply(in, out)` computes out = A in, `precondition(in, out)`
 * computes out = M^-1 in. The initial guess is M^-1 b. Iterates until
 * ||b - A x||_inf <= abs_tol. With `singular_constant` the constant vector is
 * treated as the null space: the residual and the iterate are kept mean-zero.
 *
 * Reductions run in a fixed sequential order.
 */
template <class Apply, class Precondition>
SolveStats pcg(Apply&& apply, Precondition&& precondition, std::span<const double> b,
               std::span<double> x, double abs_tol, int max_iterations, bool singular_constant,
               const char* label = "pcg") {
    const std::size_t n = b.size();
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(n), p(n), ap(n);
    if (singular_constant) detail::remove_mean(r);

    precondition(std::span<const double>(r), std::span<double>(x));
    if (singular_constant) detail::remove_mean(x);

    auto refresh_residual = [&] {
        apply(std::span<const double>(x.data(), n), std::span<double>(ap));
        for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
        if (singular_constant) detail::remove_mean(r);
    };
    refresh_residual();

    SolveStats stats;
    stats.residual = detail::norm_inf(r);
    if (stats.residual <= abs_tol) return stats;

    precondition(std::span<const double>(r), std::span<double>(z));
    if (singular_constant) detail::remove_mean(z);
    p = z;
    double rz = detail::dot(r, z);

    for (int it = 1; it <= max_iterations; ++it) {
        apply(std::span<const double>(p), std::span<double>(ap));
        const double pap = detail::dot(p, ap);
        if (!(pap > 0.0)) break;
        const double step = rz / pap;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += step * p[k];
            r[k] -= step * ap[k];
        }
        if (singular_constant) detail::remove_mean(r);
        stats.iterations = it;
        stats.residual = detail::norm_inf(r);
        if (stats.residual <= abs_tol) {
            // Confirm with the true residual; the recursive one drifts.
            refresh_residual();
            stats.residual = detail::norm_inf(r);
            if (stats.residual <= abs_tol) {
                if (singular_constant) detail::remove_mean(x);
                return stats;
            }
        }
        precondition(std::span<const double>(r), std::span<double>(z));
        if (singular_constant) detail::remove_mean(z);
        const double rz_next = detail::dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    refresh_residual();
    stats.residual = detail::norm_inf(r);
    if (stats.residual <= abs_tol) {
        if (singular_constant) detail::remove_mean(x);
        return stats;
    }
    throw NoConvergence(std::string(label) + " did not reach tolerance after " +
                            std::to_string(stats.iterations) + " iterations",
                        stats.iterations, stats.residual);
}

} // namespace cksf
