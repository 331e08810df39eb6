#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>

#include "medsynth/numeric/matrix.hpp"

namespace medsynth {

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
    bool pass = true;
};

// Compares analytic gradients against central finite differences
// (f(p+h) - f(p-h)) / 2h per coordinate. loss_fn must be deterministic
// (freeze any sampling noise before calling). Relative error is
// |a - n| / max(1e-12, |a| + |n|). Failure is a report outcome, never an
// exception.
inline GradCheckReport gradient_check(const std::function<double(const Vector&)>& loss_fn,
                                      const Vector& params, const Vector& analytic_grads,
                                      double h, double tol) {
    GradCheckReport report;
    Vector p = params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = p[i];
        p[i] = saved + h;
        const double f_plus = loss_fn(p);
        p[i] = saved - h;
        const double f_minus = loss_fn(p);
        p[i] = saved;

        const double numeric = (f_plus - f_minus) / (2.0 * h);
        const double analytic = analytic_grads[i];
        const double denom = std::max(1e-12, std::abs(analytic) + std::abs(numeric));
        const double rel = std::abs(analytic - numeric) / denom;
        if (rel > report.max_rel_error) {
            report.max_rel_error = rel;
            report.worst_index = i;
            report.analytic_at_worst = analytic;
            report.numeric_at_worst = numeric;
        }
    }
    report.pass = report.max_rel_error <= tol;
    return report;
}

}  // namespace medsynth
