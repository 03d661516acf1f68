#pragma once

#include <cmath>

namespace didlab::stats {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile.
double normal_quantile(double p);

/// Student-t CDF with (possibly non-integer) dof; dof = +inf falls back to normal.
double student_t_cdf(double x, double dof);

/// Two-sided p-value of a t statistic against Student-t(dof).
double two_sided_p(double t, double dof);

/// Upper critical value for a two-sided test at `level`.
double t_critical(double level, double dof);

/// Binomial Monte Carlo standard error sqrt(p(1-p)/R).
inline double mc_se(double p, long reps) {
    if (reps <= 0) return 0.0;
    return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

}  // namespace didlab::stats
