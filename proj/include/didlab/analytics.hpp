#pragma once

#include "didlab/dgp.hpp"

#include <cstdint>
#include <vector>

namespace didlab::analytics {

/// Inputs to the variance-gap quadratic forms: the loading-mean gap
/// mu_1^e - mu_0^e, the factor-difference second moment E[(nabla lambda)'
/// (nabla lambda)] (or Omega under the local-to-zero drift), the nabla-noise
/// variances per arm, and the treated share.
struct GapInputs {
    std::vector<double> mu_gap;           // length F
    std::vector<double> second_moment;    // F x F row-major PSD
    double sigma_eps2_treated = 0.0;      // var(nabla eps + (nabla alpha - alpha) | D=1)
    double sigma_eps2_control = 0.0;
    double treated_share = 0.5;           // c
};

/// E[(nabla X)^2] for a stationary AR(1) observed over T periods split into
/// halves (first half pre, second half post). Throws BAD_T for odd T.
double nabla_second_moment(double rho, int T, double sigma_nu2);

/// (mu_1^e - mu_0^e)' E[(nabla lambda)'(nabla lambda)] (mu_1^e - mu_0^e):
/// the amount by which the CRVE underestimates var(alpha_hat) as N grows.
double crve_variance_gap(const GapInputs& g);

/// Exact finite-N variance of alpha_hat conditional on the assignment:
/// gap + noise/N terms + loading-dispersion terms tr(Sigma_mu(w) M)/N_w.
double exact_finite_variance(const GapInputs& g, int n_treated, int n_control,
                             const std::vector<double>& loading_cov_treated,
                             const std::vector<double>& loading_cov_control);

/// Asymptotic variance 1 + kappa of the CRVE-based t statistic under the
/// local-to-zero drift with normal xi. Throws ZERO_NOISE.
double local_drift_t_variance(const GapInputs& g, const std::vector<double>& omega);

/// Asymptotic t variance in the paired-block model; always < 2.
double paired_model_t_variance(double sigma_lambda2, double sigma_delta2, double sigma_eps2_treated,
                         double sigma_eps2_control, double treated_share);

struct DesignVariances {
    double v_corr = 0.0;
    double v_uncorr = 0.0;
    double four_term_gap = 0.0;  // equals v_corr - v_uncorr identically
    double term1 = 0.0, term2 = 0.0, term3 = 0.0, term4 = 0.0;
};

/// Design-based variance under block-correlated assignment vs unit-level
/// assignment, and their exact four-term decomposition. Requires F1 = F/2.
/// Throws TOO_FEW_BLOCKS.
DesignVariances design_variances(const FixedPopulation& pop);

/// Rejection rate of a nominal-`level` two-sided normal test when the true
/// t variance is 1 + kappa.
double rejection_from_inflation(double kappa, double level);

struct CalibrationResult {
    double sigma_lambda2 = 0.0;   // marginal variance of each arm factor
    double achieved = 0.0;        // MC rejection at the returned variance
    int probes = 0;
};

/// Bisection on the arm-factor variance of the two-period main test until the
/// unconditional MC rejection rate hits `target` within 0.005 (common random
/// numbers across probes). base_rho sets the factor serial correlation; the
/// returned variance is the marginal (stationary) variance.
/// Throws NO_BRACKET when target < level.
CalibrationResult calibrate_factor_variance(double target, double base_rho, double level,
                                            int reps, std::uint64_t seed);

}  // namespace didlab::analytics
