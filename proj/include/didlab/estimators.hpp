#pragma once

#include "didlab/panel.hpp"

#include <string>
#include <vector>

namespace didlab {

/// One 2x2 comparison entering a (possibly composite) estimator.
struct Comparison {
    int pre_period = 0;   // 1-based
    int post_period = 0;  // 1-based
    double weight = 1.0;
    int n_switchers = 0;
    int n_comparison = 0;
};

/// Point estimate plus the per-group residual combinations W_hat_j that every
/// cluster-robust variance estimator consumes.
///
/// Convention: W_hat_j is scaled so that
///   var_hat = (1/N1^2) sum_{treated} W_hat_j^2 + (1/N0^2) sum_{control} W_hat_j^2
/// reproduces the estimator's cluster sandwich, with N1/N0 the *effective*
/// arm counts below. Group j's signed influence on alpha_hat is
/// W_hat_j / N1 for treated groups and -W_hat_j / N0 for controls.
/// For the plain TWFE estimator W_hat_j is literally nabla Y_j minus its arm
/// mean, whose within-arm means vanish.
struct EstimateRecord {
    double alpha_hat = 0.0;
    std::vector<double> what;          // per group, 0 for non-participants
    std::vector<bool> treated_arm;     // D_j, copied from the panel
    std::vector<bool> participates;    // enters >= 1 comparison
    int n_treated_eff = 0;
    int n_control_eff = 0;
    std::string estimator_tag;
    std::vector<Comparison> comparisons;

    /// Signed contribution of group j to alpha_hat deviations.
    double influence(int j) const {
        if (!participates[j]) return 0.0;
        return treated_arm[j] ? what[j] / n_treated_eff : -what[j] / n_control_eff;
    }
};

/// DID of post-pre means, treated vs control; requires a uniform t*.
/// Throws STAGGERED_UNSUPPORTED otherwise.
EstimateRecord twfe(const PanelData& p);

/// Full two-way-fixed-effects OLS on the (j,t) panel with regressor d_jt.
/// Coincides with twfe() under a uniform t*, and handles staggered designs.
EstimateRecord twfe_ols(const PanelData& p);

/// TWFE restricted to periods {t*, t*+1}.
EstimateRecord first_difference(const PanelData& p);

/// Consecutive-period switcher estimator: for every switch date s, a 2x2 DID
/// between (s, s+1) of groups switching at s against groups still untreated
/// at s+1; switch dates weighted by switcher counts.
/// `allow_not_yet_treated` admits later cohorts into the comparison set.
EstimateRecord switcher_did(const PanelData& p, bool allow_not_yet_treated = false);

/// Long-difference estimator: per cohort s and horizon l = 0..L, a 2x2 DID
/// between (s+l+1, s); equal weight per (cohort, horizon) cell.
EstimateRecord long_difference(const PanelData& p, int max_horizon,
                               bool allow_not_yet_treated = false);

/// Placebo 2x2 DID between two pre-treatment periods (s vs base).
/// Throws POST_PERIOD_IN_PRETEST when either period is past t*.
EstimateRecord pretest_coefficient(const PanelData& p, int s, int base);

/// Shared two-way within-projection fit, also used by the variance module.
struct TwfeFit {
    double alpha_hat = 0.0;
    double sxx = 0.0;               // sum of squared within-transformed d
    std::vector<double> xt;         // within-transformed d, N x T
    std::vector<double> resid;      // OLS residuals, N x T
    int n_params = 0;               // N + T (rank of the dummy design)
};
TwfeFit fit_twfe_ols(const PanelData& p);

}  // namespace didlab
