#pragma once

#include "didlab/estimators.hpp"
#include "didlab/panel.hpp"

#include <string>
#include <vector>

namespace didlab {

struct VarianceEstimate {
    std::string method;       // crve_group | crve_cluster | hc_robust | twoway_cgm
    double value = 0.0;       // >= 0 after the PSD guard
    double dof = 1.0;         // reference dof used by t_test
    bool psd_adjusted = false;
};

/// Cluster-robust variance at the group level:
///   (1/N1^2) sum_treated W_hat^2 + (1/N0^2) sum_control W_hat^2,
/// times G/(G-1) unless `dof_correction` is disabled; dof = G-1.
/// Throws TOO_FEW_CLUSTERS when either effective arm has < 2 groups.
VarianceEstimate crve_group(const EstimateRecord& e, bool dof_correction = true);

/// Cluster-robust variance at an arbitrary level nesting groups: sums signed
/// group influences within each cluster label, then squares.
VarianceEstimate crve_cluster(const EstimateRecord& e,
                              const std::vector<std::string>& cluster_of_group,
                              bool dof_correction = true);

/// HC1 sandwich for the pooled OLS of the TWFE regression, every (j,t) cell
/// treated as independent.
VarianceEstimate hc_robust(const PanelData& p);

struct CgmOptions {
    bool small_sample = false;     // per-component G_c/(G_c-1) factors
    bool conservative_dof = false; // reference t(min(N,T)-1) instead of ~normal
};

/// Cameron-Gelbach-Miller two-way cluster variance (group + time -
/// intersection) on the TWFE regression scores; clamped at 0 when the
/// difference goes negative (psd_adjusted set).
VarianceEstimate twoway_cgm(const PanelData& p, const CgmOptions& opt = {});

struct TestResult {
    double t = 0.0;
    double p = 1.0;
    bool reject = false;
};

/// t = alpha_hat/sqrt(v), p from Student-t(v.dof); v = 0 rejects iff
/// alpha_hat != 0.
TestResult t_test(double alpha_hat, const VarianceEstimate& v, double level);

}  // namespace didlab
