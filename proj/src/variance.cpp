#include "didlab/variance.hpp"

#include "didlab/common.hpp"
#include "didlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace didlab {

VarianceEstimate crve_group(const EstimateRecord& e, bool dof_correction) {
    const int n1 = e.n_treated_eff, n0 = e.n_control_eff;
    require(n1 >= 2 && n0 >= 2, "TOO_FEW_CLUSTERS",
            "CRVE needs >= 2 clusters per arm, got N1=" + std::to_string(n1) +
                " N0=" + std::to_string(n0));
    double s1 = 0.0, s0 = 0.0;
    for (size_t j = 0; j < e.what.size(); ++j) {
        if (!e.participates[j]) continue;
        (e.treated_arm[j] ? s1 : s0) += e.what[j] * e.what[j];
    }
    const double g = n1 + n0;
    VarianceEstimate v;
    v.method = "crve_group";
    v.value = s1 / (static_cast<double>(n1) * n1) + s0 / (static_cast<double>(n0) * n0);
    if (dof_correction) v.value *= g / (g - 1.0);
    v.dof = g - 1.0;
    return v;
}

VarianceEstimate crve_cluster(const EstimateRecord& e,
                              const std::vector<std::string>& cluster_of_group,
                              bool dof_correction) {
    require(cluster_of_group.size() == e.what.size(), "DIM_MISMATCH",
            "cluster labels must cover every group");
    std::map<std::string, double> score;
    for (size_t j = 0; j < e.what.size(); ++j) {
        if (!e.participates[j]) continue;
        score[cluster_of_group[j]] += e.influence(static_cast<int>(j));
    }
    const auto g = static_cast<double>(score.size());
    require(score.size() >= 2, "TOO_FEW_CLUSTERS", "need >= 2 clusters");
    VarianceEstimate v;
    v.method = "crve_cluster";
    for (const auto& [c, s] : score) v.value += s * s;
    if (dof_correction) v.value *= g / (g - 1.0);
    v.dof = g - 1.0;
    return v;
}

VarianceEstimate hc_robust(const PanelData& p) {
    validate_panel(p);
    const auto fit = fit_twfe_ols(p);
    const auto n = static_cast<double>(p.n_groups) * p.n_periods;
    const double k = fit.n_params;
    double meat = 0.0;
    for (size_t i = 0; i < fit.xt.size(); ++i) {
        const double xe = fit.xt[i] * fit.resid[i];
        meat += xe * xe;
    }
    VarianceEstimate v;
    v.method = "hc_robust";
    const double factor = n > k ? n / (n - k) : 1.0;  // saturated panels fit exactly
    v.value = meat / (fit.sxx * fit.sxx) * factor;
    v.dof = std::max(1.0, n - k);
    return v;
}

VarianceEstimate twoway_cgm(const PanelData& p, const CgmOptions& opt) {
    validate_panel(p);
    const auto fit = fit_twfe_ols(p);
    const int N = p.n_groups, T = p.n_periods;
    const double n = static_cast<double>(N) * T;

    std::vector<double> sg(static_cast<size_t>(N), 0.0), st(static_cast<size_t>(T), 0.0);
    double v_int = 0.0;
    for (int j = 0; j < N; ++j) {
        for (int t = 0; t < T; ++t) {
            const double xe = fit.xt[static_cast<size_t>(j) * T + t] *
                              fit.resid[static_cast<size_t>(j) * T + t];
            sg[j] += xe;
            st[t] += xe;
            v_int += xe * xe;
        }
    }
    double v_g = 0.0, v_t = 0.0;
    for (double s : sg) v_g += s * s;
    for (double s : st) v_t += s * s;
    const double s2 = fit.sxx * fit.sxx;
    v_g /= s2;
    v_t /= s2;
    v_int /= s2;
    if (opt.small_sample) {
        v_g *= static_cast<double>(N) / (N - 1);
        v_t *= static_cast<double>(T) / (T - 1);
        v_int *= n / (n - 1.0);
    }

    VarianceEstimate v;
    v.method = "twoway_cgm";
    v.value = v_g + v_t - v_int;
    if (v.value < 0.0) {
        v.value = 0.0;
        v.psd_adjusted = true;
    }
    // min(N,T)-1 is far too conservative as a test reference (see README on
    // reference-distribution sensitivity); default to the regression dof.
    v.dof = opt.conservative_dof ? static_cast<double>(std::min(N, T) - 1)
                                 : std::max(1.0, n - fit.n_params);
    return v;
}

TestResult t_test(double alpha_hat, const VarianceEstimate& v, double level) {
    require(v.value >= 0.0, "BAD_COV", "variance must be >= 0");
    require(level > 0.0 && level < 1.0, "BAD_COV", "level must be in (0,1)");
    TestResult r;
    if (v.value == 0.0) {
        r.t = alpha_hat == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        r.p = alpha_hat == 0.0 ? 1.0 : 0.0;
        r.reject = alpha_hat != 0.0;
        return r;
    }
    r.t = alpha_hat / std::sqrt(v.value);
    r.p = stats::two_sided_p(r.t, v.dof);
    r.reject = r.p < level;
    return r;
}

}  // namespace didlab
