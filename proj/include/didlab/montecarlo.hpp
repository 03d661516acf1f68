#pragma once

#include "didlab/dgp.hpp"
#include "didlab/estimators.hpp"
#include "didlab/variance.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace didlab::mc {

/// Runs body(i) for i in [0, n) on up to `workers` threads with a static
/// partition. Results must be written to per-index slots; aggregation happens
/// after the join, in index order, so reports are identical for any worker
/// count. The first exception aborts the run and is rethrown with its
/// replication index.
void parallel_for(long n, int workers, const std::function<void(long)>& body);

enum class EstimatorKind { Twfe, TwfeOls, FirstDifference, Switcher, LongDifference };
enum class VarianceKind { CrveGroup, CrveGroupNoDof, HcRobust, TwowayCgm };

std::string to_string(EstimatorKind e);
std::string to_string(VarianceKind v);
EstimatorKind estimator_from_string(const std::string& s);
VarianceKind variance_from_string(const std::string& s);

/// Extension point for variance methods beyond the built-ins (e.g. external
/// two-way corrections): evaluated per replication next to the named kinds.
struct CustomVariance {
    std::string name;
    std::function<VarianceEstimate(const EstimateRecord&, const PanelData&)> fn;
};

struct MCConfig {
    FactorModelSpec spec;
    int n_groups = 100;
    int n_periods = 2;
    int t_star = 1;
    std::vector<EstimatorKind> estimators = {EstimatorKind::Twfe};
    std::vector<VarianceKind> variance_methods = {VarianceKind::CrveGroup};
    std::vector<CustomVariance> custom_variance_methods;
    double level = 0.05;
    long replications = 5000;
    std::uint64_t seed = 1;
    int workers = 0;             // 0 = hardware concurrency
    int long_diff_horizon = 0;   // L for LongDifference
};

struct MCCell {
    std::string estimator;
    std::string variance_method;
    double reject_rate = 0.0;
    double mc_se = 0.0;
    long reps = 0;
    double mean_vhat = 0.0;      // average variance estimate
    long psd_adjusted = 0;       // CGM clamps
};

struct MCReport {
    std::vector<MCCell> cells;
    // per estimator, across replications
    std::vector<std::string> estimator_names;
    std::vector<double> alpha_mean;
    std::vector<double> alpha_var;
    long replications = 0;
    double seconds = 0.0;
};

/// R independent replications of simulate -> estimate -> variance -> t-test.
MCReport run_mc(const MCConfig& cfg);

struct TwowayRow {
    double rho = 0.0;
    int T = 0;
    double rej_nocluster = 0.0;
    double rej_cluster = 0.0;
    double rej_cgm = 0.0;
    double se_nocluster = 0.0;
    double se_cluster = 0.0;
    double se_cgm = 0.0;
    long psd_adjusted = 0;
    long reps = 0;
};

/// The two-way-cluster grid: 100 groups (half treated), arm-level AR(1)
/// factors, treatment after T/2; robust / group-cluster / CGM decisions.
std::vector<TwowayRow> run_twoway_mc(const std::vector<double>& rho_list,
                                     const std::vector<int>& T_list, long reps,
                                     std::uint64_t seed, double level = 0.05, int workers = 0);

struct PretestRow {
    std::string panel;            // "A".."D"
    double target = 0.05;         // unconditional two-period rejection target
    double rho = 0.0;
    int T = 0;
    double sigma_lambda2 = 0.0;   // calibrated marginal factor variance
    double pass_rate = 0.0;
    double pass_se = 0.0;
    std::optional<double> cond_reject;   // omitted when pass_rate < 5%
    std::optional<double> cond_se;
    double uncond_reject = 0.0;
    long reps = 0;
};

/// Pre-test experiment: factors per arm, treatment only in the last period,
/// pre-tests of periods 1..T-2 against T-1, main test T vs T-1.
/// Panel A uses zero factor variance; other panels calibrate the factor
/// variance per rho so the two-period main test rejects at `target`.
std::vector<PretestRow> run_pretest_mc(const std::vector<int>& T_list,
                                       const std::vector<double>& targets,
                                       const std::vector<double>& rho_list, long reps,
                                       std::uint64_t seed, double level = 0.05, int workers = 0);

struct ConditionalLambdaConfig {
    int n_factors = 1;
    double rho = 0.5;
    double sigma_nu2 = 1.0;
    double loading_var = 1.0;     // Sigma_mu = loading_var * I, both arms
    double sigma_eps2 = 1.0;
    int n_groups = 2000;
    int n_periods = 4;
    int t_star = 2;
    double level = 0.05;
};

struct ConditionalLambdaReport {
    double across_lambda_var = 0.0;   // variance of per-lambda means of N*CRVE
    double within_lambda_var = 0.0;   // average squared MC-SE of those means
    double ratio = 0.0;
    double grand_mean = 0.0;
    int lambda_draws = 0;
    long reps_per_lambda = 0;
};

/// Holds lambda fixed per outer draw and measures how the CRVE level moves
/// with the realization of nabla lambda (mu gap = 0, nonzero loading
/// covariance).
ConditionalLambdaReport run_conditional_lambda_mc(const ConditionalLambdaConfig& cfg,
                                                  int n_lambda_draws, long reps_per_lambda,
                                                  std::uint64_t seed, int workers = 0);

struct StaggeredConfig {
    int n_clusters = 20;          // "states"
    int groups_per_cluster = 10;  // "PUMAs"
    int n_periods = 10;
    int early_t_star = 3;
    int late_t_star = 7;
    double rho = 0.9;
    double sigma_cluster2 = 1.0;  // marginal variance of the state factor
    double sigma_eps2 = 1.0;
    double level = 0.05;
};

struct StaggeredRow {
    std::string scheme;      // unit_random | cluster_random
    std::string estimator;   // twfe | switcher | longdiff
    double reject_rate = 0.0;
    double mc_se = 0.0;
    long reps = 0;
};

/// Staggered-adoption comparison: treated groups split between an early and a
/// late cohort; assignment either group-level random or cluster-level random;
/// rejection rates for TWFE, switcher, and long-difference with group CRVE.
std::vector<StaggeredRow> run_staggered_comparison(const StaggeredConfig& cfg, long reps,
                                                   std::uint64_t seed, int workers = 0);

struct PretestNormalReport {
    double pass_rate = 0.0;
    double uncond_mean = 0.0;
    double cond_mean = 0.0;
    double uncond_var = 0.0;
    double cond_var = 0.0;
    double mean_se = 0.0;        // MC-SE of the conditional mean
    long reps = 0;
    long passed = 0;
};

/// Joint-normal pre-test model: (alpha1, alpha0) bivariate
/// normal with means (alpha, 0); the pre-test uses variances understated by
/// the factor 1 + gap_inflation. Throws BAD_COV for an invalid covariance.
PretestNormalReport run_pretest_normal_model(double var1, double var0, double cov,
                                             double gap_inflation, long reps,
                                             std::uint64_t seed, double alpha = 0.0,
                                             double pretest_level = 0.05, int workers = 0);

}  // namespace didlab::mc
