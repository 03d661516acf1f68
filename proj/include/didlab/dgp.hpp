#pragma once

#include "didlab/panel.hpp"
#include "didlab/rng.hpp"

#include <cstdint>
#include <vector>

namespace didlab {

/// AR(1) shock process: X_t = rho X_{t-1} + nu_t, nu_t ~ N(0, sigma_nu2).
struct ARSpec {
    double rho = 0.0;
    double sigma_nu2 = 1.0;
    enum class Init { Stationary, Zero } init = Init::Stationary;
};

/// Stationary initialization draws X_1 ~ N(0, sigma_nu2/(1-rho^2)).
/// Throws BAD_RHO for |rho| >= 1 under stationary init.
std::vector<double> draw_ar1_path(const ARSpec& spec, int T, RngStream& rng);

/// Exact var(mean_{post} X - mean_{pre} X) for a stationary AR(1) process and
/// arbitrary 1-based period windows; used as an oracle for factor designs.
double ar1_nabla_variance(double rho, double sigma_nu2, std::span<const int> pre_set,
                          std::span<const int> post_set);

enum class Assignment { Bernoulli, FixedFlags, Grouped };
enum class Structure { Generic, Paired, ArmLevel };

/// Full description of the linear-factor-model data generating process:
///   Y_jt = d_jt alpha_jt + theta_j + gamma_t + lambda_t . mu_j + eps_jt
struct FactorModelSpec {
    int n_factors = 0;
    std::vector<double> loading_mean_treated;   // mu_1^e, length F
    std::vector<double> loading_mean_control;   // mu_0^e
    std::vector<double> loading_cov_treated;    // Sigma_mu(1), F x F row-major PSD
    std::vector<double> loading_cov_control;    // Sigma_mu(0)
    std::vector<ARSpec> factor_process;         // per factor
    double sigma_eps2_treated = 1.0;
    double sigma_eps2_control = 1.0;
    double fe_group_sd = 0.0;
    double fe_time_sd = 0.0;

    Assignment assignment = Assignment::Bernoulli;
    double bernoulli_c = 0.5;                   // P(D_j = 1)
    std::vector<bool> fixed_flags;              // used when assignment == FixedFlags
    int grouped_blocks = 0;                     // used when assignment == Grouped
    int grouped_treated_blocks = 0;             // F1

    double alpha = 0.0;                         // treatment effect level
    double alpha_sd = 0.0;                      // >0 draws alpha_jt ~ N(alpha, alpha_sd^2)

    Structure structure = Structure::Generic;
    // paired structure (pair shocks with loading one within each pair)
    double paired_sigma_lambda2 = 0.0;          // per-period var of treated-pair shocks
    double paired_sigma_delta2 = 0.0;           // per-period var of control-pair shocks

    void validate() const;  // throws on violated invariants
};

/// Realized latent draws, returned so oracles can reconstruct the panel.
struct Latents {
    std::vector<double> lambda;      // F x T row-major common-shock paths
    std::vector<double> mu;          // N x F row-major loadings
    std::vector<double> theta;       // group effects
    std::vector<double> gamma;       // time effects
    std::vector<double> eps;         // N x T idiosyncratic shocks
    std::vector<double> alpha_jt;    // N x T realized effects (0 where untreated)
    std::vector<bool> assignment;    // D_j
    std::vector<int> block_of_group; // grouped assignment only
};

struct SimResult {
    PanelData panel;
    Latents latents;
};

/// Simulate a panel from the factor model. t_star applies to every treated
/// group; use `t_star_per_group` for staggered designs (0 entries = control
/// regardless of assignment draw). Bernoulli assignment redraws until both
/// arms are non-empty. `fixed_lambda` (F x T) bypasses the common-shock draw,
/// which lets experiments condition on a lambda realization.
SimResult simulate_panel(const FactorModelSpec& spec, int N, int T, int t_star,
                         std::uint64_t seed,
                         const std::vector<int>* t_star_per_group = nullptr,
                         const std::vector<double>* fixed_lambda = nullptr);

/// Paired-block model: treated groups partitioned into pairs sharing one
/// shock with loading 1, likewise controls; treatment fixed by arm.
/// Throws ODD_ARM when N1 or N0 is odd.
SimResult simulate_paired_panel(const FactorModelSpec& spec, int N1, int N0, int T,
                                int t_star, std::uint64_t seed);

/// Potential outcomes held fixed; only the block treatment allocation is
/// random (design-based uncertainty).
struct FixedPopulation {
    int n_groups = 0;
    int n_periods = 0;
    int t_star = 0;
    std::vector<double> y0;           // N x T
    std::vector<double> y1;           // N x T
    std::vector<int> block_of_group;  // partition into F equal blocks
    int n_blocks = 0;                 // F
    int treated_blocks = 0;           // F1
    // latents kept for the design-based variance formulas
    std::vector<double> nabla_lambda; // per block f
    std::vector<double> nabla_eps;    // per group j

    void validate() const;
};

/// Draw one uniform without-replacement choice of F1 treated blocks and
/// materialize the observed panel.
PanelData simulate_design_based(const FixedPopulation& pop, std::uint64_t seed);

/// Build a fixed population from block-level AR(1) shocks and iid noise;
/// alpha is the constant treatment effect entering y1.
FixedPopulation make_fixed_population(int blocks, int groups_per_block, int T, int t_star,
                                      const ARSpec& block_shock, double sigma_eps2,
                                      double alpha, std::uint64_t seed);

/// Arm-level preset: 100 groups (half treated), eps ~ N(0,1), one AR(1)
/// factor per arm with innovation variance 1, treatment after T/2.
FactorModelSpec preset_twoway_mc_dgp(double rho, int T);

/// Reconstruct Y from latents; used by tests to check the generating identity.
PanelData rebuild_from_latents(const FactorModelSpec& spec, const Latents& lat, int N, int T,
                               const std::vector<int>& t_star_per_group);

}  // namespace didlab
