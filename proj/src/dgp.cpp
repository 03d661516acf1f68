#include "didlab/dgp.hpp"

#include "didlab/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace didlab {

namespace {

// Component tags for substream derivation. Each latent component draws from
// its own stream so that, e.g., changing fe_group_sd perturbs theta only.
enum Stream : std::uint64_t {
    kAssign = 1,
    kLambda = 2,
    kMu = 3,
    kEps = 4,
    kTheta = 5,
    kGamma = 6,
    kAlpha = 7,
};

// Lower Cholesky factor tolerating semidefinite input (zero pivots allowed).
// Throws BAD_COV when the matrix is indefinite.
std::vector<double> chol_psd(const std::vector<double>& a, int n, const char* what) {
    std::vector<double> L(static_cast<size_t>(n) * n, 0.0);
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(a[i * n + i]));
    const double tol = 1e-12 * std::max(scale, 1.0);
    for (int j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (int k = 0; k < j; ++k) d -= L[j * n + k] * L[j * n + k];
        if (d < -tol) fail("BAD_COV", std::string(what) + " is not positive semidefinite");
        if (d <= tol) {
            // semidefinite direction: zero column (requires consistent rows below)
            L[j * n + j] = 0.0;
            for (int i = j + 1; i < n; ++i) {
                double s = a[i * n + j];
                for (int k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
                if (std::abs(s) > 1e-8 * std::max(scale, 1.0))
                    fail("BAD_COV", std::string(what) + " is not positive semidefinite");
            }
            continue;
        }
        L[j * n + j] = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (int k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
            L[i * n + j] = s / L[j * n + j];
        }
    }
    return L;
}

void check_ar(const ARSpec& s) {
    require(s.sigma_nu2 >= 0.0, "BAD_RHO", "innovation variance must be >= 0");
    if (s.init == ARSpec::Init::Stationary) {
        require(std::abs(s.rho) < 1.0, "BAD_RHO",
                "stationary initialization needs |rho| < 1, got " + std::to_string(s.rho));
    }
}

}  // namespace

std::vector<double> draw_ar1_path(const ARSpec& spec, int T, RngStream& rng) {
    check_ar(spec);
    require(T >= 1, "BAD_T", "path length must be >= 1");
    std::vector<double> x(static_cast<size_t>(T));
    const double sd = std::sqrt(spec.sigma_nu2);
    if (spec.init == ARSpec::Init::Stationary) {
        x[0] = rng.normal(0.0, std::sqrt(spec.sigma_nu2 / (1.0 - spec.rho * spec.rho)));
    } else {
        x[0] = rng.normal(0.0, sd);
    }
    for (int t = 1; t < T; ++t) x[t] = spec.rho * x[t - 1] + rng.normal(0.0, sd);
    return x;
}

double ar1_nabla_variance(double rho, double sigma_nu2, std::span<const int> pre_set,
                          std::span<const int> post_set) {
    require(std::abs(rho) < 1.0, "BAD_RHO", "stationary variance needs |rho| < 1");
    require(!pre_set.empty() && !post_set.empty(), "EMPTY_WINDOW", "windows must be non-empty");
    const double marg = sigma_nu2 / (1.0 - rho * rho);
    auto gamma = [&](int h) { return marg * std::pow(rho, std::abs(h)); };
    std::vector<std::pair<int, double>> w;
    for (int t : pre_set) w.emplace_back(t, -1.0 / static_cast<double>(pre_set.size()));
    for (int t : post_set) w.emplace_back(t, 1.0 / static_cast<double>(post_set.size()));
    double v = 0.0;
    for (const auto& [ti, wi] : w)
        for (const auto& [tj, wj] : w) v += wi * wj * gamma(ti - tj);
    return v;
}

void FactorModelSpec::validate() const {
    const auto F = static_cast<size_t>(n_factors);
    require(n_factors >= 0, "BAD_COV", "n_factors must be >= 0");
    if (structure != Structure::Paired) {
        require(loading_mean_treated.size() == F && loading_mean_control.size() == F,
                "DIM_MISMATCH", "loading means must have length F");
        require(loading_cov_treated.size() == F * F && loading_cov_control.size() == F * F,
                "DIM_MISMATCH", "loading covariances must be F x F");
        require(factor_process.size() == F, "DIM_MISMATCH",
                "factor_process must have one ARSpec per factor");
        if (n_factors > 0) {
            chol_psd(loading_cov_treated, n_factors, "loading_cov_treated");
            chol_psd(loading_cov_control, n_factors, "loading_cov_control");
        }
        for (const auto& f : factor_process) check_ar(f);
    } else {
        require(paired_sigma_lambda2 >= 0.0 && paired_sigma_delta2 >= 0.0, "BAD_COV",
                "pair shock variances must be >= 0");
    }
    require(sigma_eps2_treated >= 0.0 && sigma_eps2_control >= 0.0, "BAD_COV",
            "noise variances must be >= 0");
    require(fe_group_sd >= 0.0 && fe_time_sd >= 0.0, "BAD_COV", "fe scales must be >= 0");
    require(alpha_sd >= 0.0, "BAD_COV", "alpha_sd must be >= 0");
    if (assignment == Assignment::Bernoulli) {
        require(bernoulli_c > 0.0 && bernoulli_c < 1.0, "BAD_COV",
                "bernoulli share must be in (0,1)");
    }
    if (assignment == Assignment::Grouped) {
        require(grouped_blocks >= 2, "TOO_FEW_BLOCKS", "grouped assignment needs >= 2 blocks");
        require(grouped_treated_blocks >= 1 && grouped_treated_blocks < grouped_blocks,
                "TOO_FEW_BLOCKS", "treated block count must be in 1..blocks-1");
    }
}

namespace {

std::vector<bool> draw_assignment(const FactorModelSpec& spec, int N, RngStream& rng,
                                  std::vector<int>* block_of_group) {
    std::vector<bool> d(static_cast<size_t>(N), false);
    switch (spec.assignment) {
        case Assignment::FixedFlags: {
            require(static_cast<int>(spec.fixed_flags.size()) == N, "DIM_MISMATCH",
                    "fixed_flags length must equal N");
            d = spec.fixed_flags;
            break;
        }
        case Assignment::Bernoulli: {
            // condition on both arms being non-empty by redrawing degenerate draws
            while (true) {
                int n1 = 0;
                for (int j = 0; j < N; ++j) {
                    d[j] = rng.uniform() < spec.bernoulli_c;
                    n1 += d[j];
                }
                if (n1 >= 1 && n1 <= N - 1) break;
            }
            break;
        }
        case Assignment::Grouped: {
            const int F = spec.grouped_blocks;
            require(N % F == 0, "DIM_MISMATCH", "N must be divisible by block count");
            std::vector<int> blocks(static_cast<size_t>(F));
            std::iota(blocks.begin(), blocks.end(), 0);
            for (int i = 0; i < spec.grouped_treated_blocks; ++i) {
                const auto k = i + static_cast<int>(rng.uniform_below(
                                       static_cast<std::uint64_t>(F - i)));
                std::swap(blocks[i], blocks[k]);
            }
            std::vector<bool> block_treated(static_cast<size_t>(F), false);
            for (int i = 0; i < spec.grouped_treated_blocks; ++i) block_treated[blocks[i]] = true;
            const int per = N / F;
            if (block_of_group) block_of_group->resize(N);
            for (int j = 0; j < N; ++j) {
                const int b = j / per;
                d[j] = block_treated[b];
                if (block_of_group) (*block_of_group)[j] = b;
            }
            break;
        }
    }
    return d;
}

SimResult simulate_generic(const FactorModelSpec& spec, int N, int T, int t_star,
                           std::uint64_t seed, const std::vector<int>* t_star_per_group,
                           const std::vector<double>* fixed_lambda) {
    spec.validate();
    require(N >= 2 && T >= 2, "DIM_MISMATCH", "need N >= 2 and T >= 2");
    if (!t_star_per_group) {
        require(t_star >= 1 && t_star <= T - 1, "BAD_TSTAR",
                "t_star must be in 1..T-1, got " + std::to_string(t_star));
    }

    const int F = spec.n_factors;
    Latents lat;

    RngStream rng_assign(seed, kAssign);
    lat.assignment = draw_assignment(spec, N, rng_assign, &lat.block_of_group);

    // common shock paths
    lat.lambda.resize(static_cast<size_t>(F) * T);
    if (fixed_lambda) {
        require(fixed_lambda->size() == lat.lambda.size(), "DIM_MISMATCH",
                "fixed_lambda must be F x T");
        lat.lambda = *fixed_lambda;
    } else {
        RngStream rng_lambda(seed, kLambda);
        for (int f = 0; f < F; ++f) {
            auto path = draw_ar1_path(spec.factor_process[f], T, rng_lambda);
            std::copy(path.begin(), path.end(), lat.lambda.begin() + static_cast<size_t>(f) * T);
        }
    }

    // loadings
    RngStream rng_mu(seed, kMu);
    lat.mu.assign(static_cast<size_t>(N) * F, 0.0);
    if (F > 0) {
        if (spec.structure == Structure::ArmLevel) {
            require(F == 2, "DIM_MISMATCH", "arm-level structure uses exactly 2 factors");
            for (int j = 0; j < N; ++j) lat.mu[static_cast<size_t>(j) * F + (lat.assignment[j] ? 0 : 1)] = 1.0;
        } else {
            const auto L1 = chol_psd(spec.loading_cov_treated, F, "loading_cov_treated");
            const auto L0 = chol_psd(spec.loading_cov_control, F, "loading_cov_control");
            std::vector<double> z(static_cast<size_t>(F));
            for (int j = 0; j < N; ++j) {
                for (int f = 0; f < F; ++f) z[f] = rng_mu.normal();
                const bool tr = lat.assignment[j];
                const auto& L = tr ? L1 : L0;
                const auto& m = tr ? spec.loading_mean_treated : spec.loading_mean_control;
                for (int f = 0; f < F; ++f) {
                    double s = m[f];
                    for (int k = 0; k <= f; ++k) s += L[static_cast<size_t>(f) * F + k] * z[k];
                    lat.mu[static_cast<size_t>(j) * F + f] = s;
                }
            }
        }
    }

    RngStream rng_eps(seed, kEps);
    lat.eps.resize(static_cast<size_t>(N) * T);
    const double sd_eps1 = std::sqrt(spec.sigma_eps2_treated);
    const double sd_eps0 = std::sqrt(spec.sigma_eps2_control);
    for (int j = 0; j < N; ++j) {
        const double sd = lat.assignment[j] ? sd_eps1 : sd_eps0;
        for (int t = 0; t < T; ++t) lat.eps[static_cast<size_t>(j) * T + t] = rng_eps.normal(0.0, sd);
    }

    RngStream rng_theta(seed, kTheta);
    lat.theta.resize(static_cast<size_t>(N));
    for (auto& v : lat.theta) v = rng_theta.normal(0.0, spec.fe_group_sd);
    RngStream rng_gamma(seed, kGamma);
    lat.gamma.resize(static_cast<size_t>(T));
    for (auto& v : lat.gamma) v = rng_gamma.normal(0.0, spec.fe_time_sd);

    // treatment design
    std::vector<int> tstar(static_cast<size_t>(N), 0);
    for (int j = 0; j < N; ++j) {
        if (!lat.assignment[j]) continue;
        tstar[j] = t_star_per_group ? (*t_star_per_group)[j] : t_star;
        if (tstar[j] == 0) lat.assignment[j] = false;  // staggered spec may demote groups
    }

    RngStream rng_alpha(seed, kAlpha);
    lat.alpha_jt.assign(static_cast<size_t>(N) * T, 0.0);
    for (int j = 0; j < N; ++j) {
        if (!lat.assignment[j]) continue;
        for (int t = tstar[j]; t < T; ++t) {
            lat.alpha_jt[static_cast<size_t>(j) * T + t] =
                spec.alpha_sd > 0.0 ? rng_alpha.normal(spec.alpha, spec.alpha_sd) : spec.alpha;
        }
    }

    SimResult out;
    out.panel.n_groups = N;
    out.panel.n_periods = T;
    out.panel.treated = lat.assignment;
    out.panel.treat_start = tstar;
    out.panel.outcomes.resize(static_cast<size_t>(N) * T);
    out.panel.group_ids.resize(static_cast<size_t>(N));
    out.panel.time_ids.resize(static_cast<size_t>(T));
    for (int j = 0; j < N; ++j) out.panel.group_ids[j] = "g" + std::to_string(j + 1);
    for (int t = 0; t < T; ++t) out.panel.time_ids[t] = std::to_string(t + 1);
    for (int j = 0; j < N; ++j) {
        for (int t = 0; t < T; ++t) {
            double v = lat.theta[j] + lat.gamma[t] + lat.eps[static_cast<size_t>(j) * T + t] +
                       lat.alpha_jt[static_cast<size_t>(j) * T + t];
            for (int f = 0; f < F; ++f)
                v += lat.lambda[static_cast<size_t>(f) * T + t] * lat.mu[static_cast<size_t>(j) * F + f];
            out.panel.y(j, t) = v;
        }
    }
    out.latents = std::move(lat);
    return out;
}

}  // namespace

SimResult simulate_panel(const FactorModelSpec& spec, int N, int T, int t_star,
                         std::uint64_t seed, const std::vector<int>* t_star_per_group,
                         const std::vector<double>* fixed_lambda) {
    if (spec.structure == Structure::Paired) {
        require(spec.assignment == Assignment::FixedFlags, "DIM_MISMATCH",
                "paired structure requires fixed treatment flags");
        int n1 = 0;
        for (bool b : spec.fixed_flags) n1 += b;
        return simulate_paired_panel(spec, n1, N - n1, T, t_star, seed);
    }
    return simulate_generic(spec, N, T, t_star, seed, t_star_per_group, fixed_lambda);
}

SimResult simulate_paired_panel(const FactorModelSpec& spec, int N1, int N0, int T, int t_star,
                                std::uint64_t seed) {
    spec.validate();
    require(N1 % 2 == 0 && N0 % 2 == 0, "ODD_ARM",
            "paired model needs even arm sizes, got N1=" + std::to_string(N1) +
                " N0=" + std::to_string(N0));
    require(N1 >= 2 && N0 >= 2, "ODD_ARM", "paired model needs both arms non-empty");
    require(t_star >= 1 && t_star <= T - 1, "BAD_TSTAR", "t_star must be in 1..T-1");

    const int N = N1 + N0;
    const int P1 = N1 / 2, P0 = N0 / 2;
    const int F = P1 + P0;

    Latents lat;
    lat.assignment.assign(static_cast<size_t>(N), false);
    for (int j = 0; j < N1; ++j) lat.assignment[j] = true;
    lat.block_of_group.resize(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j) lat.block_of_group[j] = j / 2;  // pairs are consecutive

    RngStream rng_lambda(seed, kLambda);
    lat.lambda.assign(static_cast<size_t>(F) * T, 0.0);
    const double sdl = std::sqrt(spec.paired_sigma_lambda2);
    const double sdd = std::sqrt(spec.paired_sigma_delta2);
    for (int f = 0; f < F; ++f) {
        const double sd = f < P1 ? sdl : sdd;
        for (int t = 0; t < T; ++t)
            lat.lambda[static_cast<size_t>(f) * T + t] = rng_lambda.normal(0.0, sd);
    }

    RngStream rng_eps(seed, kEps);
    lat.eps.resize(static_cast<size_t>(N) * T);
    for (int j = 0; j < N; ++j) {
        const double sd =
            std::sqrt(lat.assignment[j] ? spec.sigma_eps2_treated : spec.sigma_eps2_control);
        for (int t = 0; t < T; ++t) lat.eps[static_cast<size_t>(j) * T + t] = rng_eps.normal(0.0, sd);
    }

    RngStream rng_theta(seed, kTheta);
    lat.theta.resize(static_cast<size_t>(N));
    for (auto& v : lat.theta) v = rng_theta.normal(0.0, spec.fe_group_sd);
    RngStream rng_gamma(seed, kGamma);
    lat.gamma.resize(static_cast<size_t>(T));
    for (auto& v : lat.gamma) v = rng_gamma.normal(0.0, spec.fe_time_sd);

    lat.alpha_jt.assign(static_cast<size_t>(N) * T, 0.0);
    for (int j = 0; j < N1; ++j)
        for (int t = t_star; t < T; ++t) lat.alpha_jt[static_cast<size_t>(j) * T + t] = spec.alpha;

    SimResult out;
    out.panel.n_groups = N;
    out.panel.n_periods = T;
    out.panel.treated = lat.assignment;
    out.panel.treat_start.assign(static_cast<size_t>(N), 0);
    for (int j = 0; j < N1; ++j) out.panel.treat_start[j] = t_star;
    out.panel.outcomes.resize(static_cast<size_t>(N) * T);
    out.panel.group_ids.resize(static_cast<size_t>(N));
    out.panel.time_ids.resize(static_cast<size_t>(T));
    for (int j = 0; j < N; ++j) out.panel.group_ids[j] = "g" + std::to_string(j + 1);
    for (int t = 0; t < T; ++t) out.panel.time_ids[t] = std::to_string(t + 1);
    for (int j = 0; j < N; ++j) {
        const int f = lat.block_of_group[j];
        for (int t = 0; t < T; ++t) {
            out.panel.y(j, t) = lat.theta[j] + lat.gamma[t] +
                                lat.lambda[static_cast<size_t>(f) * T + t] +
                                lat.eps[static_cast<size_t>(j) * T + t] +
                                lat.alpha_jt[static_cast<size_t>(j) * T + t];
        }
    }
    out.latents = std::move(lat);
    return out;
}

void FixedPopulation::validate() const {
    require(n_blocks >= 2, "TOO_FEW_BLOCKS", "need at least 2 blocks");
    require(treated_blocks >= 1 && treated_blocks < n_blocks, "TOO_FEW_BLOCKS",
            "treated block count must be in 1..F-1");
    require(n_groups % n_blocks == 0, "DIM_MISMATCH", "blocks must partition groups equally");
    require(t_star >= 1 && t_star <= n_periods - 1, "BAD_TSTAR", "t_star out of range");
    require(y0.size() == static_cast<size_t>(n_groups) * n_periods &&
                y1.size() == y0.size(),
            "DIM_MISMATCH", "potential outcome matrices must be N x T");
    require(static_cast<int>(block_of_group.size()) == n_groups, "DIM_MISMATCH",
            "block map must cover all groups");
}

PanelData simulate_design_based(const FixedPopulation& pop, std::uint64_t seed) {
    pop.validate();
    RngStream rng(seed, kAssign);
    std::vector<int> blocks(static_cast<size_t>(pop.n_blocks));
    std::iota(blocks.begin(), blocks.end(), 0);
    for (int i = 0; i < pop.treated_blocks; ++i) {
        const auto k =
            i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(pop.n_blocks - i)));
        std::swap(blocks[i], blocks[k]);
    }
    std::vector<bool> block_treated(static_cast<size_t>(pop.n_blocks), false);
    for (int i = 0; i < pop.treated_blocks; ++i) block_treated[blocks[i]] = true;

    PanelData p;
    p.n_groups = pop.n_groups;
    p.n_periods = pop.n_periods;
    p.outcomes.resize(static_cast<size_t>(pop.n_groups) * pop.n_periods);
    p.treated.resize(static_cast<size_t>(pop.n_groups));
    p.treat_start.assign(static_cast<size_t>(pop.n_groups), 0);
    p.group_ids.resize(static_cast<size_t>(pop.n_groups));
    p.time_ids.resize(static_cast<size_t>(pop.n_periods));
    for (int t = 0; t < pop.n_periods; ++t) p.time_ids[t] = std::to_string(t + 1);
    for (int j = 0; j < pop.n_groups; ++j) {
        p.group_ids[j] = "g" + std::to_string(j + 1);
        const bool tr = block_treated[pop.block_of_group[j]];
        p.treated[j] = tr;
        if (tr) p.treat_start[j] = pop.t_star;
        for (int t = 0; t < pop.n_periods; ++t) {
            const size_t k = static_cast<size_t>(j) * pop.n_periods + t;
            p.outcomes[k] = (tr && t >= pop.t_star) ? pop.y1[k] : pop.y0[k];
        }
    }
    return p;
}

FixedPopulation make_fixed_population(int blocks, int groups_per_block, int T, int t_star,
                                      const ARSpec& block_shock, double sigma_eps2, double alpha,
                                      std::uint64_t seed) {
    require(blocks >= 2 && groups_per_block >= 1, "TOO_FEW_BLOCKS",
            "need >= 2 blocks and >= 1 group per block");
    FixedPopulation pop;
    pop.n_blocks = blocks;
    pop.treated_blocks = blocks / 2;
    pop.n_groups = blocks * groups_per_block;
    pop.n_periods = T;
    pop.t_star = t_star;
    pop.block_of_group.resize(static_cast<size_t>(pop.n_groups));
    for (int j = 0; j < pop.n_groups; ++j) pop.block_of_group[j] = j / groups_per_block;

    RngStream rng_lambda(seed, kLambda);
    std::vector<double> lambda(static_cast<size_t>(blocks) * T);
    for (int f = 0; f < blocks; ++f) {
        auto path = draw_ar1_path(block_shock, T, rng_lambda);
        std::copy(path.begin(), path.end(), lambda.begin() + static_cast<size_t>(f) * T);
    }
    RngStream rng_eps(seed, kEps);
    std::vector<double> eps(static_cast<size_t>(pop.n_groups) * T);
    for (auto& v : eps) v = rng_eps.normal(0.0, std::sqrt(sigma_eps2));
    RngStream rng_gamma(seed, kGamma);
    std::vector<double> gamma(static_cast<size_t>(T));
    for (auto& v : gamma) v = rng_gamma.normal(0.0, 1.0);

    pop.y0.resize(static_cast<size_t>(pop.n_groups) * T);
    pop.y1.resize(pop.y0.size());
    for (int j = 0; j < pop.n_groups; ++j) {
        const int f = pop.block_of_group[j];
        for (int t = 0; t < T; ++t) {
            const size_t k = static_cast<size_t>(j) * T + t;
            pop.y0[k] = gamma[t] + lambda[static_cast<size_t>(f) * T + t] + eps[k];
            pop.y1[k] = pop.y0[k] + alpha;
        }
    }

    // nabla of the latents with pre = 1..t*, post = t*+1..T
    const double ip = 1.0 / static_cast<double>(T - t_star);
    const double iq = 1.0 / static_cast<double>(t_star);
    pop.nabla_lambda.assign(static_cast<size_t>(blocks), 0.0);
    for (int f = 0; f < blocks; ++f) {
        double post = 0.0, pre = 0.0;
        for (int t = 0; t < t_star; ++t) pre += lambda[static_cast<size_t>(f) * T + t];
        for (int t = t_star; t < T; ++t) post += lambda[static_cast<size_t>(f) * T + t];
        pop.nabla_lambda[f] = post * ip - pre * iq;
    }
    pop.nabla_eps.assign(static_cast<size_t>(pop.n_groups), 0.0);
    for (int j = 0; j < pop.n_groups; ++j) {
        double post = 0.0, pre = 0.0;
        for (int t = 0; t < t_star; ++t) pre += eps[static_cast<size_t>(j) * T + t];
        for (int t = t_star; t < T; ++t) post += eps[static_cast<size_t>(j) * T + t];
        pop.nabla_eps[j] = post * ip - pre * iq;
    }
    return pop;
}

FactorModelSpec preset_twoway_mc_dgp(double rho, int T) {
    require(std::abs(rho) < 1.0, "BAD_RHO", "rho must be in (-1,1)");
    require(T >= 2 && T % 2 == 0, "BAD_T", "preset uses treatment after T/2; T must be even");
    FactorModelSpec spec;
    spec.structure = Structure::ArmLevel;
    spec.n_factors = 2;
    spec.loading_mean_treated = {1.0, 0.0};
    spec.loading_mean_control = {0.0, 1.0};
    spec.loading_cov_treated.assign(4, 0.0);
    spec.loading_cov_control.assign(4, 0.0);
    spec.factor_process = {ARSpec{rho, 1.0, ARSpec::Init::Stationary},
                           ARSpec{rho, 1.0, ARSpec::Init::Stationary}};
    spec.sigma_eps2_treated = 1.0;
    spec.sigma_eps2_control = 1.0;
    spec.assignment = Assignment::FixedFlags;
    spec.fixed_flags.assign(100, false);
    for (int j = 0; j < 50; ++j) spec.fixed_flags[j] = true;
    spec.alpha = 0.0;
    return spec;
}

PanelData rebuild_from_latents(const FactorModelSpec& spec, const Latents& lat, int N, int T,
                               const std::vector<int>& t_star_per_group) {
    PanelData p;
    p.n_groups = N;
    p.n_periods = T;
    p.treated = lat.assignment;
    p.treat_start = t_star_per_group;
    p.outcomes.resize(static_cast<size_t>(N) * T);
    p.group_ids.resize(static_cast<size_t>(N));
    p.time_ids.resize(static_cast<size_t>(T));
    for (int j = 0; j < N; ++j) p.group_ids[j] = "g" + std::to_string(j + 1);
    for (int t = 0; t < T; ++t) p.time_ids[t] = std::to_string(t + 1);
    const bool paired = spec.structure == Structure::Paired;
    const int F = paired ? 0 : spec.n_factors;
    for (int j = 0; j < N; ++j) {
        for (int t = 0; t < T; ++t) {
            const size_t k = static_cast<size_t>(j) * T + t;
            double v = lat.theta[j] + lat.gamma[t] + lat.eps[k] + lat.alpha_jt[k];
            if (paired) {
                v += lat.lambda[static_cast<size_t>(lat.block_of_group[j]) * T + t];
            } else {
                for (int f = 0; f < F; ++f)
                    v += lat.lambda[static_cast<size_t>(f) * T + t] *
                         lat.mu[static_cast<size_t>(j) * F + f];
            }
            p.y(j, t) = v;
        }
    }
    return p;
}

}  // namespace didlab
