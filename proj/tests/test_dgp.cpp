#include "didlab/dgp.hpp"

#include "didlab/common.hpp"
#include "didlab/estimators.hpp"
#include "didlab/montecarlo.hpp"
#include "didlab/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace didlab;

namespace {

FactorModelSpec scalar_spec(double rho, double loading_var, double gap) {
    FactorModelSpec spec;
    spec.n_factors = 1;
    spec.loading_mean_treated = {gap};
    spec.loading_mean_control = {0.0};
    spec.loading_cov_treated = {loading_var};
    spec.loading_cov_control = {loading_var};
    spec.factor_process = {ARSpec{rho, 1.0, ARSpec::Init::Stationary}};
    return spec;
}

}  // namespace

TEST_CASE("draw_ar1_path degenerate process is all zeros") {
    RngStream rng(1);
    const auto x = draw_ar1_path(ARSpec{0.0, 0.0, ARSpec::Init::Stationary}, 50, rng);
    for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("draw_ar1_path long-path moments match the process") {
    RngStream rng(2);
    const int T = 1000000;
    const auto x = draw_ar1_path(ARSpec{0.5, 1.0, ARSpec::Init::Stationary}, T, rng);
    double s = 0, s2 = 0, cross = 0;
    for (int t = 0; t < T; ++t) {
        s += x[t];
        s2 += x[t] * x[t];
        if (t > 0) cross += x[t] * x[t - 1];
    }
    const double mean = s / T;
    const double var = s2 / T - mean * mean;
    const double rho_hat = (cross / (T - 1) - mean * mean) / var;
    CHECK(rho_hat == doctest::Approx(0.5).epsilon(0.02));  // 0.5 +- 0.01

    RngStream rng2(3);
    const auto w = draw_ar1_path(ARSpec{0.0, 1.0, ARSpec::Init::Stationary}, T, rng2);
    double w2 = 0;
    for (double v : w) w2 += v * v;
    CHECK(w2 / T == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("draw_ar1_path rejects stationary init with |rho| >= 1") {
    RngStream rng(4);
    CHECK_THROWS_WITH_AS(draw_ar1_path(ARSpec{1.0, 1.0, ARSpec::Init::Stationary}, 5, rng),
                         doctest::Contains("BAD_RHO"), Error);
}

TEST_CASE("ar1_nabla_variance matches the halves-split closed form") {
    // cross-check of the two independent variance routes
    for (double rho : {0.0, 0.3, 0.7}) {
        for (int T : {2, 4, 10}) {
            std::vector<int> pre, post;
            for (int t = 1; t <= T / 2; ++t) pre.push_back(t);
            for (int t = T / 2 + 1; t <= T; ++t) post.push_back(t);
            const double direct = ar1_nabla_variance(rho, 0.8, pre, post);
            const double closed = 4.0 / (T * T * (1 - rho) * (1 - rho)) *
                                  (T - 2 * rho / (1 - rho * rho) *
                                           (3 - std::pow(rho, T / 2.0)) *
                                           (1 - std::pow(rho, T / 2.0))) *
                                  0.8;
            CHECK(direct == doctest::Approx(closed).epsilon(1e-12));
        }
    }
}

TEST_CASE("simulate_panel with all variances zero is a constant-zero panel") {
    auto spec = scalar_spec(0.0, 0.0, 0.0);
    spec.factor_process[0].sigma_nu2 = 0.0;
    spec.sigma_eps2_treated = 0.0;
    spec.sigma_eps2_control = 0.0;
    const auto sim = simulate_panel(spec, 10, 4, 2, 5);
    for (double v : sim.panel.outcomes) CHECK(v == 0.0);
}

TEST_CASE("simulate_panel iid-noise nabla variance matches the iid formula") {
    FactorModelSpec spec;
    spec.n_factors = 0;
    spec.sigma_eps2_treated = 1.0;
    spec.sigma_eps2_control = 1.0;
    const int N = 5000, T = 4, tstar = 2;
    const auto sim = simulate_panel(spec, N, T, tstar, 6);
    std::vector<int> pre{1, 2}, post{3, 4};
    const auto ny = nabla_means(sim.panel, pre, post);
    double s = 0, s2 = 0;
    for (double v : ny) {
        s += v;
        s2 += v * v;
    }
    const double m = s / N;
    const double var = (s2 - N * m * m) / (N - 1);
    const double expect = 1.0 / 2 + 1.0 / 2;  // (1/|post| + 1/|pre|) sigma2
    const double mc_se = expect * std::sqrt(2.0 / (N - 1));
    CHECK(std::abs(var - expect) < 3 * mc_se);
}

TEST_CASE("arm-level structure with zero noise gives identical series within arms") {
    auto spec = preset_twoway_mc_dgp(0.4, 10);
    spec.sigma_eps2_treated = 0.0;
    spec.sigma_eps2_control = 0.0;
    const auto sim = simulate_panel(spec, 100, 10, 5, 7);
    for (int j = 1; j < 50; ++j)
        for (int t = 0; t < 10; ++t) CHECK(sim.panel.y(j, t) == sim.panel.y(0, t));
    for (int j = 51; j < 100; ++j)
        for (int t = 0; t < 10; ++t) CHECK(sim.panel.y(j, t) == sim.panel.y(50, t));
}

TEST_CASE("simulate_paired_panel reduces to iid noise with zero pair shocks") {
    FactorModelSpec spec;
    spec.structure = Structure::Paired;
    spec.paired_sigma_lambda2 = 0.0;
    spec.paired_sigma_delta2 = 0.0;
    const auto sim = simulate_paired_panel(spec, 4, 4, 3, 1, 8);
    CHECK(sim.panel.n_groups == 8);
    // with zero eps too, everything collapses
    FactorModelSpec z = spec;
    z.sigma_eps2_treated = 0.0;
    z.sigma_eps2_control = 0.0;
    const auto zs = simulate_paired_panel(z, 4, 4, 3, 1, 8);
    for (double v : zs.panel.outcomes) CHECK(v == 0.0);
}

TEST_CASE("simulate_paired_panel pairs share their series when noise is zero") {
    FactorModelSpec spec;
    spec.structure = Structure::Paired;
    spec.paired_sigma_lambda2 = 1.0;
    spec.paired_sigma_delta2 = 0.7;
    spec.sigma_eps2_treated = 0.0;
    spec.sigma_eps2_control = 0.0;
    const auto sim = simulate_paired_panel(spec, 6, 4, 4, 2, 9);
    for (int pair = 0; pair < 5; ++pair) {
        for (int t = 0; t < 4; ++t)
            CHECK(sim.panel.y(2 * pair, t) == sim.panel.y(2 * pair + 1, t));
    }
}

TEST_CASE("simulate_paired_panel rejects odd arms") {
    FactorModelSpec spec;
    spec.structure = Structure::Paired;
    CHECK_THROWS_WITH_AS(simulate_paired_panel(spec, 3, 4, 3, 1, 1),
                         doctest::Contains("ODD_ARM"), Error);
}

TEST_CASE("paired-model variance of alpha-hat matches the block formula") {
    // var(alpha) = (2/N1) var(nabla lam) + (2/N0) var(nabla del)
    //            + (1/N1) var(nabla eps 1) + (1/N0) var(nabla eps 0)
    FactorModelSpec spec;
    spec.structure = Structure::Paired;
    spec.paired_sigma_lambda2 = 0.6;
    spec.paired_sigma_delta2 = 0.3;
    spec.sigma_eps2_treated = 1.0;
    spec.sigma_eps2_control = 0.5;
    const int N1 = 1000, N0 = 1000;
    const long R = 2000;
    std::vector<double> alphas(R);
    mc::parallel_for(R, 0, [&](long r) {
        const auto sim = simulate_paired_panel(spec, N1, N0, 2, 1, derive_seed(10, r));
        alphas[r] = twfe(sim.panel).alpha_hat;
    });
    double s = 0, s2 = 0;
    for (double a : alphas) {
        s += a;
        s2 += a * a;
    }
    const double m = s / R;
    const double var = (s2 - R * m * m) / (R - 1);
    const double sl = 2 * 0.6, sd = 2 * 0.3;     // nabla over one pre/one post
    const double se1 = 2 * 1.0, se0 = 2 * 0.5;
    const double expect = 2.0 / N1 * sl + 2.0 / N0 * sd + se1 / N1 + se0 / N0;
    const double mc_se = expect * std::sqrt(2.0 / (R - 1));
    CHECK(std::abs(var - expect) < 3 * mc_se);
}

TEST_CASE("simulate_design_based treats each block half the time") {
    FixedPopulation pop = make_fixed_population(2, 3, 2, 1, ARSpec{0.0, 1.0}, 1.0, 0.0, 11);
    pop.treated_blocks = 1;
    long first_treated = 0;
    const long R = 100000;
    for (long r = 0; r < R; ++r) {
        const auto p = simulate_design_based(pop, derive_seed(12, r));
        if (p.treated[0]) ++first_treated;
    }
    CHECK(std::abs(static_cast<double>(first_treated) / R - 0.5) < 0.01);
}

TEST_CASE("design-based draws with equal potential outcomes give alpha-hat = 0") {
    FixedPopulation pop = make_fixed_population(4, 2, 4, 2, ARSpec{0.3, 1.0}, 1.0, 0.0, 13);
    // zero effect: y1 == y0 already (alpha = 0); all draws centered at zero
    const long R = 4000;
    double s = 0;
    for (long r = 0; r < R; ++r) {
        const auto p = simulate_design_based(pop, derive_seed(14, r));
        s += twfe(p).alpha_hat;
    }
    CHECK(std::abs(s / R) < 0.05);

    // identical potential outcomes across all groups: exact zero every draw
    FixedPopulation flat = pop;
    for (int j = 0; j < flat.n_groups; ++j)
        for (int t = 0; t < flat.n_periods; ++t) {
            flat.y0[static_cast<size_t>(j) * flat.n_periods + t] = t;  // same series
            flat.y1 [static_cast<size_t>(j) * flat.n_periods + t] = t;
        }
    for (long r = 0; r < 50; ++r) {
        const auto p = simulate_design_based(flat, derive_seed(15, r));
        CHECK(twfe(p).alpha_hat == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("preset_twoway_mc_dgp matches its stated design") {
    const auto s0 = preset_twoway_mc_dgp(0.0, 10);
    CHECK(s0.factor_process[0].rho == 0.0);
    CHECK(s0.factor_process[0].sigma_nu2 == 1.0);
    CHECK(s0.fixed_flags.size() == 100);
    int n1 = 0;
    for (bool b : s0.fixed_flags) n1 += b;
    CHECK(n1 == 50);

    const auto s4 = preset_twoway_mc_dgp(0.4, 10);
    const auto sim = simulate_panel(s4, 100, 10, 10 / 2, 16);
    CHECK(*sim.panel.uniform_tstar() == 5);
    CHECK_THROWS_AS(preset_twoway_mc_dgp(1.2, 10), Error);
}

TEST_CASE("unbiasedness under the parallel-trends condition") {
    auto spec = scalar_spec(0.5, 0.4, 1.0);  // E[nabla lambda] = 0 by stationarity
    spec.alpha = 0.7;
    spec.alpha_sd = 0.2;
    const int N = 60, T = 4;
    const long R = 10000;
    std::vector<double> alphas(R);
    mc::parallel_for(R, 0, [&](long r) {
        const auto sim = simulate_panel(spec, N, T, 2, derive_seed(17, r));
        alphas[r] = twfe(sim.panel).alpha_hat;
    });
    double s = 0, s2 = 0;
    for (double a : alphas) {
        s += a;
        s2 += a * a;
    }
    const double m = s / R;
    const double sd = std::sqrt((s2 - R * m * m) / (R - 1));
    CHECK(std::abs(m - 0.7) < 4 * sd / std::sqrt(static_cast<double>(R)));
}

TEST_CASE("identical (spec, seed) reproduce bit-identical panels") {
    const auto spec = scalar_spec(0.3, 0.5, 1.0);
    const auto a = simulate_panel(spec, 40, 6, 3, 987654321);
    const auto b = simulate_panel(spec, 40, 6, 3, 987654321);
    CHECK(a.panel.outcomes == b.panel.outcomes);
    CHECK(a.latents.assignment == b.latents.assignment);
}

TEST_CASE("fixed effects are absorbed: alpha-hat invariant to fe scales") {
    auto spec = scalar_spec(0.3, 0.5, 1.0);
    spec.alpha = 0.4;
    auto loud = spec;
    loud.fe_group_sd = 5.0;
    loud.fe_time_sd = 3.0;
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        const auto a = simulate_panel(spec, 30, 5, 2, seed);
        const auto b = simulate_panel(loud, 30, 5, 2, seed);
        CHECK(twfe(a.panel).alpha_hat ==
              doctest::Approx(twfe(b.panel).alpha_hat).epsilon(1e-10));
    }
}

TEST_CASE("latent returns reproduce the panel") {
    auto spec = scalar_spec(0.4, 0.6, 0.8);
    spec.alpha = 0.3;
    spec.alpha_sd = 0.1;
    spec.fe_group_sd = 1.0;
    spec.fe_time_sd = 0.5;
    const auto sim = simulate_panel(spec, 25, 5, 3, 31);
    const auto rebuilt = rebuild_from_latents(spec, sim.latents, 25, 5, sim.panel.treat_start);
    for (size_t i = 0; i < sim.panel.outcomes.size(); ++i)
        CHECK(rebuilt.outcomes[i] == doctest::Approx(sim.panel.outcomes[i]).epsilon(1e-12));

    FactorModelSpec pspec;
    pspec.structure = Structure::Paired;
    pspec.paired_sigma_lambda2 = 0.5;
    pspec.paired_sigma_delta2 = 0.25;
    const auto psim = simulate_paired_panel(pspec, 6, 4, 4, 2, 32);
    const auto prebuilt =
        rebuild_from_latents(pspec, psim.latents, 10, 4, psim.panel.treat_start);
    for (size_t i = 0; i < psim.panel.outcomes.size(); ++i)
        CHECK(prebuilt.outcomes[i] == doctest::Approx(psim.panel.outcomes[i]).epsilon(1e-12));
}

TEST_CASE("bernoulli assignment never produces a degenerate panel") {
    auto spec = scalar_spec(0.0, 0.0, 0.0);
    spec.bernoulli_c = 0.02;  // degenerate draws likely at N=10, forcing redraws
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto sim = simulate_panel(spec, 10, 2, 1, seed);
        CHECK(sim.panel.n_treated() >= 1);
        CHECK(sim.panel.n_control() >= 1);
    }
}
