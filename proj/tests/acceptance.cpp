// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exit code = number of failed criteria.

#include "didlab/analytics.hpp"
#include "didlab/dgp.hpp"
#include "didlab/estimators.hpp"
#include "didlab/montecarlo.hpp"
#include "didlab/serialize.hpp"
#include "didlab/stats.hpp"
#include "didlab/variance.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace didlab;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& what, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

const mc::TwowayRow& cell(const std::vector<mc::TwowayRow>& rows, double rho, int T) {
    for (const auto& r : rows)
        if (r.rho == rho && r.T == T) return r;
    std::abort();
}

// ---------------------------------------------------------------------------

void criteria_1_2_table_a1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = mc::run_twoway_mc({0.0, 0.1, 0.4}, {2, 10, 100}, 5000, 42, 0.05, 0);
    const double secs = elapsed_s(t0);

    const double cgm_0_100 = cell(rows, 0.0, 100).rej_cgm;
    const double cgm_0_10 = cell(rows, 0.0, 10).rej_cgm;
    const bool c1 = std::abs(cgm_0_100 - 0.050) <= 0.02 && std::abs(cgm_0_10 - 0.119) <= 0.03 &&
                    secs < 300.0;
    report(1, "table-a1 preset: two-way-cluster scale-insensitive cells",
           c1,
           "CGM(rho=0,T=100)=" + fmt(cgm_0_100) + " (target 0.050±0.02), CGM(rho=0,T=10)=" +
               fmt(cgm_0_10) + " (target 0.119±0.03), runtime " + fmt(secs) + "s");

    bool band = true;
    std::string worst;
    for (double rho : {0.0, 0.1, 0.4}) {
        const auto& r = cell(rows, rho, 2);
        if (r.rej_nocluster < 0.70 || r.rej_cluster < 0.70) band = false;
        worst += " (rho=" + fmt(rho) + ": " + fmt(r.rej_nocluster) + "/" + fmt(r.rej_cluster) +
                 ")";
    }
    const double g0 = cell(rows, 0.0, 100).rej_cgm;
    const double g1 = cell(rows, 0.1, 100).rej_cgm;
    const double g4 = cell(rows, 0.4, 100).rej_cgm;
    const bool mono = g0 < g1 && g1 < g4;
    const bool rho4 = std::abs(g4 - 0.226) <= 0.07;
    report(2, "table-a1 preset: scale-sensitive pattern", band && mono && rho4,
           "T=2 no-cluster/cluster >= 0.70:" + worst + "; CGM at T=100 rho {0,0.1,0.4} = " +
               fmt(g0) + "," + fmt(g1) + "," + fmt(g4) + " (monotone, last in 0.226±0.07)");
}

void criteria_3_4_table_a2() {
    auto t0 = std::chrono::steady_clock::now();
    const auto panel_a = mc::run_pretest_mc({3, 6, 10}, {}, {}, 5000, 42, 0.05, 0);
    const double secs_a = elapsed_s(t0);

    const double pass_target[3] = {0.948, 0.831, 0.729};
    const double cond_target[3] = {0.043, 0.031, 0.022};
    bool ok = secs_a < 120.0;
    std::string detail;
    for (int i = 0; i < 3; ++i) {
        const auto& r = panel_a[i];
        if (std::abs(r.pass_rate - pass_target[i]) > 0.02) ok = false;
        if (!r.cond_reject || std::abs(*r.cond_reject - cond_target[i]) > 0.015) ok = false;
        detail += " T=" + std::to_string(r.T) + ": " + fmt(r.pass_rate) + "/" +
                  fmt(r.cond_reject ? *r.cond_reject : -1.0);
    }
    report(3, "table-a2 preset: no-factor panel reproduction", ok,
           detail + "; runtime " + fmt(secs_a) + "s");

    t0 = std::chrono::steady_clock::now();
    const auto rows =
        mc::run_pretest_mc({3, 6, 10}, {0.08, 0.17, 0.46}, {0.0, 0.5, 0.9}, 5000, 42, 0.05, 0);
    const double secs = elapsed_s(t0);

    struct Cell {
        const char* panel;
        int T;
        double rho;
        double pass;
        bool omitted;
    };
    const Cell reference[] = {
        {"B", 3, 0.0, 0.917, false},  {"B", 6, 0.0, 0.761, false},  {"B", 10, 0.0, 0.629, false},
        {"B", 3, 0.5, 0.915, false},  {"B", 6, 0.5, 0.729, false},  {"B", 10, 0.5, 0.568, false},
        {"B", 3, 0.9, 0.914, false},  {"B", 6, 0.9, 0.673, false},  {"B", 10, 0.9, 0.446, false},
        {"C", 3, 0.0, 0.828, false},  {"C", 6, 0.0, 0.539, false},  {"C", 10, 0.0, 0.353, false},
        {"C", 3, 0.5, 0.830, false},  {"C", 6, 0.5, 0.470, false},  {"C", 10, 0.5, 0.249, false},
        {"C", 3, 0.9, 0.829, false},  {"C", 6, 0.9, 0.407, false},  {"C", 10, 0.9, 0.155, false},
        {"D", 3, 0.0, 0.534, false},  {"D", 6, 0.0, 0.122, false},  {"D", 10, 0.0, 0.025, true},
        {"D", 3, 0.5, 0.536, false},  {"D", 6, 0.5, 0.087, false},  {"D", 10, 0.5, 0.009, true},
        {"D", 3, 0.9, 0.533, false},  {"D", 6, 0.9, 0.072, false},  {"D", 10, 0.9, 0.003, true},
    };
    bool ok4 = secs < 900.0;
    double worst = 0.0;
    std::string worst_cell = "-";
    int mismatched_omission = 0;
    for (const auto& c : reference) {
        const mc::PretestRow* row = nullptr;
        for (const auto& r : rows) {
            if (r.panel == c.panel && r.T == c.T && r.rho == c.rho) row = &r;
        }
        if (!row) {
            ok4 = false;
            continue;
        }
        const double d = std::abs(row->pass_rate - c.pass);
        if (d > worst) {
            worst = d;
            worst_cell = std::string(c.panel) + "/T" + std::to_string(c.T) + "/rho" + fmt(c.rho);
        }
        if (d > 0.04) ok4 = false;
        if (c.omitted != !row->cond_reject.has_value()) {
            ok4 = false;
            ++mismatched_omission;
        }
    }
    report(4, "table-a2 preset: calibrated panel grid", ok4,
           "worst |pass - reference| = " + fmt(worst) + " at " + worst_cell +
               " (tol 0.04); omission mismatches = " + std::to_string(mismatched_omission) +
               "; runtime " + fmt(secs) + "s");
}

void criterion_5_nabla() {
    bool ok = true;
    double worst_z = 0.0;
    for (double rho : {0.0, 0.3, 0.6, 0.9}) {
        // curve normalization first: exactly 1 at T = 2
        const double norm = analytics::nabla_second_moment(rho, 2, (1.0 + rho) / 2.0);
        if (std::abs(norm - 1.0) > 1e-12) ok = false;
        for (int T : {2, 4, 10, 20, 50}) {
            const long R = 1000000;
            const double s2 = 0.9;
            std::vector<double> vals(R);
            const ARSpec spec{rho, s2, ARSpec::Init::Stationary};
            mc::parallel_for(R, 0, [&](long r) {
                RngStream rng(derive_seed(4242, static_cast<std::uint64_t>(T * 10 + rho * 10)),
                              static_cast<std::uint64_t>(r));
                const auto x = draw_ar1_path(spec, T, rng);
                double pre = 0, post = 0;
                for (int t = 0; t < T / 2; ++t) pre += x[t];
                for (int t = T / 2; t < T; ++t) post += x[t];
                const double nx = post / (T / 2) - pre / (T / 2);
                vals[r] = nx * nx;
            });
            double s = 0, sq = 0;
            for (double v : vals) {
                s += v;
                sq += v * v;
            }
            const double m = s / R;
            const double se = std::sqrt((sq / R - m * m) / R);
            const double z = std::abs(m - analytics::nabla_second_moment(rho, T, s2)) / se;
            worst_z = std::max(worst_z, z);
            if (z > 3.0) ok = false;
        }
    }
    report(5, "closed-form E[(nabla X)^2] vs million-path oracle", ok,
           "worst |z| over the 4x5 grid = " + fmt(worst_z) + " (limit 3); T=2 normalization exact");
}

void criterion_6_prop1() {
    FactorModelSpec spec;
    spec.n_factors = 1;
    spec.loading_mean_treated = {1.0};
    spec.loading_mean_control = {0.0};
    spec.loading_cov_treated = {0.3};
    spec.loading_cov_control = {0.3};
    spec.factor_process = {ARSpec{0.5, 1.0, ARSpec::Init::Stationary}};
    spec.bernoulli_c = 0.5;

    auto mean_crve_and_var = [&](int N, long R, std::uint64_t seed, double* var_out) {
        std::vector<double> alphas(R), vh(R);
        mc::parallel_for(R, 0, [&](long r) {
            const auto sim = simulate_panel(spec, N, 4, 2, derive_seed(seed, r));
            const auto est = twfe(sim.panel);
            alphas[r] = est.alpha_hat;
            vh[r] = crve_group(est, false).value;
        });
        double sa = 0, sa2 = 0, sv = 0;
        for (long r = 0; r < R; ++r) {
            sa += alphas[r];
            sa2 += alphas[r] * alphas[r];
            sv += vh[r];
        }
        const double m = sa / R;
        if (var_out) *var_out = (sa2 - R * m * m) / (R - 1);
        return sv / R;
    };

    double var_a = 0.0;
    const double crve_2000 = mean_crve_and_var(2000, 5000, 601, &var_a);
    std::vector<int> pre{1, 2}, post{3, 4};
    analytics::GapInputs g;
    g.mu_gap = {1.0};
    g.second_moment = {ar1_nabla_variance(0.5, 1.0, pre, post)};
    const double gap = analytics::crve_variance_gap(g);
    const double rel = (var_a - crve_2000 - gap) / gap;

    const double crve_200 = mean_crve_and_var(200, 5000, 602, nullptr);
    const double shrink = crve_200 / crve_2000;
    const bool ok = std::abs(rel) <= 0.10 && std::abs(shrink - 10.0) <= 3.0;
    report(6, "CRVE variance gap vs closed form", ok,
           "var(a)-mean(CRVE) = " + fmt(var_a - crve_2000) + " vs gap " + fmt(gap) +
               " (rel " + fmt(rel) + ", tol 10%); CRVE shrink N=200->2000: " + fmt(shrink) +
               "x (target ~10x ±30%)");
}

void criterion_7_t_variances() {
    // two local-to-zero-drift parameterizations
    struct Corr {
        double omega;
        double c;
        double eps1, eps0;
    };
    const Corr params[] = {{0.8, 0.5, 1.0, 1.0}, {1.6, 0.3, 1.5, 0.8}};
    bool ok = true;
    std::string detail;
    int idx = 0;
    for (const auto& prm : params) {
        const int N = 4000;
        const long R = 10000;
        FactorModelSpec spec;
        spec.n_factors = 1;
        spec.loading_mean_treated = {1.0};
        spec.loading_mean_control = {0.0};
        spec.loading_cov_treated = {0.0};
        spec.loading_cov_control = {0.0};
        spec.factor_process = {
            ARSpec{0.0, prm.omega / (2.0 * N), ARSpec::Init::Stationary}};
        spec.sigma_eps2_treated = prm.eps1;
        spec.sigma_eps2_control = prm.eps0;
        spec.bernoulli_c = prm.c;
        std::vector<double> ts(R);
        mc::parallel_for(R, 0, [&](long r) {
            const auto sim = simulate_panel(spec, N, 2, 1, derive_seed(700 + idx, r));
            const auto est = twfe(sim.panel);
            ts[r] = est.alpha_hat / std::sqrt(crve_group(est, false).value);
        });
        double s = 0, s2 = 0;
        for (double t : ts) {
            s += t;
            s2 += t * t;
        }
        const double tv = (s2 - R * (s / R) * (s / R)) / (R - 1);
        analytics::GapInputs g;
        g.mu_gap = {1.0};
        g.second_moment = {prm.omega};
        g.sigma_eps2_treated = 2.0 * prm.eps1;
        g.sigma_eps2_control = 2.0 * prm.eps0;
        g.treated_share = prm.c;
        const double pred = analytics::local_drift_t_variance(g, {prm.omega});
        if (std::abs(tv / pred - 1.0) > 0.05) ok = false;
        detail += " drift[" + std::to_string(idx) + "]: " + fmt(tv) + "/" + fmt(pred);
        ++idx;
    }

    // two paired-block parameterizations
    struct Paired {
        double sl_pp, sd_pp;  // per-period pair-shock variances
        double eps1, eps0;
        int N1, N0;
    };
    const Paired pp[] = {{0.5, 0.25, 1.0, 1.0, 2000, 2000}, {0.9, 0.1, 1.5, 0.7, 1200, 2800}};
    for (const auto& prm : pp) {
        const long R = 10000;
        FactorModelSpec spec;
        spec.structure = Structure::Paired;
        spec.paired_sigma_lambda2 = prm.sl_pp;
        spec.paired_sigma_delta2 = prm.sd_pp;
        spec.sigma_eps2_treated = prm.eps1;
        spec.sigma_eps2_control = prm.eps0;
        std::vector<double> ts(R);
        mc::parallel_for(R, 0, [&](long r) {
            const auto sim =
                simulate_paired_panel(spec, prm.N1, prm.N0, 2, 1, derive_seed(710 + idx, r));
            const auto est = twfe(sim.panel);
            ts[r] = est.alpha_hat / std::sqrt(crve_group(est, false).value);
        });
        double s = 0, s2 = 0;
        for (double t : ts) {
            s += t;
            s2 += t * t;
        }
        const double tv = (s2 - R * (s / R) * (s / R)) / (R - 1);
        const double c = static_cast<double>(prm.N1) / (prm.N1 + prm.N0);
        const double pred = analytics::paired_model_t_variance(2 * prm.sl_pp, 2 * prm.sd_pp,
                                                         2 * prm.eps1, 2 * prm.eps0, c);
        if (std::abs(tv / pred - 1.0) > 0.05) ok = false;
        detail += " paired[" + std::to_string(idx - 2) + "]: " + fmt(tv) + "/" + fmt(pred);
        ++idx;
    }
    report(7, "t-variance limits, drift and paired models (5% rel)", ok, detail);
}

void criterion_8_design() {
    bool identity_ok = true;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RngStream rng(800 + seed);
        const int F = 2 * (2 + static_cast<int>(rng.uniform_below(5)));
        const int per = 1 + static_cast<int>(rng.uniform_below(4));
        const auto pop = make_fixed_population(F, per, 6, 3,
                                               ARSpec{0.4, 1.0, ARSpec::Init::Stationary}, 0.7,
                                               0.0, 900 + seed);
        const auto d = analytics::design_variances(pop);
        const double diff = std::abs(d.v_corr - d.v_uncorr - d.four_term_gap);
        worst = std::max(worst, diff);
        if (diff > 1e-10) identity_ok = false;
    }

    // V_corr vs the design-based Monte Carlo at large F
    const auto pop = make_fixed_population(500, 3, 6, 3,
                                           ARSpec{0.5, 1.0, ARSpec::Init::Stationary}, 1.0,
                                           0.0, 808);
    const auto d = analytics::design_variances(pop);
    // block means of nabla-Y reduce each assignment draw to O(F)
    std::vector<int> pre{1, 2, 3}, post{4, 5, 6};
    PanelData base;
    base.n_groups = pop.n_groups;
    base.n_periods = pop.n_periods;
    base.outcomes = pop.y0;
    base.treated.assign(pop.n_groups, false);
    base.treat_start.assign(pop.n_groups, 0);
    for (int j = 0; j < pop.n_groups; ++j) base.group_ids.push_back("g");
    for (int t = 0; t < pop.n_periods; ++t) base.time_ids.push_back("t");
    const auto ny = nabla_means(base, pre, post);
    const int F = pop.n_blocks;
    std::vector<double> bmean(F, 0.0);
    for (int j = 0; j < pop.n_groups; ++j) bmean[pop.block_of_group[j]] += ny[j];
    for (auto& v : bmean) v /= (pop.n_groups / F);

    const long R = 100000;
    std::vector<double> draws(R);
    mc::parallel_for(R, 0, [&](long r) {
        RngStream rng(809, static_cast<std::uint64_t>(r));
        // choose F/2 treated blocks by partial shuffle
        static thread_local std::vector<int> blocks;
        blocks.resize(F);
        for (int i = 0; i < F; ++i) blocks[i] = i;
        double t_sum = 0;
        for (int i = 0; i < F / 2; ++i) {
            const auto k = i + static_cast<int>(rng.uniform_below(
                                   static_cast<std::uint64_t>(F - i)));
            std::swap(blocks[i], blocks[k]);
            t_sum += bmean[blocks[i]];
        }
        double all = 0;
        for (int f = 0; f < F; ++f) all += bmean[f];
        const double t_m = t_sum / (F / 2);
        const double c_m = (all - t_sum) / (F - F / 2);
        draws[r] = t_m - c_m;
    });
    double s = 0, s2 = 0;
    for (double v : draws) {
        s += v;
        s2 += v * v;
    }
    const double m = s / R;
    const double mc_var = (s2 - R * m * m) / (R - 1);
    const double se = mc_var * std::sqrt(2.0 / (R - 1));
    const bool mc_ok = std::abs(mc_var - d.v_corr) < 3 * se;
    report(8, "design-based identity and V_corr vs MC", identity_ok && mc_ok,
           "worst identity residual " + fmt(worst) + " (tol 1e-10); MC var " + fmt(mc_var) +
               " vs V_corr " + fmt(d.v_corr) + " (3 MC-SE = " + fmt(3 * se) + ")");
}

void criterion_9_staggered() {
    mc::StaggeredConfig cfg;
    const auto rows = mc::run_staggered_comparison(cfg, 4000, 99, 0);
    double unit[3] = {0, 0, 0}, clus[3] = {0, 0, 0};
    for (const auto& r : rows) {
        const int e = r.estimator == "twfe" ? 0 : r.estimator == "switcher" ? 1 : 2;
        (r.scheme == "unit_random" ? unit : clus)[e] = r.reject_rate;
    }
    bool ok = true;
    for (int e = 0; e < 3; ++e)
        if (std::abs(unit[e] - 0.05) > 0.02) ok = false;
    if (!(clus[1] + 0.02 <= clus[2] && clus[2] + 0.02 <= clus[0])) ok = false;
    report(9, "staggered ordering switcher < longdiff < twfe", ok,
           "cluster-level: " + fmt(clus[1]) + " < " + fmt(clus[2]) + " < " + fmt(clus[0]) +
               " (gaps >= 0.02); unit-level: " + fmt(unit[0]) + "/" + fmt(unit[1]) + "/" +
               fmt(unit[2]) + " (0.05±0.02)");
}

void criterion_10_oracles() {
    RngStream rng(1000);
    double worst_alpha = 0.0, worst_var = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const auto p = oracles::random_panel(rng);
        const auto fit = oracles::brute_force_twfe(p);
        const auto e = twfe(p);
        worst_alpha = std::max(worst_alpha, std::abs(e.alpha_hat - fit.alpha));

        std::vector<int> pre, post;
        const int ts = *p.uniform_tstar();
        for (int t = 1; t <= ts; ++t) pre.push_back(t);
        for (int t = ts + 1; t <= p.n_periods; ++t) post.push_back(t);
        const auto ny = nabla_means(p, pre, post);
        const double oracle = oracles::collapsed_cluster_sandwich(ny, {p.treated.begin(),
                                                                       p.treated.end()});
        const double g = p.n_groups;
        worst_var = std::max(
            worst_var, std::abs(crve_group(e).value - oracle * g / (g - 1.0)));
    }
    const bool ok = worst_alpha <= 1e-10 && worst_var <= 1e-10;
    report(10, "oracle equivalences on 200 random panels", ok,
           "max |twfe - OLS| = " + fmt(worst_alpha) + ", max |crve - sandwich| = " +
               fmt(worst_var) + " (tol 1e-10)");
}

void criterion_11_pretest_normal() {
    bool ok = true;
    std::string detail;
    const double alpha = 0.5;
    for (double inflation : {0.0, 0.2534, 6.04}) {
        for (double lvl : {0.01, 0.05, 0.10}) {
            const auto rep = mc::run_pretest_normal_model(1.0, 1.0, 0.5, inflation, 400000,
                                                          1100, alpha, lvl, 0);
            if (std::abs(rep.cond_mean - alpha) > 3 * rep.mean_se) ok = false;
            const double var_se = rep.uncond_var * std::sqrt(2.0 / rep.passed);
            if (rep.cond_var > rep.uncond_var + 3 * var_se) ok = false;
        }
    }
    report(11, "joint-normal pre-test: conditional unbiasedness and variance", ok,
           "3x3 grid of (inflation, pre-test level), 4e5 reps per cell");
}

void criterion_12_determinism() {
    bool ok = true;
    std::string detail;
    const auto check = [&](const std::string& name, const std::string& a,
                           const std::string& b, const std::string& c) {
        if (a != b || b != c) {
            ok = false;
            detail += " " + name + " differs;";
        }
    };
    {
        std::string out[3];
        int i = 0;
        for (int w : {1, 4, 8})
            out[i++] = io::twoway_csv(mc::run_twoway_mc({0.0, 0.4}, {2, 10}, 400, 7, 0.05, w));
        check("table-a1", out[0], out[1], out[2]);
    }
    {
        std::string out[3];
        int i = 0;
        for (int w : {1, 4, 8})
            out[i++] = io::pretest_csv(
                mc::run_pretest_mc({3, 6}, {0.17}, {0.5}, 400, 7, 0.05, w));
        check("table-a2", out[0], out[1], out[2]);
    }
    {
        std::string out[3];
        int i = 0;
        for (int w : {1, 4, 8}) {
            mc::StaggeredConfig cfg;
            out[i++] = io::staggered_csv(mc::run_staggered_comparison(cfg, 400, 7, w));
        }
        check("staggered-comparison", out[0], out[1], out[2]);
    }
    {
        std::string out[3];
        int i = 0;
        for (int w : {1, 4, 8}) {
            mc::ConditionalLambdaConfig cfg;
            cfg.n_groups = 400;
            out[i++] = io::to_json(mc::run_conditional_lambda_mc(cfg, 20, 50, 7, w)).dump();
        }
        check("conditional-lambda", out[0], out[1], out[2]);
    }
    {
        // fig-a1 is deterministic arithmetic; synthetic-acs-placebo runs
        // through run_placebo, exercised here directly
        std::string out[3];
        int i = 0;
        for (int w : {1, 4, 8}) {
            RngStream rng(7, 1);
            PanelData p;
            const int S = 6, m = 25, T = 6;
            p.n_groups = S * m;
            p.n_periods = T;
            p.outcomes.resize(static_cast<size_t>(S) * m * T);
            p.treated.assign(S * m, false);
            p.treat_start.assign(S * m, 0);
            std::vector<std::string> cl(S * m);
            for (int t = 0; t < T; ++t) p.time_ids.push_back(std::to_string(t + 1));
            for (int j = 0; j < S * m; ++j) {
                p.group_ids.push_back("g" + std::to_string(j));
                cl[j] = "s" + std::to_string(j / m);
            }
            for (auto& y : p.outcomes) y = rng.normal();
            placebo::PlaceboPlan plan;
            plan.panel = p;
            plan.cluster_of_group = cl;
            plan.deltas = {1, 2};
            plan.scheme = placebo::Scheme::UnitRandom;
            plan.reps_per_cell = 2;
            plan.seed = 7;
            out[i++] = io::placebo_curve_csv(placebo::run_placebo(plan, w));
        }
        check("synthetic-acs-placebo", out[0], out[1], out[2]);
    }
    report(12, "bit-identical reports across worker counts {1,4,8}", ok,
           ok ? "all presets byte-identical" : detail);
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    std::printf("didlab acceptance suite\n");
    criteria_1_2_table_a1();
    criteria_3_4_table_a2();
    criterion_5_nabla();
    criterion_6_prop1();
    criterion_7_t_variances();
    criterion_8_design();
    criterion_9_staggered();
    criterion_10_oracles();
    criterion_11_pretest_normal();
    criterion_12_determinism();
    std::printf("%d criteria failed; total runtime %.1fs\n", g_failures, elapsed_s(t0));
    return g_failures;
}
