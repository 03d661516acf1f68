#include "cli_app.hpp"

#include "didlab/analytics.hpp"
#include "didlab/common.hpp"
#include "didlab/dgp.hpp"
#include "didlab/estimators.hpp"
#include "didlab/montecarlo.hpp"
#include "didlab/panel.hpp"
#include "didlab/placebo.hpp"
#include "didlab/serialize.hpp"
#include "didlab/variance.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>

namespace didlab::cli {

namespace {

using io::json;

// ---------------------------------------------------------------------------
// Every subcommand reduces to (name, resolved json config) and runs through
// execute(); the manifest records the pair, and --from-manifest replays it
// through the same path, so reruns are bit-identical.
// ---------------------------------------------------------------------------

struct RunOutputs {
    std::vector<std::string> files;
    json summary;
};

PanelData load_group_panel(const std::string& path, std::vector<std::string>* cluster,
                           std::vector<std::string>* cohort) {
    auto loaded = load_panel_csv(path);
    if (loaded.micro) return aggregate_micro(*loaded.micro);
    if (cluster) *cluster = loaded.cluster_of_group;
    if (cohort) *cohort = loaded.cohort_of_group;
    return *loaded.panel;
}

void emit_report(const json& cfg, const std::string& out, const json& as_json,
                 const std::string& as_csv, RunOutputs& ro) {
    const std::string format = cfg.value("format", "csv");
    if (format == "json") {
        io::write_json(out, as_json);
    } else if (format == "csv") {
        io::write_text(out, as_csv);
    } else {
        fail("BAD_FORMAT", "unknown --format `" + format + "`", ErrorClass::Usage);
    }
    ro.files.push_back(out);
}

std::string strip_extension(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

// ------------------------------- simulate ---------------------------------

RunOutputs execute_simulate(const json& cfg) {
    FactorModelSpec spec;
    if (cfg.contains("spec")) spec = io::spec_from_json(cfg.at("spec"));
    const int N = cfg.value("n_groups", 100);
    const int T = cfg.value("n_periods", 4);
    const int tstar = cfg.value("t_star", T / 2);
    const auto seed = cfg.value("seed", static_cast<std::uint64_t>(1));
    const std::string out = cfg.at("out").get<std::string>();

    const auto sim = simulate_panel(spec, N, T, tstar, seed);
    write_panel_csv(sim.panel, out);
    RunOutputs ro;
    ro.files.push_back(out);
    ro.summary = {{"n_groups", sim.panel.n_groups},
                  {"n_periods", sim.panel.n_periods},
                  {"n_treated", sim.panel.n_treated()},
                  {"out", out}};
    return ro;
}

// ------------------------------- estimate ---------------------------------

RunOutputs execute_estimate(const json& cfg) {
    const std::string data = cfg.at("data").get<std::string>();
    const auto ek = mc::estimator_from_string(cfg.value("estimator", "twfe"));
    const auto vk = mc::variance_from_string(cfg.value("variance", "crve"));
    const double level = cfg.value("level", 0.05);
    const int horizon = cfg.value("horizon", 0);

    const auto p = load_group_panel(data, nullptr, nullptr);
    validate_panel(p);
    EstimateRecord est;
    switch (ek) {
        case mc::EstimatorKind::Twfe: est = twfe(p); break;
        case mc::EstimatorKind::TwfeOls: est = twfe_ols(p); break;
        case mc::EstimatorKind::FirstDifference: est = first_difference(p); break;
        case mc::EstimatorKind::Switcher: est = switcher_did(p); break;
        case mc::EstimatorKind::LongDifference: est = long_difference(p, horizon); break;
    }
    VarianceEstimate v;
    switch (vk) {
        case mc::VarianceKind::CrveGroup: v = crve_group(est); break;
        case mc::VarianceKind::CrveGroupNoDof: v = crve_group(est, false); break;
        case mc::VarianceKind::HcRobust: v = hc_robust(p); break;
        case mc::VarianceKind::TwowayCgm: v = twoway_cgm(p); break;
    }
    const auto res = t_test(est.alpha_hat, v, level);

    RunOutputs ro;
    ro.summary = {{"estimator", mc::to_string(ek)},
                  {"alpha_hat", est.alpha_hat},
                  {"n_treated", est.n_treated_eff},
                  {"n_control", est.n_control_eff},
                  {"variance_method", v.method},
                  {"variance", v.value},
                  {"se", std::sqrt(v.value)},
                  {"dof", v.dof},
                  {"psd_adjusted", v.psd_adjusted},
                  {"t", res.t},
                  {"p", res.p},
                  {"reject", res.reject},
                  {"level", level}};
    if (cfg.contains("out")) {
        io::write_json(cfg.at("out").get<std::string>(), ro.summary);
        ro.files.push_back(cfg.at("out").get<std::string>());
    }
    return ro;
}

// --------------------------------- mc -------------------------------------

json synthetic_acs_defaults() {
    return {{"n_clusters", 14},    {"groups_per_cluster", 30}, {"n_periods", 14},
            {"rho", 0.9},          {"sigma_cluster2", 0.1},    {"sigma_eps2", 1.0},
            {"deltas", {1, 2, 3, 4, 5, 6, 7, 8}}};
}

PanelData make_synthetic_acs(const json& scfg, std::uint64_t seed,
                             std::vector<std::string>& cluster_of_group) {
    const int S = scfg.value("n_clusters", 14);
    const int m = scfg.value("groups_per_cluster", 30);
    const int T = scfg.value("n_periods", 14);
    const double rho = scfg.value("rho", 0.9);
    const double s2 = scfg.value("sigma_cluster2", 0.1);
    const double se2 = scfg.value("sigma_eps2", 1.0);

    const int N = S * m;
    PanelData p;
    p.n_groups = N;
    p.n_periods = T;
    p.outcomes.resize(static_cast<size_t>(N) * T);
    p.treated.assign(static_cast<size_t>(N), false);
    p.treat_start.assign(static_cast<size_t>(N), 0);
    p.group_ids.resize(static_cast<size_t>(N));
    p.time_ids.resize(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) p.time_ids[t] = std::to_string(2000 + t);
    cluster_of_group.resize(static_cast<size_t>(N));

    RngStream rng(seed, 3);
    const ARSpec shock{rho, s2 * (1.0 - rho * rho), ARSpec::Init::Stationary};
    std::vector<double> lam;
    for (int s = 0; s < S; ++s) {
        auto path = draw_ar1_path(shock, T, rng);
        lam.insert(lam.end(), path.begin(), path.end());
    }
    RngStream rng_eps(seed, 4);
    const double sd = std::sqrt(se2);
    for (int j = 0; j < N; ++j) {
        const int s = j / m;
        p.group_ids[j] = "puma" + std::to_string(j + 1);
        cluster_of_group[j] = "state" + std::to_string(s + 1);
        for (int t = 0; t < T; ++t)
            p.y(j, t) = lam[static_cast<size_t>(s) * T + t] + rng_eps.normal(0.0, sd);
    }
    return p;
}

RunOutputs execute_mc(const json& cfg) {
    const std::string preset = cfg.value("preset", "");
    const auto seed = cfg.value("seed", static_cast<std::uint64_t>(1));
    const long reps = cfg.value("replications", 0L);
    const double level = cfg.value("level", 0.05);
    const int workers = cfg.value("workers", 0);
    const std::string out = cfg.value("out", "");
    require(!out.empty(), "BAD_FORMAT", "mc requires --out", ErrorClass::Usage);

    RunOutputs ro;
    if (preset == "table-a1") {
        const auto rows = mc::run_twoway_mc({0.0, 0.1, 0.4}, {2, 10, 100},
                                            reps > 0 ? reps : 5000, seed, level, workers);
        emit_report(cfg, out, io::to_json(rows), io::twoway_csv(rows), ro);
        ro.summary = {{"preset", preset}, {"rows", rows.size()}, {"out", out}};
    } else if (preset == "table-a2") {
        const auto rows = mc::run_pretest_mc({3, 6, 10}, {0.08, 0.17, 0.46}, {0.0, 0.5, 0.9},
                                             reps > 0 ? reps : 5000, seed, level, workers);
        emit_report(cfg, out, io::to_json(rows), io::pretest_csv(rows), ro);
        ro.summary = {{"preset", preset}, {"rows", rows.size()}, {"out", out}};
    } else if (preset == "staggered-comparison") {
        mc::StaggeredConfig scfg;
        scfg.level = level;
        const auto rows =
            mc::run_staggered_comparison(scfg, reps > 0 ? reps : 4000, seed, workers);
        emit_report(cfg, out, io::to_json(rows), io::staggered_csv(rows), ro);
        ro.summary = {{"preset", preset}, {"rows", rows.size()}, {"out", out}};
    } else if (preset == "conditional-lambda") {
        mc::ConditionalLambdaConfig ccfg;
        ccfg.level = level;
        const int draws = cfg.value("lambda_draws", 100);
        const auto rep =
            mc::run_conditional_lambda_mc(ccfg, draws, reps > 0 ? reps : 200, seed, workers);
        const auto j = io::to_json(rep);
        char line[256];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%d,%ld\n",
                      rep.across_lambda_var, rep.within_lambda_var, rep.ratio, rep.grand_mean,
                      rep.lambda_draws, rep.reps_per_lambda);
        emit_report(cfg, out, j,
                    std::string("across_lambda_var,within_lambda_var,ratio,grand_mean,"
                                "lambda_draws,reps_per_lambda\n") +
                        line,
                    ro);
        ro.summary = j;
    } else if (preset == "fig-a1") {
        std::string csv = "rho,T,value\n";
        for (double rho : {0.0, 0.3, 0.6, 0.9}) {
            for (int T = 2; T <= 50; T += 2) {
                const double v = analytics::nabla_second_moment(rho, T, (1.0 + rho) / 2.0);
                char line[96];
                std::snprintf(line, sizeof line, "%.3g,%d,%.17g\n", rho, T, v);
                csv += line;
            }
        }
        io::write_text(out, csv);
        ro.files.push_back(out);
        ro.summary = {{"preset", preset}, {"out", out}};
    } else if (preset == "synthetic-acs-placebo") {
        const json scfg = synthetic_acs_defaults();
        std::vector<std::string> cluster;
        auto panel = make_synthetic_acs(scfg, seed, cluster);
        const std::string data_path = strip_extension(out) + "_data.csv";
        {
            std::string text = "group,time,outcome,cluster\n";
            char line[160];
            for (int g = 0; g < panel.n_groups; ++g) {
                for (int t = 0; t < panel.n_periods; ++t) {
                    std::snprintf(line, sizeof line, "%s,%s,%.17g,%s\n",
                                  panel.group_ids[g].c_str(), panel.time_ids[t].c_str(),
                                  panel.y(g, t), cluster[g].c_str());
                    text += line;
                }
            }
            io::write_text(data_path, text);
        }
        ro.files.push_back(data_path);

        placebo::PlaceboPlan plan;
        plan.panel = std::move(panel);
        plan.cluster_of_group = cluster;
        plan.deltas = scfg.at("deltas").get<std::vector<int>>();
        plan.level = level;
        plan.seed = seed;
        plan.reps_per_cell = 1;
        plan.scheme = placebo::Scheme::ClusterRandom;
        auto curve = placebo::run_placebo(plan, workers);
        plan.scheme = placebo::Scheme::UnitRandom;
        plan.reps_per_cell = 2;
        const auto curve_u = placebo::run_placebo(plan, workers);
        curve.insert(curve.end(), curve_u.begin(), curve_u.end());
        io::write_text(out, io::placebo_curve_csv(curve));
        ro.files.push_back(out);
        ro.summary = {{"preset", preset}, {"out", out}, {"data", data_path}};
    } else if (preset.empty()) {
        require(cfg.contains("config"), "BAD_FORMAT", "mc needs --preset or --config",
                ErrorClass::Usage);
        const json& jc = cfg.at("config");
        const std::string kind = jc.value("kind", "standard");
        if (kind == "standard") {
            auto mcfg = io::mc_config_from_json(jc);
            if (reps > 0) mcfg.replications = reps;
            mcfg.seed = seed;
            mcfg.level = level;
            mcfg.workers = workers;
            const auto rep = mc::run_mc(mcfg);
            emit_report(cfg, out, io::to_json(rep), io::mc_report_csv(rep, "custom"), ro);
            ro.summary = {{"experiment", "custom"},
                          {"cells", rep.cells.size()},
                          {"seconds", rep.seconds},
                          {"out", out}};
        } else if (kind == "pretest") {
            const auto rows = mc::run_pretest_mc(
                jc.value("T_list", std::vector<int>{3, 6, 10}),
                jc.value("targets", std::vector<double>{}),
                jc.value("rho_list", std::vector<double>{0.0}),
                reps > 0 ? reps : jc.value("replications", 5000L), seed, level, workers);
            emit_report(cfg, out, io::to_json(rows), io::pretest_csv(rows), ro);
            ro.summary = {{"experiment", "pretest"}, {"rows", rows.size()}, {"out", out}};
        } else if (kind == "conditional_lambda") {
            mc::ConditionalLambdaConfig ccfg;
            ccfg.n_factors = jc.value("n_factors", ccfg.n_factors);
            ccfg.rho = jc.value("rho", ccfg.rho);
            ccfg.sigma_nu2 = jc.value("sigma_nu2", ccfg.sigma_nu2);
            ccfg.loading_var = jc.value("loading_var", ccfg.loading_var);
            ccfg.sigma_eps2 = jc.value("sigma_eps2", ccfg.sigma_eps2);
            ccfg.n_groups = jc.value("n_groups", ccfg.n_groups);
            ccfg.n_periods = jc.value("n_periods", ccfg.n_periods);
            ccfg.t_star = jc.value("t_star", ccfg.t_star);
            ccfg.level = level;
            const auto rep = mc::run_conditional_lambda_mc(
                ccfg, jc.value("lambda_draws", 100),
                reps > 0 ? reps : jc.value("reps_per_lambda", 200L), seed, workers);
            char line[256];
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%d,%ld\n",
                          rep.across_lambda_var, rep.within_lambda_var, rep.ratio,
                          rep.grand_mean, rep.lambda_draws, rep.reps_per_lambda);
            emit_report(cfg, out, io::to_json(rep),
                        std::string("across_lambda_var,within_lambda_var,ratio,grand_mean,"
                                    "lambda_draws,reps_per_lambda\n") +
                            line,
                        ro);
            ro.summary = io::to_json(rep);
        } else if (kind == "staggered_comparison") {
            mc::StaggeredConfig scfg;
            scfg.n_clusters = jc.value("n_clusters", scfg.n_clusters);
            scfg.groups_per_cluster = jc.value("groups_per_cluster", scfg.groups_per_cluster);
            scfg.n_periods = jc.value("n_periods", scfg.n_periods);
            scfg.early_t_star = jc.value("early_t_star", scfg.early_t_star);
            scfg.late_t_star = jc.value("late_t_star", scfg.late_t_star);
            scfg.rho = jc.value("rho", scfg.rho);
            scfg.sigma_cluster2 = jc.value("sigma_cluster2", scfg.sigma_cluster2);
            scfg.sigma_eps2 = jc.value("sigma_eps2", scfg.sigma_eps2);
            scfg.level = level;
            const auto rows = mc::run_staggered_comparison(
                scfg, reps > 0 ? reps : jc.value("replications", 4000L), seed, workers);
            emit_report(cfg, out, io::to_json(rows), io::staggered_csv(rows), ro);
            ro.summary = {{"experiment", kind}, {"rows", rows.size()}, {"out", out}};
        } else if (kind == "pretest_normal_model") {
            const auto rep = mc::run_pretest_normal_model(
                jc.value("var1", 1.0), jc.value("var0", 1.0), jc.value("cov", 0.0),
                jc.value("gap_inflation", 0.0),
                reps > 0 ? reps : jc.value("replications", 100000L), seed,
                jc.value("alpha", 0.0), jc.value("pretest_level", 0.05), workers);
            io::write_json(out, io::to_json(rep));
            ro.files.push_back(out);
            ro.summary = io::to_json(rep);
        } else {
            fail("BAD_FORMAT", "unknown experiment kind `" + kind + "`", ErrorClass::Usage);
        }
    } else {
        fail("BAD_PRESET", "unknown preset `" + preset + "`", ErrorClass::Usage);
    }
    return ro;
}

// ------------------------------- placebo -----------------------------------

RunOutputs execute_placebo(const json& cfg) {
    const std::string data = cfg.at("data").get<std::string>();
    placebo::PlaceboPlan plan;
    {
        auto loaded = load_panel_csv(data);
        require(loaded.panel.has_value(), "SCHEMA_ERROR",
                "placebo needs the group schema with a `cluster` column; aggregate micro "
                "data first");
        plan.panel = std::move(*loaded.panel);
        plan.cluster_of_group = std::move(loaded.cluster_of_group);
        plan.cohort_of_group = std::move(loaded.cohort_of_group);
    }
    require(!plan.cluster_of_group.empty(), "SCHEMA_ERROR",
            "placebo input needs a `cluster` column");

    plan.scheme = cfg.value("scheme", "cluster") == "unit" ? placebo::Scheme::UnitRandom
                                                           : placebo::Scheme::ClusterRandom;
    plan.unit_p = cfg.value("unit_p", 0.5);
    plan.deltas = cfg.value("deltas", std::vector<int>{1});
    plan.group_deltas = cfg.value("group_deltas", std::vector<int>{});
    plan.reps_per_cell = cfg.value("reps_per_cell", 1);
    plan.level = cfg.value("level", 0.05);
    plan.min_per_arm = cfg.value("min_per_arm", 20);
    plan.seed = cfg.value("seed", static_cast<std::uint64_t>(1));
    const int workers = cfg.value("workers", 0);
    const std::string out = cfg.value("out", "placebo_curve.csv");

    RunOutputs ro;
    if (!plan.group_deltas.empty()) {
        const auto surface = placebo::run_two_dimension_placebo(plan, workers);
        emit_report(cfg, out, json{{"experiment", "placebo_surface"}},
                    io::placebo_surface_csv(surface), ro);
        ro.summary = {{"cells", surface.size()}, {"out", out}};
    } else {
        const auto curve = placebo::run_placebo(plan, workers);
        emit_report(cfg, out, json{{"experiment", "placebo_curve"}},
                    io::placebo_curve_csv(curve), ro);
        ro.summary = {{"points", curve.size()}, {"out", out}};
    }
    return ro;
}

// ------------------------------- analytic ----------------------------------

RunOutputs execute_analytic(const json& cfg) {
    const std::string what = cfg.at("what").get<std::string>();
    RunOutputs ro;
    json j;
    if (what == "nabla") {
        j["value"] = analytics::nabla_second_moment(
            cfg.at("rho").get<double>(), cfg.at("T").get<int>(), cfg.value("sigma_nu2", 1.0));
    } else if (what == "nabla-curve") {
        std::string csv = "rho,T,value\n";
        for (double rho : cfg.value("rho_list", std::vector<double>{0.0, 0.3, 0.6, 0.9})) {
            for (int T = 2; T <= cfg.value("T_max", 50); T += 2) {
                char line[96];
                std::snprintf(line, sizeof line, "%.3g,%d,%.17g\n", rho, T,
                              analytics::nabla_second_moment(rho, T, (1.0 + rho) / 2.0));
                csv += line;
            }
        }
        const std::string out = cfg.value("out", "nabla_curve.csv");
        io::write_text(out, csv);
        ro.files.push_back(out);
        ro.summary = {{"out", out}};
        return ro;
    } else if (what == "rejection") {
        j["value"] = analytics::rejection_from_inflation(cfg.at("kappa").get<double>(),
                                                         cfg.value("level", 0.05));
    } else if (what == "t-variance-paired") {
        j["value"] = analytics::paired_model_t_variance(
            cfg.at("sigma_lambda2").get<double>(), cfg.at("sigma_delta2").get<double>(),
            cfg.value("sigma_eps2_treated", 1.0), cfg.value("sigma_eps2_control", 1.0),
            cfg.value("c", 0.5));
    } else if (what == "t-variance-drift") {
        analytics::GapInputs g;
        g.mu_gap = cfg.value("mu_gap", std::vector<double>{1.0});
        const auto omega = cfg.at("omega").get<std::vector<double>>();
        g.second_moment = omega;
        g.sigma_eps2_treated = cfg.value("sigma_eps2_treated", 1.0);
        g.sigma_eps2_control = cfg.value("sigma_eps2_control", 1.0);
        g.treated_share = cfg.value("c", 0.5);
        j["value"] = analytics::local_drift_t_variance(g, omega);
    } else if (what == "variance-gap") {
        analytics::GapInputs g;
        g.mu_gap = cfg.at("mu_gap").get<std::vector<double>>();
        g.second_moment = cfg.at("second_moment").get<std::vector<double>>();
        j["value"] = analytics::crve_variance_gap(g);
    } else {
        fail("BAD_FORMAT", "unknown analytic quantity `" + what + "`", ErrorClass::Usage);
    }
    ro.summary = j;
    if (cfg.contains("out")) {
        io::write_json(cfg.at("out").get<std::string>(), j);
        ro.files.push_back(cfg.at("out").get<std::string>());
    }
    return ro;
}

RunOutputs execute_calibrate(const json& cfg) {
    const auto res = analytics::calibrate_factor_variance(
        cfg.at("target").get<double>(), cfg.value("rho", 0.0), cfg.value("level", 0.05),
        static_cast<int>(cfg.value("replications", 10000L)),
        cfg.value("seed", static_cast<std::uint64_t>(1)));
    RunOutputs ro;
    ro.summary = {{"sigma_lambda2", res.sigma_lambda2},
                  {"achieved", res.achieved},
                  {"probes", res.probes}};
    if (cfg.contains("out")) {
        io::write_json(cfg.at("out").get<std::string>(), ro.summary);
        ro.files.push_back(cfg.at("out").get<std::string>());
    }
    return ro;
}

RunOutputs execute(const std::string& sub, const json& cfg) {
    if (sub == "simulate") return execute_simulate(cfg);
    if (sub == "estimate") return execute_estimate(cfg);
    if (sub == "mc") return execute_mc(cfg);
    if (sub == "placebo") return execute_placebo(cfg);
    if (sub == "analytic") return execute_analytic(cfg);
    if (sub == "calibrate") return execute_calibrate(cfg);
    fail("BAD_FORMAT", "unknown subcommand `" + sub + "`", ErrorClass::Usage);
}

std::string manifest_path_for(const json& cfg, const std::string& sub) {
    if (cfg.contains("manifest")) return cfg.at("manifest").get<std::string>();
    if (cfg.contains("out"))
        return strip_extension(cfg.at("out").get<std::string>()) + ".manifest.json";
    return sub + ".manifest.json";
}

int run_resolved(const std::string& sub, const json& cfg) {
    io::RunManifest man;
    man.subcommand = sub;
    man.resolved_config = cfg;
    man.seed = cfg.value("seed", static_cast<std::uint64_t>(1));
    man.version = std::string(kVersion);
    man.started_at = io::iso8601_now();
    int code = 0;
    try {
        const auto ro = execute(sub, cfg);
        man.outputs = ro.files;
        if (!ro.summary.is_null()) std::cout << ro.summary.dump(2) << "\n";
    } catch (const Error& e) {
        switch (e.error_class()) {
            case ErrorClass::Usage: code = 1; break;
            case ErrorClass::Data: code = 2; break;
            case ErrorClass::Numeric: code = 3; break;
        }
        man.error = e.what();
        std::cerr << "error " << e.code() << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
        code = 3;
        man.error = e.what();
        std::cerr << "error INTERNAL: " << e.what() << "\n";
    }
    man.exit_code = code;
    man.finished_at = io::iso8601_now();
    try {
        io::write_json(manifest_path_for(cfg, sub), man.to_json());
    } catch (const std::exception& e) {
        std::cerr << "error MANIFEST: " << e.what() << "\n";
        if (code == 0) code = 2;
    }
    return code;
}

// ------------------------- app construction --------------------------------

struct CommonFlags {
    std::uint64_t seed = 1;
    long reps = 0;
    double level = 0.05;
    std::string out;
    std::string format = "csv";
    int workers = 0;
    std::string manifest;
};

struct AppState {
    std::string from_manifest;

    CLI::App* sim = nullptr;
    CommonFlags sf;
    std::string sim_config;
    int sim_N = 100, sim_T = 4, sim_tstar = 2;

    CLI::App* est = nullptr;
    CommonFlags ef;
    std::string est_data, est_estimator = "twfe", est_variance = "crve";
    int est_horizon = 0;

    CLI::App* mcs = nullptr;
    CommonFlags mf;
    std::string mc_preset, mc_config;
    int mc_lambda_draws = 100;

    CLI::App* pla = nullptr;
    CommonFlags pf;
    std::string pla_data, pla_scheme = "cluster";
    std::vector<int> pla_deltas{1}, pla_gdeltas;
    int pla_reps_cell = 1, pla_min_arm = 20;
    double pla_unit_p = 0.5;

    CLI::App* ana = nullptr;
    CommonFlags af;
    std::string ana_what;
    double ana_rho = 0.0, ana_sigma_nu2 = 1.0, ana_kappa = 0.0;
    double ana_sl2 = 0.0, ana_sd2 = 0.0, ana_se1 = 1.0, ana_se0 = 1.0, ana_c = 0.5;
    int ana_T = 2, ana_Tmax = 50;
    std::vector<double> ana_mu_gap, ana_omega, ana_m2, ana_rho_list;

    CLI::App* cal = nullptr;
    CommonFlags cf;
    double cal_target = 0.08, cal_rho = 0.0;
};

void add_common(CLI::App* sub, CommonFlags& f, bool with_format = true) {
    sub->add_option("--seed", f.seed, "master seed; replication r draws from stream (seed, r)")
        ->envname("DIDLAB_SEED");
    sub->add_option("--reps", f.reps, "replication count override")->envname("DIDLAB_REPS");
    sub->add_option("--level", f.level, "nominal test level")->envname("DIDLAB_LEVEL");
    sub->add_option("--out", f.out, "output file path");
    if (with_format) sub->add_option("--format", f.format, "output format: csv or json");
    sub->add_option("--workers", f.workers,
                    "worker threads (0 = all cores); reports are identical for any count")
        ->envname("DIDLAB_WORKERS");
    sub->add_option("--manifest", f.manifest, "manifest path (default: <out>.manifest.json)");
}

void build_app(CLI::App& app, AppState& st) {
    app.description(
        "didlab: DID estimators, cluster-robust inference, and factor-model simulation");
    app.require_subcommand(0, 1);
    app.add_option("--from-manifest", st.from_manifest,
                   "re-run the resolved config stored in a manifest file");

    st.sim = app.add_subcommand("simulate", "generate a synthetic panel CSV");
    st.sim->add_option("--config", st.sim_config, "factor-model spec JSON file");
    st.sim->add_option("--N", st.sim_N, "number of groups");
    st.sim->add_option("--T", st.sim_T, "number of periods");
    st.sim->add_option("--tstar", st.sim_tstar, "treatment starts after this period");
    add_common(st.sim, st.sf, false);

    st.est = app.add_subcommand("estimate", "estimate a treatment effect from a panel CSV");
    st.est->add_option("--data", st.est_data, "panel CSV (group or micro schema)")->required();
    st.est->add_option("--estimator", st.est_estimator,
                       "twfe | twfe_ols | fd | switcher | longdiff");
    st.est->add_option("--variance", st.est_variance, "crve | crve_nodof | hc | cgm");
    st.est->add_option("--horizon", st.est_horizon, "max horizon L for longdiff");
    add_common(st.est, st.ef, false);

    st.mcs = app.add_subcommand("mc", "run a Monte Carlo experiment or preset");
    st.mcs->add_option("--preset", st.mc_preset,
                       "table-a1 | table-a2 | fig-a1 | staggered-comparison | "
                       "conditional-lambda | synthetic-acs-placebo");
    st.mcs->add_option("--config", st.mc_config, "custom experiment config JSON file");
    st.mcs->add_option("--lambda-draws", st.mc_lambda_draws,
                       "outer lambda draws for conditional-lambda");
    add_common(st.mcs, st.mf);

    st.pla = app.add_subcommand("placebo", "placebo-intervention audit of a user panel");
    st.pla->add_option("--data", st.pla_data, "panel CSV with a cluster column")->required();
    st.pla->add_option("--scheme", st.pla_scheme, "assignment scheme: unit | cluster");
    st.pla->add_option("--deltas", st.pla_deltas, "period distances to sweep")->delimiter(',');
    st.pla->add_option("--group-deltas", st.pla_gdeltas,
                       "cohort distances; switches to the two-dimension sweep")
        ->delimiter(',');
    st.pla->add_option("--reps-per-cell", st.pla_reps_cell,
                       "placebo assignments per design cell");
    st.pla->add_option("--min-arm", st.pla_min_arm, "minimum groups per cluster/cohort arm");
    st.pla->add_option("--unit-p", st.pla_unit_p, "treated share under the unit scheme");
    add_common(st.pla, st.pf);

    st.ana = app.add_subcommand("analytic", "closed-form quantities as JSON");
    st.ana->add_option("what", st.ana_what,
                       "nabla | nabla-curve | variance-gap | t-variance-drift | t-variance-paired | rejection")
        ->required();
    st.ana->add_option("--rho", st.ana_rho, "AR(1) parameter");
    st.ana->add_option("--T", st.ana_T, "number of periods (even)");
    st.ana->add_option("--sigma-nu2", st.ana_sigma_nu2, "AR(1) innovation variance");
    st.ana->add_option("--kappa", st.ana_kappa, "t-variance inflation");
    st.ana->add_option("--sigma-lambda2", st.ana_sl2, "treated-pair shock variance");
    st.ana->add_option("--sigma-delta2", st.ana_sd2, "control-pair shock variance");
    st.ana->add_option("--sigma-eps2-treated", st.ana_se1, "treated noise variance");
    st.ana->add_option("--sigma-eps2-control", st.ana_se0, "control noise variance");
    st.ana->add_option("--c", st.ana_c, "treated share");
    st.ana->add_option("--mu-gap", st.ana_mu_gap, "loading mean gap vector")->delimiter(',');
    st.ana->add_option("--omega", st.ana_omega, "Omega matrix, row-major")->delimiter(',');
    st.ana->add_option("--second-moment", st.ana_m2,
                       "E[(nabla lambda)'(nabla lambda)], row-major")
        ->delimiter(',');
    st.ana->add_option("--rho-list", st.ana_rho_list, "rho grid for nabla-curve")
        ->delimiter(',');
    st.ana->add_option("--T-max", st.ana_Tmax, "largest T for nabla-curve");
    add_common(st.ana, st.af, false);

    st.cal = app.add_subcommand("calibrate", "factor variance hitting a rejection target");
    st.cal->add_option("--target", st.cal_target, "unconditional rejection target")->required();
    st.cal->add_option("--rho", st.cal_rho, "factor serial correlation");
    add_common(st.cal, st.cf, false);
}

void put_common(json& cfg, const CommonFlags& f, const CLI::App* sub) {
    cfg["seed"] = f.seed;
    if (sub->count("--reps")) cfg["replications"] = f.reps;
    cfg["level"] = f.level;
    if (!f.out.empty()) cfg["out"] = f.out;
    if (sub->get_option_no_throw("--format")) cfg["format"] = f.format;
    cfg["workers"] = f.workers;
    if (!f.manifest.empty()) cfg["manifest"] = f.manifest;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"table-a1",             "table-a2",           "fig-a1",
            "staggered-comparison", "conditional-lambda", "synthetic-acs-placebo"};
}

std::vector<std::string> undocumented_flags() {
    CLI::App app;
    AppState st;
    build_app(app, st);
    std::vector<std::string> bad;
    const std::function<void(const CLI::App*, std::string)> walk = [&](const CLI::App* a,
                                                                       std::string prefix) {
        for (const auto* opt : a->get_options()) {
            if (opt->get_description().empty()) bad.push_back(prefix + opt->get_name());
        }
        for (const auto* sub : a->get_subcommands([](const CLI::App*) { return true; })) {
            walk(sub, prefix + sub->get_name() + " ");
        }
    };
    walk(&app, "");
    return bad;
}

int run(std::vector<std::string> args) {
    CLI::App app;
    AppState st;
    build_app(app, st);

    std::vector<const char*> argv;
    argv.push_back("didlab");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (!st.from_manifest.empty()) {
        try {
            const auto man = io::RunManifest::from_json(io::load_json(st.from_manifest));
            return run_resolved(man.subcommand, man.resolved_config);
        } catch (const Error& e) {
            std::cerr << "error " << e.code() << ": " << e.what() << "\n";
            return e.error_class() == ErrorClass::Usage ? 1 : 2;
        }
    }
    if (app.get_subcommands().empty()) {
        std::cout << app.help() << "\n";
        return 1;
    }

    const auto* sub = app.get_subcommands().front();
    json cfg;
    try {
        if (sub == st.sim) {
            if (!st.sim_config.empty()) cfg["spec"] = io::load_json(st.sim_config);
            cfg["n_groups"] = st.sim_N;
            cfg["n_periods"] = st.sim_T;
            cfg["t_star"] = st.sim_tstar;
            put_common(cfg, st.sf, st.sim);
            if (st.sf.out.empty()) cfg["out"] = "panel.csv";
            return run_resolved("simulate", cfg);
        }
        if (sub == st.est) {
            cfg["data"] = st.est_data;
            cfg["estimator"] = st.est_estimator;
            cfg["variance"] = st.est_variance;
            cfg["horizon"] = st.est_horizon;
            put_common(cfg, st.ef, st.est);
            return run_resolved("estimate", cfg);
        }
        if (sub == st.mcs) {
            if (!st.mc_preset.empty()) cfg["preset"] = st.mc_preset;
            if (!st.mc_config.empty()) cfg["config"] = io::load_json(st.mc_config);
            cfg["lambda_draws"] = st.mc_lambda_draws;
            put_common(cfg, st.mf, st.mcs);
            return run_resolved("mc", cfg);
        }
        if (sub == st.pla) {
            cfg["data"] = st.pla_data;
            cfg["scheme"] = st.pla_scheme == "unit" ? "unit" : "cluster";
            cfg["deltas"] = st.pla_deltas;
            if (!st.pla_gdeltas.empty()) cfg["group_deltas"] = st.pla_gdeltas;
            cfg["reps_per_cell"] = st.pla_reps_cell;
            cfg["min_per_arm"] = st.pla_min_arm;
            cfg["unit_p"] = st.pla_unit_p;
            put_common(cfg, st.pf, st.pla);
            if (st.pf.out.empty())
                cfg["out"] = st.pla_gdeltas.empty() ? "placebo_curve.csv"
                                                    : "placebo_surface.csv";
            return run_resolved("placebo", cfg);
        }
        if (sub == st.ana) {
            cfg["what"] = st.ana_what;
            cfg["rho"] = st.ana_rho;
            cfg["T"] = st.ana_T;
            cfg["sigma_nu2"] = st.ana_sigma_nu2;
            cfg["kappa"] = st.ana_kappa;
            cfg["sigma_lambda2"] = st.ana_sl2;
            cfg["sigma_delta2"] = st.ana_sd2;
            cfg["sigma_eps2_treated"] = st.ana_se1;
            cfg["sigma_eps2_control"] = st.ana_se0;
            cfg["c"] = st.ana_c;
            if (!st.ana_mu_gap.empty()) cfg["mu_gap"] = st.ana_mu_gap;
            if (!st.ana_omega.empty()) cfg["omega"] = st.ana_omega;
            if (!st.ana_m2.empty()) cfg["second_moment"] = st.ana_m2;
            if (!st.ana_rho_list.empty()) cfg["rho_list"] = st.ana_rho_list;
            cfg["T_max"] = st.ana_Tmax;
            put_common(cfg, st.af, st.ana);
            return run_resolved("analytic", cfg);
        }
        if (sub == st.cal) {
            cfg["target"] = st.cal_target;
            cfg["rho"] = st.cal_rho;
            cfg["replications"] = st.cf.reps > 0 ? st.cf.reps : 10000L;
            put_common(cfg, st.cf, st.cal);
            return run_resolved("calibrate", cfg);
        }
    } catch (const Error& e) {
        std::cerr << "error " << e.code() << ": " << e.what() << "\n";
        switch (e.error_class()) {
            case ErrorClass::Usage: return 1;
            case ErrorClass::Data: return 2;
            case ErrorClass::Numeric: return 3;
        }
    }
    return 1;
}

}  // namespace didlab::cli
