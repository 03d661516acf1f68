#include "didlab/serialize.hpp"

#include "didlab/common.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace didlab::io {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const char* to_string(Assignment a) {
    switch (a) {
        case Assignment::Bernoulli: return "bernoulli";
        case Assignment::FixedFlags: return "fixed";
        case Assignment::Grouped: return "grouped";
    }
    return "?";
}

const char* to_string(Structure s) {
    switch (s) {
        case Structure::Generic: return "generic";
        case Structure::Paired: return "paired";
        case Structure::ArmLevel: return "arm_level";
    }
    return "?";
}

}  // namespace

json to_json(const FactorModelSpec& spec) {
    json j;
    j["n_factors"] = spec.n_factors;
    j["structure"] = to_string(spec.structure);
    j["loading_mean_treated"] = spec.loading_mean_treated;
    j["loading_mean_control"] = spec.loading_mean_control;
    j["loading_cov_treated"] = spec.loading_cov_treated;
    j["loading_cov_control"] = spec.loading_cov_control;
    json procs = json::array();
    for (const auto& f : spec.factor_process) {
        procs.push_back({{"rho", f.rho},
                         {"sigma_nu2", f.sigma_nu2},
                         {"init", f.init == ARSpec::Init::Stationary ? "stationary" : "zero"}});
    }
    j["factor_process"] = procs;
    j["sigma_eps2_treated"] = spec.sigma_eps2_treated;
    j["sigma_eps2_control"] = spec.sigma_eps2_control;
    j["fe_group_sd"] = spec.fe_group_sd;
    j["fe_time_sd"] = spec.fe_time_sd;
    j["assignment"] = to_string(spec.assignment);
    j["bernoulli_c"] = spec.bernoulli_c;
    if (!spec.fixed_flags.empty()) {
        json flags = json::array();
        for (bool b : spec.fixed_flags) flags.push_back(b ? 1 : 0);
        j["fixed_flags"] = flags;
    }
    j["grouped_blocks"] = spec.grouped_blocks;
    j["grouped_treated_blocks"] = spec.grouped_treated_blocks;
    j["alpha"] = spec.alpha;
    j["alpha_sd"] = spec.alpha_sd;
    j["paired_sigma_lambda2"] = spec.paired_sigma_lambda2;
    j["paired_sigma_delta2"] = spec.paired_sigma_delta2;
    return j;
}

FactorModelSpec spec_from_json(const json& j) {
    FactorModelSpec spec;
    try {
        spec.n_factors = j.value("n_factors", 0);
        const std::string st = j.value("structure", "generic");
        if (st == "generic") {
            spec.structure = Structure::Generic;
        } else if (st == "paired") {
            spec.structure = Structure::Paired;
        } else if (st == "arm_level") {
            spec.structure = Structure::ArmLevel;
        } else {
            fail("SCHEMA_ERROR", "unknown structure `" + st + "`");
        }
        spec.loading_mean_treated = j.value("loading_mean_treated", std::vector<double>{});
        spec.loading_mean_control = j.value("loading_mean_control", std::vector<double>{});
        spec.loading_cov_treated = j.value("loading_cov_treated", std::vector<double>{});
        spec.loading_cov_control = j.value("loading_cov_control", std::vector<double>{});
        if (j.contains("factor_process")) {
            for (const auto& f : j.at("factor_process")) {
                ARSpec a;
                a.rho = f.value("rho", 0.0);
                a.sigma_nu2 = f.value("sigma_nu2", 1.0);
                a.init = f.value("init", std::string("stationary")) == "zero"
                             ? ARSpec::Init::Zero
                             : ARSpec::Init::Stationary;
                spec.factor_process.push_back(a);
            }
        }
        spec.sigma_eps2_treated = j.value("sigma_eps2_treated", 1.0);
        spec.sigma_eps2_control = j.value("sigma_eps2_control", 1.0);
        spec.fe_group_sd = j.value("fe_group_sd", 0.0);
        spec.fe_time_sd = j.value("fe_time_sd", 0.0);
        const std::string as = j.value("assignment", "bernoulli");
        if (as == "bernoulli") {
            spec.assignment = Assignment::Bernoulli;
        } else if (as == "fixed") {
            spec.assignment = Assignment::FixedFlags;
        } else if (as == "grouped") {
            spec.assignment = Assignment::Grouped;
        } else {
            fail("SCHEMA_ERROR", "unknown assignment `" + as + "`");
        }
        spec.bernoulli_c = j.value("bernoulli_c", 0.5);
        if (j.contains("fixed_flags")) {
            for (const auto& v : j.at("fixed_flags")) spec.fixed_flags.push_back(v.get<int>() != 0);
        }
        spec.grouped_blocks = j.value("grouped_blocks", 0);
        spec.grouped_treated_blocks = j.value("grouped_treated_blocks", 0);
        spec.alpha = j.value("alpha", 0.0);
        spec.alpha_sd = j.value("alpha_sd", 0.0);
        spec.paired_sigma_lambda2 = j.value("paired_sigma_lambda2", 0.0);
        spec.paired_sigma_delta2 = j.value("paired_sigma_delta2", 0.0);
    } catch (const json::exception& e) {
        fail("SCHEMA_ERROR", std::string("bad spec json: ") + e.what());
    }
    return spec;
}

json to_json(const mc::MCConfig& cfg) {
    json j;
    j["spec"] = to_json(cfg.spec);
    j["n_groups"] = cfg.n_groups;
    j["n_periods"] = cfg.n_periods;
    j["t_star"] = cfg.t_star;
    json es = json::array();
    for (auto e : cfg.estimators) es.push_back(mc::to_string(e));
    j["estimators"] = es;
    json vs = json::array();
    for (auto v : cfg.variance_methods) vs.push_back(mc::to_string(v));
    j["variance_methods"] = vs;
    j["level"] = cfg.level;
    j["replications"] = cfg.replications;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["long_diff_horizon"] = cfg.long_diff_horizon;
    return j;
}

mc::MCConfig mc_config_from_json(const json& j) {
    mc::MCConfig cfg;
    try {
        if (j.contains("spec")) cfg.spec = spec_from_json(j.at("spec"));
        cfg.n_groups = j.value("n_groups", 100);
        cfg.n_periods = j.value("n_periods", 2);
        cfg.t_star = j.value("t_star", 1);
        if (j.contains("estimators")) {
            cfg.estimators.clear();
            for (const auto& e : j.at("estimators"))
                cfg.estimators.push_back(mc::estimator_from_string(e.get<std::string>()));
        }
        if (j.contains("variance_methods")) {
            cfg.variance_methods.clear();
            for (const auto& v : j.at("variance_methods"))
                cfg.variance_methods.push_back(mc::variance_from_string(v.get<std::string>()));
        }
        cfg.level = j.value("level", 0.05);
        cfg.replications = j.value("replications", 5000L);
        cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
        cfg.workers = j.value("workers", 0);
        cfg.long_diff_horizon = j.value("long_diff_horizon", 0);
    } catch (const json::exception& e) {
        fail("SCHEMA_ERROR", std::string("bad mc config json: ") + e.what());
    }
    return cfg;
}

json to_json(const mc::MCReport& rep) {
    json j;
    j["replications"] = rep.replications;
    j["seconds"] = rep.seconds;
    json ests = json::array();
    for (size_t i = 0; i < rep.estimator_names.size(); ++i) {
        ests.push_back({{"estimator", rep.estimator_names[i]},
                        {"alpha_mean", rep.alpha_mean[i]},
                        {"alpha_var", rep.alpha_var[i]}});
    }
    j["estimators"] = ests;
    json cells = json::array();
    for (const auto& c : rep.cells) {
        cells.push_back({{"estimator", c.estimator},
                         {"variance_method", c.variance_method},
                         {"reject_rate", c.reject_rate},
                         {"mc_se", c.mc_se},
                         {"reps", c.reps},
                         {"mean_vhat", c.mean_vhat},
                         {"psd_adjusted", c.psd_adjusted}});
    }
    j["cells"] = cells;
    return j;
}

json to_json(const std::vector<mc::TwowayRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"rho", r.rho},
                       {"T", r.T},
                       {"rej_nocluster", r.rej_nocluster},
                       {"rej_cluster", r.rej_cluster},
                       {"rej_cgm", r.rej_cgm},
                       {"se_nocluster", r.se_nocluster},
                       {"se_cluster", r.se_cluster},
                       {"se_cgm", r.se_cgm},
                       {"psd_adjusted", r.psd_adjusted},
                       {"reps", r.reps}});
    }
    return json{{"experiment", "twoway"}, {"rows", arr}};
}

json to_json(const std::vector<mc::PretestRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json o = {{"panel", r.panel},       {"target", r.target},
                  {"rho", r.rho},           {"T", r.T},
                  {"sigma_lambda2", r.sigma_lambda2},
                  {"pass_rate", r.pass_rate},
                  {"pass_se", r.pass_se},   {"uncond_reject", r.uncond_reject},
                  {"reps", r.reps}};
        if (r.cond_reject) {
            o["cond_reject"] = *r.cond_reject;
            o["cond_se"] = *r.cond_se;
        }
        arr.push_back(o);
    }
    return json{{"experiment", "pretest"}, {"rows", arr}};
}

json to_json(const std::vector<mc::StaggeredRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"scheme", r.scheme},
                       {"estimator", r.estimator},
                       {"reject_rate", r.reject_rate},
                       {"mc_se", r.mc_se},
                       {"reps", r.reps}});
    }
    return json{{"experiment", "staggered_comparison"}, {"rows", arr}};
}

json to_json(const mc::ConditionalLambdaReport& rep) {
    return json{{"experiment", "conditional_lambda"},
                {"across_lambda_var", rep.across_lambda_var},
                {"within_lambda_var", rep.within_lambda_var},
                {"ratio", rep.ratio},
                {"grand_mean", rep.grand_mean},
                {"lambda_draws", rep.lambda_draws},
                {"reps_per_lambda", rep.reps_per_lambda}};
}

json to_json(const mc::PretestNormalReport& rep) {
    return json{{"experiment", "pretest_normal_model"},
                {"pass_rate", rep.pass_rate},
                {"uncond_mean", rep.uncond_mean},
                {"cond_mean", rep.cond_mean},
                {"uncond_var", rep.uncond_var},
                {"cond_var", rep.cond_var},
                {"mean_se", rep.mean_se},
                {"reps", rep.reps},
                {"passed", rep.passed}};
}

std::string twoway_csv(const std::vector<mc::TwowayRow>& rows) {
    std::ostringstream s;
    s << "experiment,rho,T,estimator,variance_method,rate,mc_se,reps,psd_adjusted\n";
    for (const auto& r : rows) {
        const char* methods[3] = {"hc", "crve", "cgm"};
        const double rates[3] = {r.rej_nocluster, r.rej_cluster, r.rej_cgm};
        const double ses[3] = {r.se_nocluster, r.se_cluster, r.se_cgm};
        for (int m = 0; m < 3; ++m) {
            s << "twoway," << fmt6(r.rho) << ',' << r.T << ",twfe," << methods[m] << ','
              << fmt(rates[m]) << ',' << fmt6(ses[m]) << ',' << r.reps << ','
              << (m == 2 ? r.psd_adjusted : 0) << '\n';
        }
    }
    return s.str();
}

std::string pretest_csv(const std::vector<mc::PretestRow>& rows) {
    std::ostringstream s;
    s << "panel,T,rho,target,sigma_lambda2,pass_rate,pass_se,cond_rej,cond_se,uncond_rej,reps\n";
    for (const auto& r : rows) {
        s << r.panel << ',' << r.T << ',' << fmt6(r.rho) << ',' << fmt6(r.target) << ','
          << fmt(r.sigma_lambda2) << ',' << fmt(r.pass_rate) << ',' << fmt6(r.pass_se) << ',';
        if (r.cond_reject) {
            s << fmt(*r.cond_reject) << ',' << fmt6(*r.cond_se);
        } else {
            s << ",";
        }
        s << ',' << fmt(r.uncond_reject) << ',' << r.reps << '\n';
    }
    return s.str();
}

std::string staggered_csv(const std::vector<mc::StaggeredRow>& rows) {
    std::ostringstream s;
    s << "experiment,scheme,estimator,variance_method,rate,mc_se,reps\n";
    for (const auto& r : rows) {
        s << "staggered_comparison," << r.scheme << ',' << r.estimator << ",crve,"
          << fmt(r.reject_rate) << ',' << fmt6(r.mc_se) << ',' << r.reps << '\n';
    }
    return s.str();
}

std::string mc_report_csv(const mc::MCReport& rep, const std::string& experiment) {
    std::ostringstream s;
    s << "experiment,estimator,variance_method,rate,mc_se,reps,mean_vhat,psd_adjusted\n";
    for (const auto& c : rep.cells) {
        s << experiment << ',' << c.estimator << ',' << c.variance_method << ','
          << fmt(c.reject_rate) << ',' << fmt6(c.mc_se) << ',' << c.reps << ','
          << fmt(c.mean_vhat) << ',' << c.psd_adjusted << '\n';
    }
    return s.str();
}

std::string placebo_curve_csv(const std::vector<placebo::CurvePoint>& curve) {
    std::ostringstream s;
    s << "delta,scheme,rate,mc_se,n_cells,n_tests\n";
    for (const auto& p : curve) {
        s << p.delta << ',' << p.scheme << ',' << fmt(p.reject_rate) << ',' << fmt6(p.mc_se)
          << ',' << p.n_cells << ',' << p.n_tests << '\n';
    }
    return s.str();
}

std::string placebo_surface_csv(const std::vector<placebo::SurfacePoint>& surface) {
    std::ostringstream s;
    s << "delta_time,delta_group,rate,mc_se,n_cells,n_tests\n";
    for (const auto& p : surface) {
        s << p.delta_time << ',' << p.delta_group << ',' << fmt(p.reject_rate) << ','
          << fmt6(p.mc_se) << ',' << p.n_cells << ',' << p.n_tests << '\n';
    }
    return s.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "DATA_NOT_FOUND", "cannot write " + path);
    f << text;
    require(f.good(), "DATA_NOT_FOUND", "write failure on " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), "DATA_NOT_FOUND", "cannot open " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json load_json(const std::string& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::exception& e) {
        fail("PARSE_ERROR", path + ": " + e.what());
    }
}

json RunManifest::to_json() const {
    json j;
    j["subcommand"] = subcommand;
    j["resolved_config"] = resolved_config;
    j["seed"] = seed;
    j["version"] = version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["outputs"] = outputs;
    j["exit_code"] = exit_code;
    j["error"] = error;
    return j;
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    try {
        m.subcommand = j.at("subcommand").get<std::string>();
        m.resolved_config = j.at("resolved_config");
        m.seed = j.at("seed").get<std::uint64_t>();
        m.version = j.value("version", "");
        m.started_at = j.value("started_at", "");
        m.finished_at = j.value("finished_at", "");
        m.outputs = j.value("outputs", std::vector<std::string>{});
        m.exit_code = j.value("exit_code", 0);
        m.error = j.value("error", "");
    } catch (const json::exception& e) {
        fail("SCHEMA_ERROR", std::string("bad manifest: ") + e.what());
    }
    return m;
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace didlab::io
