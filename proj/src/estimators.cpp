#include "didlab/estimators.hpp"

#include "didlab/common.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace didlab {

namespace {

int require_uniform_tstar(const PanelData& p, const char* who) {
    auto ts = p.uniform_tstar();
    if (!ts) {
        fail("STAGGERED_UNSUPPORTED",
             std::string(who) + " needs a common t*; use switcher_did or long_difference");
    }
    return *ts;
}

EstimateRecord make_record(const PanelData& p, const std::string& tag) {
    EstimateRecord e;
    e.estimator_tag = tag;
    e.what.assign(static_cast<size_t>(p.n_groups), 0.0);
    e.treated_arm.assign(p.treated.begin(), p.treated.end());
    e.participates.assign(static_cast<size_t>(p.n_groups), false);
    return e;
}

// DID of per-group deltas between two periods over explicit index sets.
// Returns the point estimate and adds residual influences into `infl`.
double did_cell(const PanelData& p, int post, int pre, const std::vector<int>& switchers,
                const std::vector<int>& comparison, double weight, std::vector<double>& infl) {
    double m1 = 0.0, m0 = 0.0;
    for (int j : switchers) m1 += p.y(j, post - 1) - p.y(j, pre - 1);
    for (int j : comparison) m0 += p.y(j, post - 1) - p.y(j, pre - 1);
    m1 /= static_cast<double>(switchers.size());
    m0 /= static_cast<double>(comparison.size());
    for (int j : switchers) {
        const double d = p.y(j, post - 1) - p.y(j, pre - 1);
        infl[j] += weight * (d - m1) / static_cast<double>(switchers.size());
    }
    for (int j : comparison) {
        const double d = p.y(j, post - 1) - p.y(j, pre - 1);
        infl[j] -= weight * (d - m0) / static_cast<double>(comparison.size());
    }
    return m1 - m0;
}

// Convert signed per-group influences into the W_hat convention.
void store_influences(EstimateRecord& e, const std::vector<double>& infl) {
    int n1 = 0, n0 = 0;
    for (size_t j = 0; j < e.participates.size(); ++j) {
        if (!e.participates[j]) continue;
        (e.treated_arm[j] ? n1 : n0)++;
    }
    e.n_treated_eff = n1;
    e.n_control_eff = n0;
    for (size_t j = 0; j < e.participates.size(); ++j) {
        if (!e.participates[j]) continue;
        e.what[j] = e.treated_arm[j] ? infl[j] * n1 : -infl[j] * n0;
    }
}

}  // namespace

EstimateRecord twfe(const PanelData& p) {
    validate_panel(p);
    const int ts = require_uniform_tstar(p, "twfe");
    std::vector<int> pre(static_cast<size_t>(ts)), post(static_cast<size_t>(p.n_periods - ts));
    std::iota(pre.begin(), pre.end(), 1);
    std::iota(post.begin(), post.end(), ts + 1);
    const auto ny = nabla_means(p, pre, post);

    auto e = make_record(p, "twfe");
    const int n1 = p.n_treated(), n0 = p.n_control();
    double m1 = 0.0, m0 = 0.0;
    for (int j = 0; j < p.n_groups; ++j) (p.treated[j] ? m1 : m0) += ny[j];
    m1 /= n1;
    m0 /= n0;
    e.alpha_hat = m1 - m0;
    for (int j = 0; j < p.n_groups; ++j) {
        e.what[j] = ny[j] - (p.treated[j] ? m1 : m0);
        e.participates[j] = true;
    }
    e.n_treated_eff = n1;
    e.n_control_eff = n0;
    Comparison c;
    c.pre_period = ts;
    c.post_period = ts + 1;  // summary: windows are {1..t*} vs {t*+1..T}
    c.n_switchers = n1;
    c.n_comparison = n0;
    e.comparisons.push_back(c);
    return e;
}

TwfeFit fit_twfe_ols(const PanelData& p) {
    const int N = p.n_groups, T = p.n_periods;
    const size_t NT = static_cast<size_t>(N) * T;
    TwfeFit fit;
    fit.n_params = N + T;
    fit.xt.resize(NT);
    fit.resid.resize(NT);

    // within transform (balanced panel: exact in one pass)
    std::vector<double> xrow(static_cast<size_t>(N), 0.0), xcol(static_cast<size_t>(T), 0.0);
    std::vector<double> yrow(static_cast<size_t>(N), 0.0), ycol(static_cast<size_t>(T), 0.0);
    double xall = 0.0, yall = 0.0;
    for (int j = 0; j < N; ++j) {
        for (int t = 0; t < T; ++t) {
            const double x = (p.treated[j] && t + 1 > p.treat_start[j]) ? 1.0 : 0.0;
            const double y = p.y(j, t);
            xrow[j] += x;
            xcol[t] += x;
            xall += x;
            yrow[j] += y;
            ycol[t] += y;
            yall += y;
        }
    }
    for (int j = 0; j < N; ++j) {
        xrow[j] /= T;
        yrow[j] /= T;
    }
    for (int t = 0; t < T; ++t) {
        xcol[t] /= N;
        ycol[t] /= N;
    }
    xall /= static_cast<double>(NT);
    yall /= static_cast<double>(NT);

    double sxx = 0.0, sxy = 0.0;
    for (int j = 0; j < N; ++j) {
        for (int t = 0; t < T; ++t) {
            const double x = ((p.treated[j] && t + 1 > p.treat_start[j]) ? 1.0 : 0.0) - xrow[j] -
                             xcol[t] + xall;
            const double y = p.y(j, t) - yrow[j] - ycol[t] + yall;
            fit.xt[static_cast<size_t>(j) * T + t] = x;
            fit.resid[static_cast<size_t>(j) * T + t] = y;  // y-tilde for now
            sxx += x * x;
            sxy += x * y;
        }
    }
    require(sxx > 0.0, "NO_TREATED", "treatment indicator has no within variation");
    fit.sxx = sxx;
    fit.alpha_hat = sxy / sxx;
    for (size_t k = 0; k < NT; ++k) fit.resid[k] -= fit.alpha_hat * fit.xt[k];
    return fit;
}

EstimateRecord twfe_ols(const PanelData& p) {
    validate_panel(p);
    const auto fit = fit_twfe_ols(p);
    auto e = make_record(p, "twfe");
    e.alpha_hat = fit.alpha_hat;
    std::vector<double> infl(static_cast<size_t>(p.n_groups), 0.0);
    for (int j = 0; j < p.n_groups; ++j) {
        double s = 0.0;
        for (int t = 0; t < p.n_periods; ++t)
            s += fit.xt[static_cast<size_t>(j) * p.n_periods + t] *
                 fit.resid[static_cast<size_t>(j) * p.n_periods + t];
        infl[j] = s / fit.sxx;
        e.participates[j] = true;
    }
    store_influences(e, infl);
    return e;
}

EstimateRecord first_difference(const PanelData& p) {
    validate_panel(p);
    const int ts = require_uniform_tstar(p, "first_difference");
    require(p.n_periods >= ts + 1, "BAD_TSTAR", "need an observation at t*+1");

    auto e = make_record(p, "fd");
    std::vector<int> tr, co;
    for (int j = 0; j < p.n_groups; ++j) (p.treated[j] ? tr : co).push_back(j);
    std::vector<double> infl(static_cast<size_t>(p.n_groups), 0.0);
    e.alpha_hat = did_cell(p, ts + 1, ts, tr, co, 1.0, infl);
    for (int j = 0; j < p.n_groups; ++j) e.participates[j] = true;
    store_influences(e, infl);
    Comparison c;
    c.pre_period = ts;
    c.post_period = ts + 1;
    c.weight = 1.0;
    c.n_switchers = e.n_treated_eff;
    c.n_comparison = e.n_control_eff;
    e.comparisons.push_back(c);
    return e;
}

namespace {

// switch dates and cohort membership for staggered panels
std::map<int, std::vector<int>> cohorts_by_tstar(const PanelData& p) {
    std::map<int, std::vector<int>> m;
    for (int j = 0; j < p.n_groups; ++j)
        if (p.treated[j]) m[p.treat_start[j]].push_back(j);
    return m;
}

std::vector<int> comparison_set(const PanelData& p, int untreated_through,
                                bool allow_not_yet_treated) {
    std::vector<int> out;
    for (int j = 0; j < p.n_groups; ++j) {
        if (!p.treated[j]) {
            out.push_back(j);
        } else if (allow_not_yet_treated && p.treat_start[j] >= untreated_through) {
            out.push_back(j);
        }
    }
    return out;
}

}  // namespace

EstimateRecord switcher_did(const PanelData& p, bool allow_not_yet_treated) {
    validate_panel(p);
    const auto cohorts = cohorts_by_tstar(p);
    double total_switchers = 0.0;
    for (const auto& [s, js] : cohorts) total_switchers += static_cast<double>(js.size());

    auto e = make_record(p, "switcher");
    std::vector<double> infl(static_cast<size_t>(p.n_groups), 0.0);
    e.alpha_hat = 0.0;
    for (const auto& [s, js] : cohorts) {
        require(s + 1 <= p.n_periods, "NO_COMPARISON_GROUP",
                "no period t*+1 for switch date " + std::to_string(s));
        auto comp = comparison_set(p, s + 1, allow_not_yet_treated);
        if (comp.empty()) {
            fail("NO_COMPARISON_GROUP",
                 "no untreated comparison group at switch date " + std::to_string(s));
        }
        const double w = static_cast<double>(js.size()) / total_switchers;
        e.alpha_hat += w * did_cell(p, s + 1, s, js, comp, w, infl);
        for (int j : js) e.participates[j] = true;
        for (int j : comp) e.participates[j] = true;
        Comparison c;
        c.pre_period = s;
        c.post_period = s + 1;
        c.weight = w;
        c.n_switchers = static_cast<int>(js.size());
        c.n_comparison = static_cast<int>(comp.size());
        e.comparisons.push_back(c);
    }
    store_influences(e, infl);
    return e;
}

EstimateRecord long_difference(const PanelData& p, int max_horizon, bool allow_not_yet_treated) {
    validate_panel(p);
    require(max_horizon >= 0, "HORIZON_UNAVAILABLE", "max horizon must be >= 0");
    const auto cohorts = cohorts_by_tstar(p);

    auto e = make_record(p, "longdiff");
    std::vector<double> infl(static_cast<size_t>(p.n_groups), 0.0);
    const double cells =
        static_cast<double>(cohorts.size()) * static_cast<double>(max_horizon + 1);
    e.alpha_hat = 0.0;
    for (const auto& [s, js] : cohorts) {
        for (int l = 0; l <= max_horizon; ++l) {
            const int post = s + l + 1;
            if (post > p.n_periods) {
                fail("HORIZON_UNAVAILABLE", "cohort t*=" + std::to_string(s) +
                                                " lacks horizon l=" + std::to_string(l));
            }
            auto comp = comparison_set(p, post, allow_not_yet_treated);
            if (comp.empty()) {
                fail("NO_COMPARISON_GROUP",
                     "no untreated comparison group for cohort t*=" + std::to_string(s) +
                         " at horizon " + std::to_string(l));
            }
            const double w = 1.0 / cells;
            e.alpha_hat += w * did_cell(p, post, s, js, comp, w, infl);
            for (int j : js) e.participates[j] = true;
            for (int j : comp) e.participates[j] = true;
            Comparison c;
            c.pre_period = s;
            c.post_period = post;
            c.weight = w;
            c.n_switchers = static_cast<int>(js.size());
            c.n_comparison = static_cast<int>(comp.size());
            e.comparisons.push_back(c);
        }
    }
    store_influences(e, infl);
    return e;
}

EstimateRecord pretest_coefficient(const PanelData& p, int s, int base) {
    validate_panel(p);
    int min_tstar = p.n_periods;
    for (int j = 0; j < p.n_groups; ++j)
        if (p.treated[j]) min_tstar = std::min(min_tstar, p.treat_start[j]);
    require(s >= 1 && base >= 1 && s != base, "EMPTY_WINDOW", "need two distinct pre periods");
    if (s > min_tstar || base > min_tstar) {
        fail("POST_PERIOD_IN_PRETEST", "periods " + std::to_string(s) + "," +
                                           std::to_string(base) +
                                           " must both be <= t*=" + std::to_string(min_tstar));
    }

    auto e = make_record(p, "placebo_pre");
    std::vector<int> tr, co;
    for (int j = 0; j < p.n_groups; ++j) (p.treated[j] ? tr : co).push_back(j);
    std::vector<double> infl(static_cast<size_t>(p.n_groups), 0.0);
    e.alpha_hat = did_cell(p, s, base, tr, co, 1.0, infl);
    for (int j = 0; j < p.n_groups; ++j) e.participates[j] = true;
    store_influences(e, infl);
    Comparison c;
    c.pre_period = base;
    c.post_period = s;
    c.n_switchers = static_cast<int>(tr.size());
    c.n_comparison = static_cast<int>(co.size());
    e.comparisons.push_back(c);
    return e;
}

}  // namespace didlab
