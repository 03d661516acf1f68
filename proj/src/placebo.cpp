#include "didlab/placebo.hpp"

#include "didlab/common.hpp"
#include "didlab/estimators.hpp"
#include "didlab/montecarlo.hpp"
#include "didlab/rng.hpp"
#include "didlab/stats.hpp"
#include "didlab/variance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace didlab::placebo {

namespace {

double numeric_label(const std::string& s, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        fail("PARSE_ERROR", std::string(what) + " label '" + s + "' is not numeric");
    }
    return v;
}

// distinct labels in panel order -> label index per group
std::vector<int> index_labels(const std::vector<std::string>& of_group,
                              std::vector<std::string>& labels) {
    std::map<std::string, int> seen;
    std::vector<int> idx(of_group.size());
    for (size_t j = 0; j < of_group.size(); ++j) {
        auto it = seen.find(of_group[j]);
        if (it == seen.end()) {
            it = seen.emplace(of_group[j], static_cast<int>(labels.size())).first;
            labels.push_back(of_group[j]);
        }
        idx[j] = it->second;
    }
    return idx;
}

std::vector<std::pair<int, int>> period_pairs(const PanelData& p, int delta) {
    std::vector<double> tv(static_cast<size_t>(p.n_periods));
    for (int t = 0; t < p.n_periods; ++t) tv[t] = numeric_label(p.time_ids[t], "time");
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < p.n_periods; ++i) {
        for (int j = i + 1; j < p.n_periods; ++j) {
            if (std::abs(tv[j] - tv[i] - delta) < 1e-9) out.emplace_back(i, j);
        }
    }
    return out;
}

// panel restricted to two periods and the groups listed, treated flags off
PanelData subpanel(const PanelData& p, const std::vector<int>& groups, int pre_idx,
                   int post_idx) {
    PanelData s;
    s.n_groups = static_cast<int>(groups.size());
    s.n_periods = 2;
    s.outcomes.resize(static_cast<size_t>(s.n_groups) * 2);
    s.treated.assign(static_cast<size_t>(s.n_groups), false);
    s.treat_start.assign(static_cast<size_t>(s.n_groups), 0);
    s.group_ids.resize(static_cast<size_t>(s.n_groups));
    s.time_ids = {p.time_ids[pre_idx], p.time_ids[post_idx]};
    for (size_t k = 0; k < groups.size(); ++k) {
        s.group_ids[k] = p.group_ids[groups[k]];
        s.y(static_cast<int>(k), 0) = p.y(groups[k], pre_idx);
        s.y(static_cast<int>(k), 1) = p.y(groups[k], post_idx);
    }
    return s;
}

}  // namespace

std::vector<DesignCell> enumerate_designs(const PlaceboPlan& plan) {
    require(!plan.deltas.empty(), "NO_CELLS", "plan has no deltas");
    require(plan.cluster_of_group.size() == static_cast<size_t>(plan.panel.n_groups),
            "DIM_MISMATCH", "cluster labels must cover every group");

    std::vector<std::string> labels;
    const auto cl_idx = index_labels(plan.cluster_of_group, labels);
    const int C = static_cast<int>(labels.size());
    std::vector<int> size_of(static_cast<size_t>(C), 0);
    for (int j = 0; j < plan.panel.n_groups; ++j) ++size_of[cl_idx[j]];

    std::vector<DesignCell> cells;
    for (int delta : plan.deltas) {
        const auto pairs = period_pairs(plan.panel, delta);
        for (int a = 0; a < C; ++a) {
            if (size_of[a] < plan.min_per_arm) continue;
            for (int b = a + 1; b < C; ++b) {
                if (size_of[b] < plan.min_per_arm) continue;
                for (const auto& [pre, post] : pairs) {
                    DesignCell c;
                    c.delta = delta;
                    c.pre_idx = pre;
                    c.post_idx = post;
                    c.a = a;
                    c.b = b;
                    cells.push_back(c);
                }
            }
        }
    }
    require(!cells.empty(), "NO_CELLS", "no admissible (cluster pair, period pair) cells");
    return cells;
}

std::vector<CurvePoint> run_placebo(const PlaceboPlan& plan, int workers) {
    require(plan.reps_per_cell >= 1, "NO_CELLS", "reps_per_cell must be >= 1");
    const auto cells = enumerate_designs(plan);

    std::vector<std::string> labels;
    const auto cl_idx = index_labels(plan.cluster_of_group, labels);
    std::vector<std::vector<int>> members(labels.size());
    for (int j = 0; j < plan.panel.n_groups; ++j) members[cl_idx[j]].push_back(j);

    const long tests = static_cast<long>(cells.size()) * plan.reps_per_cell;
    std::vector<unsigned char> rej(static_cast<size_t>(tests));

    mc::parallel_for(tests, workers, [&](long i) {
        const auto& cell = cells[i / plan.reps_per_cell];
        const long rep = i % plan.reps_per_cell;
        RngStream rng(derive_seed(plan.seed, static_cast<std::uint64_t>(i / plan.reps_per_cell)),
                      static_cast<std::uint64_t>(rep));

        std::vector<int> groups = members[cell.a];
        groups.insert(groups.end(), members[cell.b].begin(), members[cell.b].end());
        auto sp = subpanel(plan.panel, groups, cell.pre_idx, cell.post_idx);

        if (plan.scheme == Scheme::ClusterRandom) {
            const bool first_treated = rng.uniform() < 0.5;
            const size_t na = members[cell.a].size();
            for (size_t k = 0; k < groups.size(); ++k) {
                const bool in_a = k < na;
                if (in_a == first_treated) {
                    sp.treated[k] = true;
                    sp.treat_start[k] = 1;
                }
            }
        } else {
            while (true) {
                int n1 = 0;
                for (size_t k = 0; k < groups.size(); ++k) {
                    const bool tr = rng.uniform() < plan.unit_p;
                    sp.treated[k] = tr;
                    sp.treat_start[k] = tr ? 1 : 0;
                    n1 += tr;
                }
                if (n1 >= 2 && n1 <= static_cast<int>(groups.size()) - 2) break;
            }
        }
        const auto est = twfe(sp);
        rej[i] = t_test(est.alpha_hat, crve_group(est), plan.level).reject ? 1 : 0;
    });

    std::vector<CurvePoint> curve;
    for (int delta : plan.deltas) {
        CurvePoint pt;
        pt.delta = delta;
        pt.scheme = plan.scheme == Scheme::ClusterRandom ? "cluster_random" : "unit_random";
        long n = 0;
        for (size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].delta != delta) continue;
            ++pt.n_cells;
            for (int r = 0; r < plan.reps_per_cell; ++r) {
                n += rej[c * plan.reps_per_cell + r];
                ++pt.n_tests;
            }
        }
        if (pt.n_tests == 0) continue;
        pt.reject_rate = static_cast<double>(n) / static_cast<double>(pt.n_tests);
        pt.mc_se = stats::mc_se(pt.reject_rate, pt.n_tests);
        curve.push_back(pt);
    }
    return curve;
}

std::vector<SurfacePoint> run_two_dimension_placebo(const PlaceboPlan& plan, int workers) {
    require(plan.cohort_of_group.size() == static_cast<size_t>(plan.panel.n_groups),
            "DIM_MISMATCH", "cohort labels must cover every group");
    require(plan.cluster_of_group.size() == static_cast<size_t>(plan.panel.n_groups),
            "DIM_MISMATCH", "cluster labels must cover every group");
    require(!plan.group_deltas.empty(), "NO_CELLS", "plan has no cohort distances");
    require(plan.reps_per_cell >= 1, "NO_CELLS", "reps_per_cell must be >= 1");

    std::vector<std::string> cohorts;
    const auto co_idx = index_labels(plan.cohort_of_group, cohorts);
    const int K = static_cast<int>(cohorts.size());
    std::vector<double> cval(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) cval[k] = numeric_label(cohorts[k], "cohort");
    std::vector<std::vector<int>> members(static_cast<size_t>(K));
    for (int j = 0; j < plan.panel.n_groups; ++j) members[co_idx[j]].push_back(j);

    // admissible cells: cohort pairs at each group distance x period pairs
    std::vector<DesignCell> cells;
    for (int dg : plan.group_deltas) {
        std::vector<std::pair<int, int>> cpairs;
        for (int a = 0; a < K; ++a) {
            for (int b = 0; b < K; ++b) {
                if (a == b) continue;
                if (std::abs(cval[b] - cval[a] - dg) < 1e-9 &&
                    static_cast<int>(members[a].size()) >= plan.min_per_arm &&
                    static_cast<int>(members[b].size()) >= plan.min_per_arm) {
                    if (a < b) cpairs.emplace_back(a, b);
                }
            }
        }
        for (int dt : plan.deltas) {
            for (const auto& [pre, post] : period_pairs(plan.panel, dt)) {
                for (const auto& [a, b] : cpairs) {
                    DesignCell c;
                    c.delta = dt;
                    c.group_delta = dg;
                    c.pre_idx = pre;
                    c.post_idx = post;
                    c.a = a;
                    c.b = b;
                    cells.push_back(c);
                }
            }
        }
    }
    require(!cells.empty(), "NO_CELLS", "no admissible (cohort pair, period pair) cells");

    const long tests = static_cast<long>(cells.size()) * plan.reps_per_cell;
    std::vector<unsigned char> rej(static_cast<size_t>(tests));

    mc::parallel_for(tests, workers, [&](long i) {
        const auto& cell = cells[i / plan.reps_per_cell];
        const long rep = i % plan.reps_per_cell;
        RngStream rng(derive_seed(plan.seed, 40000 + static_cast<std::uint64_t>(i / plan.reps_per_cell)),
                      static_cast<std::uint64_t>(rep));

        std::vector<int> groups = members[cell.a];
        groups.insert(groups.end(), members[cell.b].begin(), members[cell.b].end());
        auto sp = subpanel(plan.panel, groups, cell.pre_idx, cell.post_idx);
        std::vector<std::string> clusters(groups.size());
        for (size_t k = 0; k < groups.size(); ++k)
            clusters[k] = plan.cluster_of_group[groups[k]];

        const bool first_treated = rng.uniform() < 0.5;
        const size_t na = members[cell.a].size();
        for (size_t k = 0; k < groups.size(); ++k) {
            const bool in_a = k < na;
            if (in_a == first_treated) {
                sp.treated[k] = true;
                sp.treat_start[k] = 1;
            }
        }
        const auto est = twfe(sp);
        rej[i] = t_test(est.alpha_hat, crve_cluster(est, clusters), plan.level).reject ? 1 : 0;
    });

    std::vector<SurfacePoint> surface;
    for (int dg : plan.group_deltas) {
        for (int dt : plan.deltas) {
            SurfacePoint pt;
            pt.delta_time = dt;
            pt.delta_group = dg;
            long n = 0;
            for (size_t c = 0; c < cells.size(); ++c) {
                if (cells[c].delta != dt || cells[c].group_delta != dg) continue;
                ++pt.n_cells;
                for (int r = 0; r < plan.reps_per_cell; ++r) {
                    n += rej[c * plan.reps_per_cell + r];
                    ++pt.n_tests;
                }
            }
            if (pt.n_tests == 0) continue;
            pt.reject_rate = static_cast<double>(n) / static_cast<double>(pt.n_tests);
            pt.mc_se = stats::mc_se(pt.reject_rate, pt.n_tests);
            surface.push_back(pt);
        }
    }
    return surface;
}

}  // namespace didlab::placebo
