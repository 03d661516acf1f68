#include "didlab/panel.hpp"

#include "didlab/common.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace didlab {

int PanelData::n_treated() const {
    return static_cast<int>(std::count(treated.begin(), treated.end(), true));
}

int PanelData::n_control() const { return n_groups - n_treated(); }

std::optional<int> PanelData::uniform_tstar() const {
    std::optional<int> ts;
    for (int g = 0; g < n_groups; ++g) {
        if (!treated[g]) continue;
        if (!ts) {
            ts = treat_start[g];
        } else if (*ts != treat_start[g]) {
            return std::nullopt;
        }
    }
    return ts;
}

void validate_panel(const PanelData& p) {
    require(p.n_groups >= 2 && p.n_periods >= 2, "UNBALANCED",
            "panel needs at least 2 groups and 2 periods");
    require(p.outcomes.size() == static_cast<size_t>(p.n_groups) * p.n_periods, "UNBALANCED",
            "outcome matrix size does not match N x T");
    for (int g = 0; g < p.n_groups; ++g) {
        for (int t = 0; t < p.n_periods; ++t) {
            if (!std::isfinite(p.y(g, t))) {
                fail("UNBALANCED", "missing or non-finite outcome for group " + p.group_ids[g] +
                                       " period " + p.time_ids[t]);
            }
        }
    }
    const int n1 = p.n_treated();
    require(n1 >= 1, "NO_TREATED", "panel has no treated group");
    require(n1 < p.n_groups, "NO_CONTROL", "panel has no control group");
    for (int g = 0; g < p.n_groups; ++g) {
        if (!p.treated[g]) continue;
        const int ts = p.treat_start[g];
        if (ts < 1 || ts > p.n_periods - 1) {
            fail("BAD_TSTAR", "group " + p.group_ids[g] + " has treat_start " +
                                  std::to_string(ts) + ", needs 1.." +
                                  std::to_string(p.n_periods - 1));
        }
    }
}

std::vector<double> nabla_means(const PanelData& p, std::span<const int> pre_set,
                                std::span<const int> post_set) {
    require(!pre_set.empty() && !post_set.empty(), "EMPTY_WINDOW",
            "pre and post windows must be non-empty");
    for (int t : pre_set) {
        require(t >= 1 && t <= p.n_periods, "EMPTY_WINDOW",
                "pre period " + std::to_string(t) + " out of range");
        for (int s : post_set)
            require(s != t, "EMPTY_WINDOW", "windows overlap at period " + std::to_string(t));
    }
    for (int t : post_set)
        require(t >= 1 && t <= p.n_periods, "EMPTY_WINDOW",
                "post period " + std::to_string(t) + " out of range");

    std::vector<double> out(p.n_groups);
    for (int g = 0; g < p.n_groups; ++g) {
        double pre = 0.0, post = 0.0;
        for (int t : pre_set) pre += p.y(g, t - 1);
        for (int t : post_set) post += p.y(g, t - 1);
        out[g] = post / static_cast<double>(post_set.size()) -
                 pre / static_cast<double>(pre_set.size());
    }
    return out;
}

namespace {
bool natural_less(const std::string& a, const std::string& b);
}

PanelData aggregate_micro(const MicroPanel& m) {
    require(!m.rows.empty(), "EMPTY_CELL", "micro panel has no rows");
    std::vector<std::string> groups, times;
    std::map<std::string, int> gidx, tidx;
    for (const auto& r : m.rows) {
        if (gidx.emplace(r.group, 0).second) groups.push_back(r.group);
        if (tidx.emplace(r.time, 0).second) times.push_back(r.time);
    }
    std::sort(groups.begin(), groups.end(), natural_less);
    std::sort(times.begin(), times.end(), natural_less);
    for (size_t i = 0; i < groups.size(); ++i) gidx[groups[i]] = static_cast<int>(i);
    for (size_t i = 0; i < times.size(); ++i) tidx[times[i]] = static_cast<int>(i);

    const int N = static_cast<int>(groups.size());
    const int T = static_cast<int>(times.size());
    std::vector<double> wsum(static_cast<size_t>(N) * T, 0.0);
    std::vector<double> ysum(static_cast<size_t>(N) * T, 0.0);
    for (const auto& r : m.rows) {
        require(r.weight > 0.0, "EMPTY_CELL", "non-positive weight for unit " + r.unit);
        const size_t k = static_cast<size_t>(gidx[r.group]) * T + tidx[r.time];
        wsum[k] += r.weight;
        ysum[k] += r.weight * r.outcome;
    }

    PanelData p;
    p.n_groups = N;
    p.n_periods = T;
    p.group_ids = groups;
    p.time_ids = times;
    p.treated.assign(N, false);
    p.treat_start.assign(N, 0);
    p.outcomes.resize(static_cast<size_t>(N) * T);
    for (int g = 0; g < N; ++g) {
        for (int t = 0; t < T; ++t) {
            const size_t k = static_cast<size_t>(g) * T + t;
            if (wsum[k] <= 0.0) {
                fail("EMPTY_CELL",
                     "no units in cell (" + groups[g] + "," + times[t] + ")");
            }
            p.outcomes[k] = ysum[k] / wsum[k];
        }
    }
    return p;
}

namespace {

// order labels numerically when they embed numbers ("t2" < "t10");
// keeps CSV round-trips stable for generated panels
bool natural_less(const std::string& a, const std::string& b) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
        const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
        if (da && db) {
            size_t i2 = i, j2 = j;
            while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
            while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
            const std::string na = a.substr(i, i2 - i), nb = b.substr(j, j2 - j);
            const std::string ta = na.substr(na.find_first_not_of('0') == std::string::npos
                                                 ? na.size() - 1
                                                 : na.find_first_not_of('0'));
            const std::string tb = nb.substr(nb.find_first_not_of('0') == std::string::npos
                                                 ? nb.size() - 1
                                                 : nb.find_first_not_of('0'));
            if (ta.size() != tb.size()) return ta.size() < tb.size();
            if (ta != tb) return ta < tb;
            i = i2;
            j = j2;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() - i < b.size() - j;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, int row, const std::string& col) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) {
        fail("PARSE_ERROR", "row " + std::to_string(row) + ": bad numeric value '" + s +
                                "' in column " + col);
    }
    return v;
}

int parse_int(const std::string& s, int row, const std::string& col) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        fail("PARSE_ERROR", "row " + std::to_string(row) + ": bad integer '" + s +
                                "' in column " + col);
    }
    return v;
}

}  // namespace

LoadedCsv load_panel_csv(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "DATA_NOT_FOUND", "cannot open " + path);

    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "SCHEMA_ERROR", "empty file " + path);
    auto header = split_csv_line(line);
    std::map<std::string, int> col;
    for (size_t i = 0; i < header.size(); ++i) col[header[i]] = static_cast<int>(i);

    auto need = [&](const char* name) {
        auto it = col.find(name);
        if (it == col.end()) fail("SCHEMA_ERROR", std::string("missing column `") + name + "`");
        return it->second;
    };
    auto maybe = [&](const char* name) -> std::optional<int> {
        auto it = col.find(name);
        if (it == col.end()) return std::nullopt;
        return it->second;
    };

    LoadedCsv out;
    const bool is_micro = col.count("unit") > 0;

    if (is_micro) {
        const int cu = need("unit"), cg = need("group"), ct = need("time"), cy = need("outcome");
        const auto cw = maybe("weight");
        MicroPanel m;
        int row = 1;
        while (std::getline(in, line)) {
            ++row;
            if (line.empty()) continue;
            auto f = split_csv_line(line);
            require(f.size() == header.size(), "PARSE_ERROR",
                    "row " + std::to_string(row) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(f.size()));
            MicroRow r;
            r.unit = f[cu];
            r.group = f[cg];
            r.time = f[ct];
            r.outcome = parse_double(f[cy], row, "outcome");
            if (cw) r.weight = parse_double(f[*cw], row, "weight");
            m.rows.push_back(std::move(r));
        }
        require(!m.rows.empty(), "PARSE_ERROR", "no data rows in " + path);
        out.micro = std::move(m);
        return out;
    }

    const int cg = need("group"), ct = need("time"), cy = need("outcome");
    const auto ctr = maybe("treated");
    const auto cts = maybe("treat_start");
    const auto ccl = maybe("cluster");
    const auto cco = maybe("cohort");

    struct Cell {
        double y;
        int row;
    };
    const auto nl = [](const std::string& x, const std::string& y) { return natural_less(x, y); };
    std::map<std::string, std::map<std::string, Cell>, decltype(nl)> table(nl);
    std::map<std::string, bool> gtreated;
    std::map<std::string, int> gstart;
    std::map<std::string, std::string> gcluster, gcohort;
    std::set<std::string, decltype(nl)> times(nl);

    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        require(f.size() == header.size(), "PARSE_ERROR",
                "row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                    " fields, got " + std::to_string(f.size()));
        const std::string& g = f[cg];
        const std::string& t = f[ct];
        if (table[g].count(t)) {
            fail("PARSE_ERROR", "row " + std::to_string(row) + ": duplicate cell (" + g + "," +
                                    t + ")");
        }
        table[g][t] = {parse_double(f[cy], row, "outcome"), row};
        times.insert(t);
        bool tr = false;
        if (ctr) {
            const std::string& s = f[*ctr];
            if (s == "1" || s == "true") {
                tr = true;
            } else if (s != "0" && s != "false" && !s.empty()) {
                fail("PARSE_ERROR", "row " + std::to_string(row) + ": bad treated flag '" + s + "'");
            }
        }
        auto it = gtreated.find(g);
        if (it != gtreated.end() && it->second != tr) {
            fail("PARSE_ERROR",
                 "row " + std::to_string(row) + ": treated flag changes within group " + g);
        }
        gtreated[g] = tr;
        if (cts && tr) gstart[g] = parse_int(f[*cts], row, "treat_start");
        if (ccl) gcluster[g] = f[*ccl];
        if (cco) gcohort[g] = f[*cco];
    }
    require(!table.empty(), "PARSE_ERROR", "no data rows in " + path);

    PanelData p;
    p.n_groups = static_cast<int>(table.size());
    p.n_periods = static_cast<int>(times.size());
    p.time_ids.assign(times.begin(), times.end());
    p.outcomes.assign(static_cast<size_t>(p.n_groups) * p.n_periods,
                      std::numeric_limits<double>::quiet_NaN());
    for (const auto& [g, cells] : table) {
        p.group_ids.push_back(g);
        for (int t = 0; t < p.n_periods; ++t) {
            auto it = cells.find(p.time_ids[t]);
            if (it == cells.end()) {
                fail("UNBALANCED", "group " + g + " is missing period " + p.time_ids[t]);
            }
            p.outcomes[(p.group_ids.size() - 1) * p.n_periods + t] = it->second.y;
        }
        p.treated.push_back(gtreated[g]);
        p.treat_start.push_back(gtreated[g] ? gstart.count(g) ? gstart[g] : 0 : 0);
        if (ccl) out.cluster_of_group.push_back(gcluster[g]);
        if (cco) out.cohort_of_group.push_back(gcohort[g]);
    }
    if (ctr) {
        // a treated column implies a full design; infer t* = 1 when absent
        for (int g = 0; g < p.n_groups; ++g) {
            if (p.treated[g] && p.treat_start[g] == 0) p.treat_start[g] = 1;
        }
        validate_panel(p);
    }
    out.panel = std::move(p);
    return out;
}

void write_panel_csv(const PanelData& p, const std::string& path) {
    std::ofstream f(path);
    require(f.good(), "DATA_NOT_FOUND", "cannot write " + path);
    f << "group,time,outcome,treated,treat_start\n";
    f.precision(17);
    for (int g = 0; g < p.n_groups; ++g) {
        for (int t = 0; t < p.n_periods; ++t) {
            f << p.group_ids[g] << ',' << p.time_ids[t] << ',' << p.y(g, t) << ','
              << (p.treated[g] ? 1 : 0) << ',' << p.treat_start[g] << '\n';
        }
    }
    require(f.good(), "DATA_NOT_FOUND", "write failure on " + path);
}

}  // namespace didlab
