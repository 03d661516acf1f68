#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace didlab {

/// Balanced group x time outcome panel with a treatment design.
///
/// Periods are 1-based in every user-facing interface (CLI, CSV, errors);
/// internally outcomes are stored dense and row-major, one row per group.
/// treat_start[j] = s means group j is treated in periods t > s, i.e. it has
/// s pre-treatment periods. Controls carry treat_start = 0.
///
/// PanelData is immutable after construction; all operations on it are pure.
struct PanelData {
    int n_groups = 0;
    int n_periods = 0;
    std::vector<double> outcomes;      // n_groups * n_periods, row-major
    std::vector<bool> treated;         // D_j
    std::vector<int> treat_start;      // t*, 1..T-1 for treated, 0 for controls
    std::vector<std::string> group_ids;
    std::vector<std::string> time_ids;

    double y(int g, int t) const { return outcomes[static_cast<size_t>(g) * n_periods + t]; }
    double& y(int g, int t) { return outcomes[static_cast<size_t>(g) * n_periods + t]; }
    std::span<const double> row(int g) const {
        return {outcomes.data() + static_cast<size_t>(g) * n_periods,
                static_cast<size_t>(n_periods)};
    }

    int n_treated() const;
    int n_control() const;

    /// Common t* if all treated groups share one, otherwise nullopt.
    std::optional<int> uniform_tstar() const;
};

/// Unit-level rows prior to aggregation. weight defaults to 1.
struct MicroRow {
    std::string unit;
    std::string group;
    std::string time;
    double outcome = 0.0;
    double weight = 1.0;
};

struct MicroPanel {
    std::vector<MicroRow> rows;
};

/// Throws Error{UNBALANCED, NO_TREATED, NO_CONTROL, BAD_TSTAR} naming the
/// offending group/period.
void validate_panel(const PanelData& p);

/// Per-group post-minus-pre means: mean over post_set minus mean over pre_set.
/// Period indices are 1-based. Throws EMPTY_WINDOW.
std::vector<double> nabla_means(const PanelData& p, std::span<const int> pre_set,
                                std::span<const int> post_set);

/// Weighted per-cell means of a MicroPanel; output panel has no treatment
/// design (all controls) unless set later. Throws EMPTY_CELL if a (group,time)
/// combination in the label cross product has no units.
PanelData aggregate_micro(const MicroPanel& m);

/// Result of loading a CSV that may be a group panel or a micro panel,
/// decided by the header (presence of a `unit` column).
struct LoadedCsv {
    std::optional<PanelData> panel;
    std::optional<MicroPanel> micro;
    // optional per-group label columns, keyed like the group ids
    std::vector<std::string> cluster_of_group;  // empty if no `cluster` column
    std::vector<std::string> cohort_of_group;   // empty if no `cohort` column
};

/// Group schema: group,time,outcome[,treated,treat_start][,cluster][,cohort]
/// Micro schema: unit,group,time,outcome[,weight]
/// UTF-8, header required, '.' decimal separator.
/// Throws PARSE_ERROR (with row number), SCHEMA_ERROR, DATA_NOT_FOUND.
LoadedCsv load_panel_csv(const std::string& path);

/// Writes the group-panel schema (with treated/treat_start columns).
void write_panel_csv(const PanelData& p, const std::string& path);

}  // namespace didlab
