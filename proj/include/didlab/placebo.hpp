#pragma once

#include "didlab/panel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace didlab::placebo {

enum class Scheme { UnitRandom, ClusterRandom };

/// Placebo audit: randomized placebo interventions on a user panel, swept
/// over the distance delta between the pre and post period.
struct PlaceboPlan {
    PanelData panel;                        // group-level panel (aggregate first)
    std::vector<std::string> cluster_of_group;
    std::vector<std::string> cohort_of_group;  // two-dimension sweeps only
    Scheme scheme = Scheme::ClusterRandom;
    double unit_p = 0.5;                    // treated share under UnitRandom
    std::vector<int> deltas;                // numeric period distances
    std::vector<int> group_deltas;          // cohort distances (two-dimension)
    int reps_per_cell = 1;
    double level = 0.05;
    int min_per_arm = 20;                   // minimum groups per cluster/cohort
    std::uint64_t seed = 1;
};

/// One admissible (pair, period-pair) combination.
struct DesignCell {
    int delta = 0;
    int group_delta = 0;     // two-dimension sweeps only
    int pre_idx = 0;         // 0-based period index
    int post_idx = 0;
    int a = 0;               // cluster (or cohort) pair, indices into the label list
    int b = 0;
};

/// Every admissible combination at each delta; cells whose arms fall below
/// min_per_arm are dropped. Throws NO_CELLS when nothing remains.
std::vector<DesignCell> enumerate_designs(const PlaceboPlan& plan);

struct CurvePoint {
    int delta = 0;
    std::string scheme;
    double reject_rate = 0.0;
    double mc_se = 0.0;
    long n_cells = 0;
    long n_tests = 0;
};

/// Rejection-rate curve by delta for the plan's assignment scheme.
std::vector<CurvePoint> run_placebo(const PlaceboPlan& plan, int workers = 0);

struct SurfacePoint {
    int delta_time = 0;
    int delta_group = 0;
    double reject_rate = 0.0;
    double mc_se = 0.0;
    long n_cells = 0;
    long n_tests = 0;
};

/// Rejection surface over (delta_time, delta_group): cohort pairs at each
/// group distance, one cohort treated at random, errors clustered at the
/// `cluster` labels.
std::vector<SurfacePoint> run_two_dimension_placebo(const PlaceboPlan& plan, int workers = 0);

}  // namespace didlab::placebo
