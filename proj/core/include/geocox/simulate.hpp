#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "geocox/cohort.hpp"
#include "geocox/cox.hpp"
#include "geocox/graph.hpp"
#include "geocox/weights.hpp"

namespace geocox {

enum class ScenarioKind { null_effects, coordinate, graph_distance };

const char* scenario_name(ScenarioKind k);
ScenarioKind scenario_from_name(const std::string& name);

/// Truth-generating configuration for synthetic spatial survival cohorts.
struct SimScenario {
    ScenarioKind kind = ScenarioKind::null_effects;
    Eigen::Vector3d base_beta{0.7, 0.5, -0.8};
    double coordinate_slope = 0.15;  // per degree of centered (lat + lon)
    double graph_slope = 0.12;       // per hop of centered baseline distance
    std::string baseline_label = "St. Charles";
    double baseline_hazard = 0.03;
    double censor_cap = 60.0;        // point mass, and upper end of the uniform branch
    double censor_point_prob = 0.9;
    int county_size_min = 30;
    int county_size_max = 40;
    double black_prob = 0.3;
    double married_prob = 0.7;

    static SimScenario make(ScenarioKind kind);
};

/// J x 3 matrix of true coefficients per location, by scenario:
///   null:           every row equals base_beta;
///   coordinate:     base + slope * (lat - mean lat + lon - mean lon);
///   graph_distance: base + slope * (d(l, baseline) - mean over other
///                   locations of d(., baseline)), with d the hop count.
/// The same scalar offset shifts all three components of a row.
Eigen::MatrixXd scenario_betas(const SimScenario& scenario, const SpatialGraph& graph,
                               const DistanceMatrix& graph_dmat);

/// Draws one cohort: county sizes uniform on [size_min, size_max] (or the
/// explicit sizes, all >= 1), covariates (normal, Bernoulli(0.3),
/// Bernoulli(0.7)), event times from the proportional-hazards inverse
/// transform, and the censoring mixture. Bit-deterministic given the seed.
Cohort simulate_cohort(const Eigen::MatrixXd& truths, const SimScenario& scenario,
                       const SpatialGraph& graph, std::uint64_t seed,
                       const std::vector<int>* county_sizes = nullptr);

/// Fraction of censored subjects.
double censoring_fraction(const Cohort& cohort);

struct MetricsRow {
    std::string variant;   // variant label, bandwidth included where applicable
    int coefficient = 0;   // 0-based
    double mab = 0.0;
    double msd = 0.0;
    double mmse = 0.0;
    double mcp = 0.0;
    int counties_used = 0;   // counties entering the outer average
    long failed_cells = 0;   // (county, replicate) cells dropped for failed fits
};

struct MetricsTable {
    std::vector<MetricsRow> rows;
    int replicates = 0;
};

/// County-averaged absolute bias, sampling SD (divisor r-1), mean squared
/// error, and 95% normal-interval coverage. estimates[r] and ses[r] are
/// J x p matrices; NaN cells (failed fits) are dropped from the inner
/// averages and counties without enough valid replicates from the outer one.
MetricsTable compute_metrics(const std::vector<Eigen::MatrixXd>& estimates,
                             const std::vector<Eigen::MatrixXd>& ses,
                             const Eigen::MatrixXd& truths,
                             const std::string& variant_label = "model");

enum class VariantKind { local, global, weighted };

/// One model column of the study: local (within-county fits), global
/// (unweighted, all observations), or a geographically weighted scheme whose
/// bandwidth sweeps the study grid.
struct ModelVariant {
    std::string name;
    VariantKind kind = VariantKind::weighted;
    WeightScheme scheme;       // weighted variants; bandwidth is overwritten per grid point
    bool tic_select = false;   // record per-replicate criterion selections
};

/// Smallest normalized great-circle threshold whose closed-ball adjacency has
/// the same number of off-diagonal 1-entries as the hop-count adjacency.
double matched_adjacency_threshold(const DistanceMatrix& graph_dmat,
                                   const DistanceMatrix& gcd_dmat);

/// The standard comparison set: local, global, the graph-hop stochastic
/// neighborhood scheme, and normalized great-circle schemes at thresholds
/// 0.5, 1, 2 and the matched value.
std::vector<ModelVariant> standard_variants(const DistanceMatrix& graph_dmat,
                                            const DistanceMatrix& gcd_dmat);

struct EstimateRecord {
    int replicate = 0;
    int county = 0;
    int coefficient = 0;
    double estimate = 0.0;
    double se = 0.0;
    std::string variant;
    double h = 0.0; // NaN for local/global
};

struct StudyResult {
    MetricsTable metrics;
    struct Selection {
        std::string variant;
        std::map<double, int> counts; // h -> times selected
        double modal_h = 0.0;         // most frequent, ties toward smaller h
    };
    std::vector<Selection> selections;
    long failed_fits = 0;
    std::vector<EstimateRecord> estimates; // populated when keep_estimates
};

struct StudyConfig {
    int replicates = 100;
    std::uint64_t base_seed = 20240501;
    std::vector<double> grid{0.5, 1, 5, 10, 25, 50};
    FitOptions fit;
    unsigned threads = 0;
    bool keep_estimates = false;
};

/// Replicated study over all variants. Replicate r draws its cohort from the
/// substream (base_seed, r); estimates are aggregated in replicate order, so
/// the result is bit-identical for any worker count. For variants with
/// tic_select, metrics are reported at every grid bandwidth plus the modal
/// selected one.
StudyResult run_study(const SimScenario& scenario, const SpatialGraph& graph,
                      const DistanceMatrix& graph_dmat, const DistanceMatrix& gcd_dmat,
                      const std::vector<ModelVariant>& variants, const StudyConfig& config);

} // namespace geocox
