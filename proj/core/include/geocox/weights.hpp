#pragma once

#include <Eigen/Core>

#include <string>

#include "geocox/cohort.hpp"
#include "geocox/graph.hpp"

namespace geocox {

enum class Kernel { indicator, exponential, gaussian, bisquare, stochastic_neighborhood };

enum class WeightDistance { graph, great_circle_normalized };

/// Weights this small are clamped to zero so risk-set denominators never
/// accumulate denormals.
inline constexpr double kWeightFloor = 1e-12;

/// Declarative weighting rule: kernel family, decay bandwidth h, adjacency
/// threshold, and which distance matrix it applies to. Construct through the
/// factories, which validate the parameter combination.
struct WeightScheme {
    Kernel kernel = Kernel::stochastic_neighborhood;
    double bandwidth = 1.0; // h; used by exponential, gaussian, stochastic_neighborhood
    double threshold = 1.0; // d or d_l; used by indicator, bisquare, stochastic_neighborhood
    WeightDistance distance = WeightDistance::graph;

    static WeightScheme indicator(double threshold, WeightDistance distance);
    static WeightScheme exponential(double bandwidth, WeightDistance distance);
    static WeightScheme gaussian(double bandwidth, WeightDistance distance);
    static WeightScheme bisquare(double threshold, WeightDistance distance);
    /// Graph schemes fix the adjacency threshold at 1 hop; normalized
    /// great-circle schemes take it as a parameter.
    static WeightScheme stochastic_neighborhood(double bandwidth, WeightDistance distance,
                                                double threshold = 1.0);

    WeightScheme with_bandwidth(double h) const;
    bool uses_bandwidth() const;
    bool uses_threshold() const;
};

/// Weight of a county at distance d under the scheme. The disconnected
/// sentinel (+infinity) maps to 0 for every kernel.
double county_weight(double d, const WeightScheme& scheme);

/// Elementwise county_weight over the focal row of the distance matrix.
/// The matrix source must match the scheme's distance kind.
Eigen::VectorXd location_weights(const DistanceMatrix& dmat, int focal,
                                 const WeightScheme& scheme);

/// Per-subject geographic weights for one focal location.
struct WeightVector {
    Eigen::VectorXd values; // length n
    int focal = -1;
};

/// Subject i receives the weight of its county.
WeightVector expand_to_subjects(const Eigen::VectorXd& county_weights, const Cohort& cohort,
                                int focal = -1);

const char* kernel_name(Kernel k);
Kernel kernel_from_name(const std::string& name);

} // namespace geocox
