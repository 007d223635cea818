#include "geocox/weights.hpp"

#include <cmath>
#include <stdexcept>

#include "geocox/errors.hpp"

namespace geocox {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

} // namespace

WeightScheme WeightScheme::indicator(double threshold, WeightDistance distance) {
    require(threshold >= 0.0 && std::isfinite(threshold), "indicator threshold must be >= 0");
    WeightScheme s;
    s.kernel = Kernel::indicator;
    s.threshold = threshold;
    s.distance = distance;
    return s;
}

WeightScheme WeightScheme::exponential(double bandwidth, WeightDistance distance) {
    require(bandwidth > 0.0, "exponential bandwidth must be > 0");
    WeightScheme s;
    s.kernel = Kernel::exponential;
    s.bandwidth = bandwidth;
    s.distance = distance;
    return s;
}

WeightScheme WeightScheme::gaussian(double bandwidth, WeightDistance distance) {
    require(bandwidth > 0.0, "gaussian bandwidth must be > 0");
    WeightScheme s;
    s.kernel = Kernel::gaussian;
    s.bandwidth = bandwidth;
    s.distance = distance;
    return s;
}

WeightScheme WeightScheme::bisquare(double threshold, WeightDistance distance) {
    require(threshold >= 0.0 && std::isfinite(threshold), "bisquare threshold must be >= 0");
    WeightScheme s;
    s.kernel = Kernel::bisquare;
    s.threshold = threshold;
    s.distance = distance;
    return s;
}

WeightScheme WeightScheme::stochastic_neighborhood(double bandwidth, WeightDistance distance,
                                                   double threshold) {
    require(bandwidth > 0.0, "stochastic-neighborhood bandwidth must be > 0");
    require(threshold >= 0.0, "stochastic-neighborhood threshold must be >= 0");
    WeightScheme s;
    s.kernel = Kernel::stochastic_neighborhood;
    s.bandwidth = bandwidth;
    // Hop-count distances have a natural adjacency threshold of one edge.
    s.threshold = distance == WeightDistance::graph ? 1.0 : threshold;
    s.distance = distance;
    return s;
}

WeightScheme WeightScheme::with_bandwidth(double h) const {
    require(h > 0.0 || !uses_bandwidth(), "bandwidth must be > 0");
    WeightScheme s = *this;
    s.bandwidth = h;
    return s;
}

bool WeightScheme::uses_bandwidth() const {
    return kernel == Kernel::exponential || kernel == Kernel::gaussian ||
           kernel == Kernel::stochastic_neighborhood;
}

bool WeightScheme::uses_threshold() const {
    return kernel == Kernel::indicator || kernel == Kernel::bisquare ||
           kernel == Kernel::stochastic_neighborhood;
}

double county_weight(double d, const WeightScheme& scheme) {
    if (!std::isfinite(d)) return 0.0; // disconnected sentinel
    double w = 0.0;
    switch (scheme.kernel) {
        case Kernel::indicator:
            w = d < scheme.threshold ? 1.0 : 0.0;
            break;
        case Kernel::exponential:
            w = std::exp(-d / scheme.bandwidth);
            break;
        case Kernel::gaussian: {
            const double r = d / scheme.bandwidth;
            w = std::exp(-r * r);
            break;
        }
        case Kernel::bisquare: {
            const double r = d / scheme.threshold;
            w = d < scheme.threshold ? 1.0 - r * r : 0.0;
            break;
        }
        case Kernel::stochastic_neighborhood:
            w = d <= scheme.threshold ? 1.0 : std::exp(-d / scheme.bandwidth);
            break;
    }
    return w < kWeightFloor ? 0.0 : w;
}

Eigen::VectorXd location_weights(const DistanceMatrix& dmat, int focal,
                                 const WeightScheme& scheme) {
    if (focal < 0 || focal >= dmat.size()) throw data_error("focal location out of bounds");
    const bool graph_scheme = scheme.distance == WeightDistance::graph;
    const bool compatible = graph_scheme ? dmat.source == DistanceSource::graph
                                         : dmat.source == DistanceSource::normalized;
    if (!compatible)
        throw data_error("distance matrix source does not match the weighting scheme");

    Eigen::VectorXd w(dmat.size());
    for (int j = 0; j < dmat.size(); ++j) w[j] = county_weight(dmat.values(focal, j), scheme);
    return w;
}

WeightVector expand_to_subjects(const Eigen::VectorXd& county_weights, const Cohort& cohort,
                                int focal) {
    if (county_weights.size() != cohort.num_locations())
        throw data_error("county weight vector length does not match the location registry");
    WeightVector out;
    out.focal = focal;
    out.values.resize(cohort.n());
    for (int i = 0; i < cohort.n(); ++i) out.values[i] = county_weights[cohort.location(i)];
    return out;
}

const char* kernel_name(Kernel k) {
    switch (k) {
        case Kernel::indicator: return "indicator";
        case Kernel::exponential: return "exponential";
        case Kernel::gaussian: return "gaussian";
        case Kernel::bisquare: return "bisquare";
        case Kernel::stochastic_neighborhood: return "stochastic-neighborhood";
    }
    return "?";
}

Kernel kernel_from_name(const std::string& name) {
    if (name == "indicator") return Kernel::indicator;
    if (name == "exponential") return Kernel::exponential;
    if (name == "gaussian") return Kernel::gaussian;
    if (name == "bisquare") return Kernel::bisquare;
    if (name == "stochastic-neighborhood") return Kernel::stochastic_neighborhood;
    throw std::invalid_argument("unknown kernel '" + name + "'");
}

} // namespace geocox
