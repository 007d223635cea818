#pragma once

#include <Eigen/Core>

#include <vector>

#include "geocox/cohort.hpp"
#include "geocox/cox.hpp"
#include "geocox/graph.hpp"
#include "geocox/weights.hpp"

namespace geocox {

/// Risk sets used by the likelihood term of the information criterion.
/// within_location restricts each event's risk set to subjects at the same
/// location; pooled uses the whole cohort (sensitivity evaluation only).
enum class TicRiskSets { within_location, pooled };

/// Unweighted Cox score over the subjects at one location, risk sets
/// restricted to that location, evaluated at beta. Zero events yield a zero
/// vector.
Eigen::VectorXd location_score(const Cohort& cohort, int location,
                               const Eigen::VectorXd& beta);

struct TicValue {
    double total = 0.0;
    double loglik_term = 0.0; // -2 * per-location log partial likelihood
    double trace_term = 0.0;  // +2 * sum_j U_j' I_j^{-1} U_j
    int pseudo_inverse_count = 0;
};

/// Partial-likelihood information criterion for a set of per-location fits.
/// infos[j] is the weighted observed information at fits[j].beta. Singular
/// information falls back to a Moore-Penrose pseudo-inverse and is counted.
/// Throws numeric_error if any fit did not converge.
TicValue tic(const Cohort& cohort, const std::vector<FitResult>& fits,
             const std::vector<Eigen::MatrixXd>& infos,
             TicRiskSets risk_sets = TicRiskSets::within_location);

struct TicTrace {
    struct Entry {
        double h = 0.0;
        double tic = 0.0;
        double loglik_term = 0.0;
        double trace_term = 0.0;
        int failed_locations = 0;
        int pseudo_inverse_count = 0;
        bool valid = false;
    };
    std::vector<Entry> entries;
    int selected_index = -1;
    double selected_h = 0.0;
};

/// Fits every location at each grid bandwidth and returns the criterion
/// trace. Grid points where any location fails to fit are recorded and
/// excluded from the argmin; ties break toward smaller h. Throws
/// numeric_error when every grid point is invalid.
TicTrace select_bandwidth(const Cohort& cohort, const DistanceMatrix& dmat,
                          const WeightScheme& family, const std::vector<double>& grid,
                          const FitOptions& opts = {}, unsigned threads = 0,
                          TicRiskSets risk_sets = TicRiskSets::within_location);

} // namespace geocox
