#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "geocox/cohort.hpp"
#include "geocox/graph.hpp"
#include "geocox/weights.hpp"

namespace geocox {

struct FitOptions {
    int max_iterations = 25;
    double loglik_tol = 1e-9;      // relative log-likelihood change
    double gradient_tol = 1e-6;    // gradient max-norm
    double divergence_bound = 15.0; // |beta_k| beyond this flags monotone likelihood
    int max_step_halvings = 10;
};

enum class FitStatus { converged, not_converged, no_weighted_events, diverged, singular_information };

const char* fit_status_name(FitStatus s);

struct FitResult {
    int location = -1;
    Eigen::VectorXd beta;
    Eigen::MatrixXd covariance; // inverse observed information at beta
    Eigen::VectorXd se;
    Eigen::VectorXd z; // beta / se where se > 0, else 0
    FitStatus status = FitStatus::not_converged;
    bool converged = false;
    int iterations = 0;
    double loglik = 0.0;
    double weighted_events = 0.0;         // sum of weights over contributing events
    std::vector<double> loglik_path;      // log-likelihood after each accepted step
};

/// Weighted Cox log partial likelihood with Breslow handling of tied event
/// times. Weights are case weights: event i contributes
/// w_i * [log w_i + Z_i'beta - log sum_{j in R(T_i)} w_j exp(Z_j'beta)],
/// the form fitted by standard weighted Cox implementations. Subjects with
/// zero weight are excluded from risk sets entirely. Throws numeric_error
/// when no positively weighted event exists.
double log_weighted_pl(const Cohort& cohort, const Eigen::VectorXd& weights,
                       const Eigen::VectorXd& beta);

/// Exact gradient of log_weighted_pl: sum over events of w_i times Z_i minus
/// the weighted risk-set covariate mean.
Eigen::VectorXd score(const Cohort& cohort, const Eigen::VectorXd& weights,
                      const Eigen::VectorXd& beta);

/// Exact negative Hessian of log_weighted_pl (w_i times the weighted
/// risk-set covariate covariance, summed over events). Symmetric positive
/// semidefinite.
Eigen::MatrixXd observed_information(const Cohort& cohort, const Eigen::VectorXd& weights,
                                     const Eigen::VectorXd& beta);

/// Alternative curvature form with squared weights and squared risk scores in
/// its first term. Evaluation-only, for reproducibility comparisons; never
/// used by the fitter.
Eigen::MatrixXd squared_weight_information(const Cohort& cohort, const Eigen::VectorXd& weights,
                                           const Eigen::VectorXd& beta);

/// Newton-Raphson maximization of log_weighted_pl from beta = 0 with
/// step-halving. Failures (no weighted events, divergence, singular
/// information) come back as status flags, not exceptions.
FitResult fit_location(const Cohort& cohort, const Eigen::VectorXd& weights,
                       const FitOptions& opts = {}, int location = -1);
FitResult fit_location(const Cohort& cohort, const WeightVector& weights,
                       const FitOptions& opts = {});

/// One fit per registry location, using location_weights over the distance
/// matrix. Per-location failures are recorded in the results, never fatal.
/// threads = 0 picks hardware concurrency; output order is deterministic.
std::vector<FitResult> fit_all_locations(const Cohort& cohort, const DistanceMatrix& dmat,
                                         const WeightScheme& scheme, const FitOptions& opts = {},
                                         unsigned threads = 0);

} // namespace geocox
