#include "geocox/cox.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

#include "geocox/errors.hpp"
#include "geocox/parallel.hpp"
#include "weighted_pl.hpp"

namespace geocox {

namespace {

void check_inputs(const Cohort& cohort, const Eigen::VectorXd& weights,
                  const Eigen::VectorXd* beta) {
    if (weights.size() != cohort.n()) throw data_error("weight vector length does not match cohort");
    for (int i = 0; i < weights.size(); ++i)
        if (!(weights[i] >= 0.0)) throw data_error("weights must be nonnegative");
    if (beta && beta->size() != cohort.p())
        throw data_error("coefficient vector length does not match covariate dimension");
}

detail::WeightedPl make_eval(const Cohort& cohort, const Eigen::VectorXd& weights,
                             const Eigen::VectorXd& beta) {
    check_inputs(cohort, weights, &beta);
    detail::WeightedPl ev(cohort, weights);
    if (!ev.has_events()) throw numeric_error("no weighted events");
    return ev;
}

} // namespace

const char* fit_status_name(FitStatus s) {
    switch (s) {
        case FitStatus::converged: return "converged";
        case FitStatus::not_converged: return "not-converged";
        case FitStatus::no_weighted_events: return "no-weighted-events";
        case FitStatus::diverged: return "diverged";
        case FitStatus::singular_information: return "singular-information";
    }
    return "?";
}

double log_weighted_pl(const Cohort& cohort, const Eigen::VectorXd& weights,
                       const Eigen::VectorXd& beta) {
    return make_eval(cohort, weights, beta).evaluate(beta);
}

Eigen::VectorXd score(const Cohort& cohort, const Eigen::VectorXd& weights,
                      const Eigen::VectorXd& beta) {
    Eigen::VectorXd g;
    make_eval(cohort, weights, beta).evaluate(beta, &g);
    return g;
}

Eigen::MatrixXd observed_information(const Cohort& cohort, const Eigen::VectorXd& weights,
                                     const Eigen::VectorXd& beta) {
    Eigen::MatrixXd info;
    make_eval(cohort, weights, beta).evaluate(beta, nullptr, &info);
    return info;
}

Eigen::MatrixXd squared_weight_information(const Cohort& cohort, const Eigen::VectorXd& weights,
                                           const Eigen::VectorXd& beta) {
    return make_eval(cohort, weights, beta).squared_weight_curvature(beta);
}

FitResult fit_location(const Cohort& cohort, const Eigen::VectorXd& weights,
                       const FitOptions& opts, int location) {
    check_inputs(cohort, weights, nullptr);
    if (opts.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (opts.loglik_tol <= 0 || opts.gradient_tol <= 0 || opts.divergence_bound <= 0)
        throw std::invalid_argument("fit tolerances must be positive");

    const int p = cohort.p();
    FitResult res;
    res.location = location;
    res.beta = Eigen::VectorXd::Zero(p);

    const detail::WeightedPl ev(cohort, weights);
    res.weighted_events = ev.weighted_events();
    if (!ev.has_events()) {
        res.status = FitStatus::no_weighted_events;
        return res;
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd grad(p);
    Eigen::MatrixXd info(p, p);
    double ll = ev.evaluate(beta, &grad, &info);
    res.loglik_path.push_back(ll);
    res.status = FitStatus::not_converged;

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        res.iterations = iter;
        if (grad.cwiseAbs().maxCoeff() < opts.gradient_tol) {
            res.status = FitStatus::converged;
            res.iterations = iter - 1;
            break;
        }

        Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
        Eigen::VectorXd step = ldlt.solve(grad);
        const double residual = (info * step - grad).cwiseAbs().maxCoeff();
        if (ldlt.info() != Eigen::Success || !step.allFinite() ||
            residual > 1e-8 * std::max(1.0, grad.cwiseAbs().maxCoeff())) {
            res.status = FitStatus::singular_information;
            break;
        }

        // Full Newton step first; fall back to log-likelihood-only probes
        // while halving.
        Eigen::VectorXd cand = beta + step;
        Eigen::VectorXd grad_new(p);
        Eigen::MatrixXd info_new(p, p);
        double ll_new = ev.evaluate(cand, &grad_new, &info_new);
        const double ll_full_step = ll_new;
        bool accepted = std::isfinite(ll_new) && ll_new >= ll;
        if (!accepted) {
            double scale = 0.5;
            for (int k = 1; k <= opts.max_step_halvings; ++k, scale *= 0.5) {
                cand = beta + scale * step;
                ll_new = ev.evaluate(cand);
                if (std::isfinite(ll_new) && ll_new >= ll) {
                    accepted = true;
                    ll_new = ev.evaluate(cand, &grad_new, &info_new);
                    break;
                }
            }
        }
        if (!accepted) {
            // The full step moves the objective by less than the convergence
            // tolerance: beta is a maximizer at this resolution.
            if (std::isfinite(ll_full_step) &&
                std::abs(ll_full_step - ll) / (std::abs(ll) + opts.loglik_tol) < opts.loglik_tol)
                res.status = FitStatus::converged;
            break;
        }

        beta = cand;
        grad = grad_new;
        info = info_new;
        res.loglik_path.push_back(ll_new);

        if (beta.cwiseAbs().maxCoeff() > opts.divergence_bound) {
            ll = ll_new;
            res.status = FitStatus::diverged;
            break;
        }
        const double rel = std::abs(ll_new - ll) / (std::abs(ll_new) + opts.loglik_tol);
        ll = ll_new;
        if (rel < opts.loglik_tol) {
            res.status = FitStatus::converged;
            break;
        }
    }

    res.beta = beta;
    res.loglik = ll;
    res.converged = res.status == FitStatus::converged;
    if (res.converged) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
        Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
        if (ldlt.info() != Eigen::Success || !cov.allFinite()) {
            res.status = FitStatus::singular_information;
            res.converged = false;
        } else {
            res.covariance = 0.5 * (cov + cov.transpose());
            res.se.resize(p);
            res.z.resize(p);
            for (int k = 0; k < p; ++k) {
                const double v = res.covariance(k, k);
                res.se[k] = v > 0.0 ? std::sqrt(v) : 0.0;
                res.z[k] = res.se[k] > 0.0 ? res.beta[k] / res.se[k] : 0.0;
            }
        }
    }
    return res;
}

FitResult fit_location(const Cohort& cohort, const WeightVector& weights, const FitOptions& opts) {
    return fit_location(cohort, weights.values, opts, weights.focal);
}

std::vector<FitResult> fit_all_locations(const Cohort& cohort, const DistanceMatrix& dmat,
                                         const WeightScheme& scheme, const FitOptions& opts,
                                         unsigned threads) {
    const int locations = cohort.num_locations();
    if (dmat.size() != locations)
        throw data_error("distance matrix dimension does not match the location registry");
    if (!dmat.labels.empty() && dmat.labels != cohort.location_labels())
        throw data_error("distance matrix labels do not match the location registry");

    std::vector<FitResult> out(locations);
    parallel_for(static_cast<std::size_t>(locations), threads, [&](std::size_t j) {
        const int focal = static_cast<int>(j);
        const Eigen::VectorXd county = location_weights(dmat, focal, scheme);
        const WeightVector wv = expand_to_subjects(county, cohort, focal);
        out[j] = fit_location(cohort, wv.values, opts, focal);
    });
    return out;
}

} // namespace geocox
