#include "geocox/tic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "geocox/errors.hpp"
#include "geocox/parallel.hpp"
#include "weighted_pl.hpp"

namespace geocox {

Eigen::VectorXd location_score(const Cohort& cohort, int location, const Eigen::VectorXd& beta) {
    if (location < 0 || location >= cohort.num_locations())
        throw data_error("location index out of bounds");
    if (beta.size() != cohort.p())
        throw data_error("coefficient vector length does not match covariate dimension");
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(cohort.n());
    const detail::WeightedPl ev(cohort, ones, &cohort.subjects_at()[location]);
    Eigen::VectorXd g;
    ev.evaluate(beta, &g);
    return g;
}

TicValue tic(const Cohort& cohort, const std::vector<FitResult>& fits,
             const std::vector<Eigen::MatrixXd>& infos, TicRiskSets risk_sets) {
    const int locations = cohort.num_locations();
    if (static_cast<int>(fits.size()) != locations || static_cast<int>(infos.size()) != locations)
        throw data_error("fits/information count does not match the location registry");
    for (const auto& fit : fits)
        if (!fit.converged)
            throw numeric_error("non-converged fit at location " + std::to_string(fit.location));

    const int p = cohort.p();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(cohort.n());

    TicValue out;
    double loglik = 0.0;
    for (int j = 0; j < locations; ++j) {
        if (risk_sets == TicRiskSets::within_location) {
            const detail::WeightedPl ev(cohort, ones, &cohort.subjects_at()[j]);
            loglik += ev.evaluate(fits[j].beta);
        } else {
            const detail::WeightedPl ev(cohort, ones);
            loglik += ev.loglik_events_at(fits[j].beta, j);
        }
    }

    double trace = 0.0;
    for (int j = 0; j < locations; ++j) {
        const Eigen::VectorXd u = location_score(cohort, j, fits[j].beta);
        if (u.isZero(0.0)) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(infos[j]);
        if (es.info() != Eigen::Success) throw numeric_error("eigendecomposition failed");
        const Eigen::VectorXd evals = es.eigenvalues();
        const double cutoff =
            evals.cwiseAbs().maxCoeff() * p * std::numeric_limits<double>::epsilon();
        bool deficient = false;
        double quad = 0.0;
        for (int k = 0; k < p; ++k) {
            if (evals[k] > cutoff) {
                const double proj = es.eigenvectors().col(k).dot(u);
                quad += proj * proj / evals[k];
            } else {
                deficient = true; // pseudo-inverse drops this direction
            }
        }
        if (deficient) ++out.pseudo_inverse_count;
        trace += quad;
    }

    out.loglik_term = -2.0 * loglik;
    out.trace_term = 2.0 * trace;
    out.total = out.loglik_term + out.trace_term;
    return out;
}

TicTrace select_bandwidth(const Cohort& cohort, const DistanceMatrix& dmat,
                          const WeightScheme& family, const std::vector<double>& grid,
                          const FitOptions& opts, unsigned threads, TicRiskSets risk_sets) {
    if (grid.empty()) throw data_error("empty bandwidth grid");
    for (double h : grid)
        if (!(h > 0.0) || !std::isfinite(h)) throw data_error("bandwidth grid entries must be positive");

    const int locations = cohort.num_locations();
    TicTrace trace;
    trace.entries.resize(grid.size());

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        auto& entry = trace.entries[gi];
        entry.h = grid[gi];
        const WeightScheme scheme = family.with_bandwidth(grid[gi]);
        const std::vector<FitResult> fits = fit_all_locations(cohort, dmat, scheme, opts, threads);
        for (const auto& fit : fits)
            if (!fit.converged) ++entry.failed_locations;
        if (entry.failed_locations > 0) {
            entry.valid = false;
            entry.tic = entry.loglik_term = entry.trace_term =
                std::numeric_limits<double>::quiet_NaN();
            continue;
        }

        std::vector<Eigen::MatrixXd> infos(locations);
        parallel_for(static_cast<std::size_t>(locations), threads, [&](std::size_t j) {
            const Eigen::VectorXd county = location_weights(dmat, static_cast<int>(j), scheme);
            const WeightVector wv = expand_to_subjects(county, cohort, static_cast<int>(j));
            infos[j] = observed_information(cohort, wv.values, fits[j].beta);
        });

        const TicValue value = tic(cohort, fits, infos, risk_sets);
        entry.tic = value.total;
        entry.loglik_term = value.loglik_term;
        entry.trace_term = value.trace_term;
        entry.pseudo_inverse_count = value.pseudo_inverse_count;
        entry.valid = true;
    }

    trace.selected_index = -1;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const auto& entry = trace.entries[gi];
        if (!entry.valid) continue;
        if (trace.selected_index < 0) {
            trace.selected_index = static_cast<int>(gi);
            continue;
        }
        const auto& best = trace.entries[trace.selected_index];
        if (entry.tic < best.tic || (entry.tic == best.tic && entry.h < best.h))
            trace.selected_index = static_cast<int>(gi);
    }
    if (trace.selected_index < 0) throw numeric_error("every bandwidth grid point is invalid");
    trace.selected_h = trace.entries[trace.selected_index].h;
    return trace;
}

} // namespace geocox
