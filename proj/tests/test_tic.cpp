#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "geocox/cox.hpp"
#include "geocox/errors.hpp"
#include "geocox/rng.hpp"
#include "geocox/tic.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace geocox;
using builders::cohort_of;

namespace {

FitResult plug_in(int location, const Eigen::VectorXd& beta) {
    FitResult fit;
    fit.location = location;
    fit.beta = beta;
    fit.converged = true;
    fit.status = FitStatus::converged;
    return fit;
}

} // namespace

TEST_CASE("location_score") {
    SUBCASE("zero events yield a zero vector") {
        const Cohort c = cohort_of({{1, 0, {0.4}, "A"}, {2, 0, {0.1}, "A"}, {3, 1, {0.2}, "B"}});
        const Eigen::VectorXd u = location_score(c, 0, Eigen::VectorXd::Zero(1));
        CHECK(u[0] == 0.0);
    }
    SUBCASE("a single subject with an event scores zero") {
        const Cohort c = cohort_of({{1, 1, {0.7}, "A"}, {2, 1, {0.3}, "B"}});
        CHECK(location_score(c, 0, Eigen::VectorXd::Zero(1))[0] == doctest::Approx(0.0));
    }
    SUBCASE("hand evaluation: {(t=1,e=1,Z=1),(t=2,e=0,Z=0)} at beta=0") {
        const Cohort c = cohort_of({{1, 1, {1.0}, "A"}, {2, 0, {0.0}, "A"}});
        CHECK(location_score(c, 0, Eigen::VectorXd::Zero(1))[0] == doctest::Approx(0.5));
    }
    SUBCASE("risk sets are restricted to the location") {
        // subjects at other locations must not enter the within-county mean
        const Cohort c = cohort_of({{1, 1, {1.0}, "A"}, {2, 0, {0.0}, "A"},
                                    {1.5, 0, {100.0}, "B"}});
        CHECK(location_score(c, 0, Eigen::VectorXd::Zero(1))[0] == doctest::Approx(0.5));
    }
}

TEST_CASE("tic plug-in identities") {
    SUBCASE("zero-score location: criterion equals the within-county likelihood term") {
        // identical covariates: every Zbar equals Z, so U = 0 and the trace
        // term drops; events at t=1 (risk 3) and t=2 (risk 2)
        const Cohort c = cohort_of({{1, 1, {0.5}, "A"}, {2, 1, {0.5}, "A"}, {3, 0, {0.5}, "A"}});
        const std::vector<FitResult> fits{plug_in(0, Eigen::VectorXd::Zero(1))};
        const std::vector<Eigen::MatrixXd> infos{Eigen::MatrixXd::Zero(1, 1)};
        const TicValue v = tic(c, fits, infos);
        CHECK(v.trace_term == 0.0);
        CHECK(v.loglik_term == doctest::Approx(-2.0 * (std::log(1.0 / 3.0) + std::log(1.0 / 2.0))));
        CHECK(v.total == v.loglik_term + v.trace_term);
    }
    SUBCASE("J=1 at unit weights: trace term equals the explicit quadratic form") {
        SplitMix64 rng(211);
        const Cohort c = oracles::random_cohort(rng, 40, 2, 1);
        Eigen::VectorXd beta(2);
        beta << 0.25, -0.4; // deliberately not the maximizer, so U != 0
        const Eigen::VectorXd unit = Eigen::VectorXd::Ones(c.n());
        const Eigen::MatrixXd info = observed_information(c, unit, beta);
        const TicValue v = tic(c, {plug_in(0, beta)}, {info});
        const Eigen::VectorXd u = location_score(c, 0, beta);
        const double quad = (info.inverse() * u * u.transpose()).trace();
        CHECK(v.trace_term == doctest::Approx(2.0 * quad).epsilon(1e-9));
        CHECK(v.total == v.loglik_term + v.trace_term);
    }
    SUBCASE("a maximizing fit at one location zeroes the trace term") {
        SplitMix64 rng(223);
        const Cohort c = oracles::random_cohort(rng, 60, 2, 1);
        const Eigen::VectorXd unit = Eigen::VectorXd::Ones(c.n());
        const FitResult fit = fit_location(c, unit, {}, 0);
        REQUIRE(fit.converged);
        const Eigen::MatrixXd info = observed_information(c, unit, fit.beta);
        const TicValue v = tic(c, {fit}, {info});
        CHECK(std::abs(v.trace_term) < 1e-6);
        CHECK(v.total == doctest::Approx(-2.0 * fit.loglik).epsilon(1e-9));
    }
    SUBCASE("non-converged fits are rejected") {
        const Cohort c = cohort_of({{1, 1, {0.5}, "A"}});
        FitResult bad = plug_in(0, Eigen::VectorXd::Zero(1));
        bad.converged = false;
        CHECK_THROWS_AS(tic(c, {bad}, {Eigen::MatrixXd::Zero(1, 1)}), numeric_error);
    }
    SUBCASE("rank-deficient information falls back to a flagged pseudo-inverse") {
        SplitMix64 rng(239);
        const Cohort c = oracles::random_cohort(rng, 30, 2, 1);
        Eigen::VectorXd beta(2);
        beta << 0.3, -0.2;
        const Eigen::VectorXd u = location_score(c, 0, beta);
        REQUIRE(u.cwiseAbs().maxCoeff() > 0.0);
        Eigen::MatrixXd rank1(2, 2);
        rank1 << 2.0, 0.0, 0.0, 0.0;
        const TicValue v = tic(c, {plug_in(0, beta)}, {rank1});
        CHECK(v.pseudo_inverse_count == 1);
        CHECK(std::isfinite(v.trace_term));
        CHECK(v.trace_term == doctest::Approx(2.0 * u[0] * u[0] / 2.0));
    }
}

TEST_CASE("tic likelihood term ignores the weighting scheme given fixed coefficients") {
    SplitMix64 rng(227);
    const Cohort c = oracles::random_cohort(rng, 50, 2, 3);
    std::vector<FitResult> fits;
    std::vector<Eigen::MatrixXd> infos_a, infos_b;
    const Eigen::VectorXd unit = Eigen::VectorXd::Ones(c.n());
    for (int j = 0; j < 3; ++j) {
        Eigen::VectorXd beta(2);
        beta << 0.1 * j, -0.05 * j;
        fits.push_back(plug_in(j, beta));
        infos_a.push_back(observed_information(c, unit, beta));
        infos_b.push_back(observed_information(c, Eigen::VectorXd(0.5 * unit), beta));
    }
    const TicValue a = tic(c, fits, infos_a);
    const TicValue b = tic(c, fits, infos_b);
    CHECK(a.loglik_term == b.loglik_term); // identical by construction
}

TEST_CASE("pooled risk-set variant changes only the likelihood term") {
    SplitMix64 rng(229);
    const Cohort c = oracles::random_cohort(rng, 50, 2, 3);
    std::vector<FitResult> fits;
    std::vector<Eigen::MatrixXd> infos;
    const Eigen::VectorXd unit = Eigen::VectorXd::Ones(c.n());
    for (int j = 0; j < 3; ++j) {
        Eigen::VectorXd beta(2);
        beta << 0.05 + 0.1 * j, -0.1;
        fits.push_back(plug_in(j, beta));
        infos.push_back(observed_information(c, unit, beta));
    }
    const TicValue within = tic(c, fits, infos, TicRiskSets::within_location);
    const TicValue pooled = tic(c, fits, infos, TicRiskSets::pooled);
    CHECK(within.trace_term == pooled.trace_term);
    CHECK(within.loglik_term != pooled.loglik_term);
}

TEST_CASE("select_bandwidth") {
    SplitMix64 rng(233);
    std::vector<builders::Row> rows;
    const char* labels[3] = {"A", "B", "C"};
    for (int i = 0; i < 150; ++i)
        rows.push_back({-std::log(rng.next_open()) * 8.0, rng.next_bernoulli(0.7) ? 1 : 0,
                        {rng.next_normal()}, labels[i % 3]});
    const Cohort c = cohort_of(rows);
    const DistanceMatrix d = graph_distance_matrix(builders::path_graph(3));
    const auto family = WeightScheme::stochastic_neighborhood(1.0, WeightDistance::graph);

    SUBCASE("a one-element grid selects that element") {
        const TicTrace trace = select_bandwidth(c, d, family, {2.5});
        CHECK(trace.selected_h == 2.5);
        CHECK(trace.entries.size() == 1);
        CHECK(trace.entries[0].valid);
        CHECK(trace.entries[0].tic ==
              doctest::Approx(trace.entries[0].loglik_term + trace.entries[0].trace_term));
    }
    SUBCASE("criterion ties break toward the smaller bandwidth") {
        // the indicator family ignores h entirely, so every grid point ties
        const auto flat = WeightScheme::indicator(5.0, WeightDistance::graph);
        const TicTrace trace = select_bandwidth(c, d, flat, {4.0, 2.0, 3.0});
        CHECK(trace.selected_h == 2.0);
    }
    SUBCASE("grid must be positive and nonempty") {
        CHECK_THROWS_AS(select_bandwidth(c, d, family, {}), data_error);
        CHECK_THROWS_AS(select_bandwidth(c, d, family, {1.0, -2.0}), data_error);
    }
    SUBCASE("locations that cannot fit invalidate the grid point") {
        // disconnected location with only censored subjects never has a
        // weighted event, so every bandwidth is invalid
        std::vector<builders::Row> sparse = rows;
        sparse.push_back({1.0, 0, {0.0}, "Z"});
        sparse.push_back({2.0, 0, {0.1}, "Z"});
        const Cohort c2 = cohort_of(sparse);
        const SpatialGraph g = build_graph(
            {{"A", {}, {}}, {"B", {}, {}}, {"C", {}, {}}, {"Z", {}, {}}},
            {{"A", "B"}, {"B", "C"}});
        const DistanceMatrix d2 = graph_distance_matrix(g);
        CHECK_THROWS_AS(select_bandwidth(c2, d2, family, {1.0, 2.0}), numeric_error);
    }
}
