#include <doctest.h>

#include <cmath>
#include <limits>

#include "geocox/csv.hpp"
#include "geocox/errors.hpp"
#include "geocox/weights.hpp"
#include "geocox/rng.hpp"
#include "support/builders.hpp"

using namespace geocox;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("county_weight kernel values") {
    const auto graph = WeightDistance::graph;
    SUBCASE("stochastic-neighborhood branches") {
        const auto s = WeightScheme::stochastic_neighborhood(2.0, graph);
        CHECK(county_weight(1.0, s) == 1.0);                       // d <= threshold
        CHECK(county_weight(2.0, s) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
        CHECK(county_weight(0.0, s) == 1.0);
        CHECK(county_weight(kInf, s) == 0.0);
    }
    SUBCASE("indicator uses a strict cutoff") {
        const auto s = WeightScheme::indicator(1.5, graph);
        CHECK(county_weight(0.0, s) == 1.0);
        CHECK(county_weight(1.4999, s) == 1.0);
        CHECK(county_weight(1.5, s) == 0.0);
        CHECK(county_weight(kInf, s) == 0.0);
    }
    SUBCASE("bisquare vanishes at its cutoff") {
        const auto s = WeightScheme::bisquare(2.0, graph);
        CHECK(county_weight(0.0, s) == 1.0);
        CHECK(county_weight(1.0, s) == doctest::Approx(0.75));
        CHECK(county_weight(2.0, s) == 0.0);
        CHECK(county_weight(3.0, s) == 0.0);
        CHECK(county_weight(kInf, s) == 0.0);
    }
    SUBCASE("exponential and gaussian at zero distance") {
        CHECK(county_weight(0.0, WeightScheme::exponential(3.0, graph)) == 1.0);
        CHECK(county_weight(0.0, WeightScheme::gaussian(3.0, graph)) == 1.0);
        CHECK(county_weight(kInf, WeightScheme::exponential(3.0, graph)) == 0.0);
        CHECK(county_weight(kInf, WeightScheme::gaussian(3.0, graph)) == 0.0);
    }
    SUBCASE("underflow clamps to zero") {
        const auto s = WeightScheme::exponential(1.0, graph);
        CHECK(county_weight(30.0, s) == 0.0); // exp(-30) < 1e-12
    }
}

TEST_CASE("scheme factories validate parameters") {
    CHECK_THROWS_AS(WeightScheme::exponential(0.0, WeightDistance::graph), std::invalid_argument);
    CHECK_THROWS_AS(WeightScheme::indicator(-1.0, WeightDistance::graph), std::invalid_argument);
    CHECK_THROWS_AS(WeightScheme::stochastic_neighborhood(-2.0, WeightDistance::graph),
                    std::invalid_argument);
    // graph schemes pin the adjacency threshold at one hop
    const auto s = WeightScheme::stochastic_neighborhood(5.0, WeightDistance::graph, 3.0);
    CHECK(s.threshold == 1.0);
}

TEST_CASE("kernels are nonincreasing in distance") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        WeightScheme s = WeightScheme::exponential(0.1 + 5.0 * rng.next_double(),
                                                   WeightDistance::graph);
        switch (rng.next_int(0, 4)) {
            case 0: s = WeightScheme::indicator(5.0 * rng.next_double(), s.distance); break;
            case 1: break;
            case 2: s = WeightScheme::gaussian(s.bandwidth, s.distance); break;
            case 3: s = WeightScheme::bisquare(0.1 + 5.0 * rng.next_double(), s.distance); break;
            case 4:
                s = WeightScheme::stochastic_neighborhood(s.bandwidth, s.distance);
                break;
        }
        double d1 = 12.0 * rng.next_double(), d2 = 12.0 * rng.next_double();
        if (d1 > d2) std::swap(d1, d2);
        CHECK(county_weight(d1, s) >= county_weight(d2, s));
    }
}

TEST_CASE("stochastic-neighborhood matches the exponential kernel beyond its threshold") {
    SplitMix64 rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const double h = 0.2 + 8.0 * rng.next_double();
        const auto sn = WeightScheme::stochastic_neighborhood(h, WeightDistance::graph);
        const auto ex = WeightScheme::exponential(h, WeightDistance::graph);
        const double d = 1.0 + 10.0 * rng.next_open();
        CHECK(county_weight(d, sn) == county_weight(d, ex));
    }
    SUBCASE("left-continuous at the threshold; cutoff kernels right-continuous") {
        const auto sn = WeightScheme::stochastic_neighborhood(2.0, WeightDistance::graph);
        CHECK(county_weight(1.0, sn) == 1.0);
        CHECK(county_weight(1.0 - 1e-12, sn) == 1.0);
        const auto ind = WeightScheme::indicator(1.5, WeightDistance::graph);
        CHECK(county_weight(1.5 + 1e-12, ind) == county_weight(1.5, ind));
        const auto bi = WeightScheme::bisquare(1.5, WeightDistance::graph);
        CHECK(county_weight(1.5 + 1e-12, bi) == county_weight(1.5, bi));
    }
}

TEST_CASE("location_weights over distance matrices") {
    SUBCASE("single location") {
        const auto g = builders::path_graph(1);
        const auto d = graph_distance_matrix(g);
        const auto w = location_weights(d, 0, WeightScheme::stochastic_neighborhood(1.0, WeightDistance::graph));
        REQUIRE(w.size() == 1);
        CHECK(w[0] == 1.0);
    }
    SUBCASE("indicator threshold 1.5 on a path graph") {
        const auto d = graph_distance_matrix(builders::path_graph(3));
        const auto w = location_weights(d, 0, WeightScheme::indicator(1.5, WeightDistance::graph));
        CHECK(w[0] == 1.0);
        CHECK(w[1] == 1.0);
        CHECK(w[2] == 0.0);
    }
    SUBCASE("Louisiana at h=50: every county keeps weight above 0.80") {
        const auto g = read_graph(builders::fixture("louisiana_nodes.csv"),
                                  builders::fixture("louisiana_edges.csv"));
        const auto d = graph_distance_matrix(g);
        const auto scheme = WeightScheme::stochastic_neighborhood(50.0, WeightDistance::graph);
        double min_w = 1.0;
        for (int j = 0; j < d.size(); ++j) min_w = std::min(min_w, location_weights(d, j, scheme).minCoeff());
        CHECK(min_w == doctest::Approx(std::exp(-11.0 / 50.0)).epsilon(1e-12));
        CHECK(min_w > 0.80);
    }
    SUBCASE("near-unit weights at an enormous bandwidth") {
        const auto g = read_graph(builders::fixture("louisiana_nodes.csv"),
                                  builders::fixture("louisiana_edges.csv"));
        const auto d = graph_distance_matrix(g);
        const auto scheme = WeightScheme::stochastic_neighborhood(1e6, WeightDistance::graph);
        for (int j = 0; j < d.size(); ++j)
            CHECK(location_weights(d, j, scheme).minCoeff() > 1.0 - 1e-4);
    }
    SUBCASE("source mismatch is rejected") {
        const auto d = graph_distance_matrix(builders::path_graph(2));
        CHECK_THROWS_AS(
            location_weights(d, 0,
                             WeightScheme::stochastic_neighborhood(
                                 1.0, WeightDistance::great_circle_normalized, 1.0)),
            data_error);
        CHECK_THROWS_AS(location_weights(d, 5, WeightScheme::indicator(1.0, WeightDistance::graph)),
                        data_error);
    }
}

TEST_CASE("expand_to_subjects broadcasts county weights") {
    const auto cohort = builders::cohort_of({{1, 1, {0.}, "A"},
                                             {2, 1, {0.}, "A"},
                                             {3, 1, {0.}, "B"},
                                             {4, 0, {0.}, "B"},
                                             {5, 1, {0.}, "B"}});
    Eigen::VectorXd county(2);
    county << 1.0, 0.5;
    const WeightVector w = expand_to_subjects(county, cohort, 0);
    REQUIRE(w.values.size() == 5);
    CHECK(w.values[0] == 1.0);
    CHECK(w.values[1] == 1.0);
    CHECK(w.values[2] == 0.5);
    CHECK(w.values[4] == 0.5);
    CHECK(w.focal == 0);

    SUBCASE("all ones stay ones; zero county zeroes its subjects") {
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
        CHECK(expand_to_subjects(ones, cohort, 0).values.minCoeff() == 1.0);
        Eigen::VectorXd zeroed(2);
        zeroed << 1.0, 0.0;
        const auto wz = expand_to_subjects(zeroed, cohort, 0);
        CHECK(wz.values[2] == 0.0);
        CHECK(wz.values[3] == 0.0);
    }
    SUBCASE("length mismatch") {
        Eigen::VectorXd bad = Eigen::VectorXd::Ones(3);
        CHECK_THROWS_AS(expand_to_subjects(bad, cohort, 0), data_error);
    }
}
