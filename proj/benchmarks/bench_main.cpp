#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "geocox/cox.hpp"
#include "geocox/csv.hpp"
#include "geocox/graph.hpp"
#include "geocox/simulate.hpp"
#include "geocox/tic.hpp"
#include "geocox/weights.hpp"

using namespace geocox;

namespace {

std::string fixture(const char* name) {
    return std::string(GEOCOX_FIXTURE_DIR) + "/" + name;
}

struct Inputs {
    SpatialGraph graph;
    DistanceMatrix graph_dmat;
    Eigen::MatrixXd truths;
    Cohort cohort;
    Eigen::VectorXd unit;

    Inputs()
        : graph(read_graph(fixture("louisiana_nodes.csv"), fixture("louisiana_edges.csv"))),
          graph_dmat(graph_distance_matrix(graph)),
          truths(scenario_betas(SimScenario::make(ScenarioKind::null_effects), graph, graph_dmat)),
          cohort(simulate_cohort(truths, SimScenario::make(ScenarioKind::null_effects), graph, 12)),
          unit(Eigen::VectorXd::Ones(cohort.n())) {}
};

const Inputs& inputs() {
    static Inputs in;
    return in;
}

} // namespace

static void BM_graph_distance_matrix(benchmark::State& state) {
    const auto& in = inputs();
    for (auto _ : state) benchmark::DoNotOptimize(graph_distance_matrix(in.graph));
}
BENCHMARK(BM_graph_distance_matrix)->Unit(benchmark::kMicrosecond);

static void BM_log_weighted_pl(benchmark::State& state) {
    const auto& in = inputs();
    Eigen::VectorXd beta(3);
    beta << 0.7, 0.5, -0.8;
    for (auto _ : state) benchmark::DoNotOptimize(log_weighted_pl(in.cohort, in.unit, beta));
}
BENCHMARK(BM_log_weighted_pl)->Unit(benchmark::kMicrosecond);

static void BM_fit_location_global(benchmark::State& state) {
    const auto& in = inputs();
    for (auto _ : state) benchmark::DoNotOptimize(fit_location(in.cohort, in.unit));
}
BENCHMARK(BM_fit_location_global)->Unit(benchmark::kMillisecond);

static void BM_fit_all_locations(benchmark::State& state) {
    const auto& in = inputs();
    const auto scheme = WeightScheme::stochastic_neighborhood(
        static_cast<double>(state.range(0)), WeightDistance::graph);
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_all_locations(in.cohort, in.graph_dmat, scheme, {}, 1));
}
BENCHMARK(BM_fit_all_locations)->Arg(1)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_select_bandwidth(benchmark::State& state) {
    const auto& in = inputs();
    const auto family = WeightScheme::stochastic_neighborhood(1.0, WeightDistance::graph);
    const std::vector<double> grid{0.5, 1, 5, 10, 25, 50};
    for (auto _ : state)
        benchmark::DoNotOptimize(select_bandwidth(in.cohort, in.graph_dmat, family, grid, {}, 1));
}
BENCHMARK(BM_select_bandwidth)->Unit(benchmark::kMillisecond);

static void BM_simulate_cohort(benchmark::State& state) {
    const auto& in = inputs();
    const auto scenario = SimScenario::make(ScenarioKind::null_effects);
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_cohort(in.truths, scenario, in.graph, ++seed));
}
BENCHMARK(BM_simulate_cohort)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
