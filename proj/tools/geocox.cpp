// geocox: geographically weighted Cox regression on areal survival data.
//
// Subcommands: distances, fit, select-bandwidth, simulate, km.
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "geocox/cox.hpp"
#include "geocox/csv.hpp"
#include "geocox/errors.hpp"
#include "geocox/simulate.hpp"
#include "geocox/tic.hpp"
#include "geocox/weights.hpp"

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemeFlags {
    std::string kernel;
    double bandwidth = 0.0;
    bool have_bandwidth = false;
    double threshold = 0.0;
    bool have_threshold = false;
    std::string distance = "graph";
    double normalize_max = 11.0;
};

void add_scheme_flags(CLI::App* cmd, SchemeFlags& flags, bool with_bandwidth) {
    cmd->add_option("--kernel", flags.kernel,
                    "indicator|exponential|gaussian|bisquare|stochastic-neighborhood")
        ->required();
    if (with_bandwidth)
        cmd->add_option("--bandwidth", flags.bandwidth, "kernel decay bandwidth h")
            ->each([&flags](const std::string&) { flags.have_bandwidth = true; });
    cmd->add_option("--threshold", flags.threshold, "adjacency/cutoff distance")
        ->each([&flags](const std::string&) { flags.have_threshold = true; });
    cmd->add_option("--distance", flags.distance, "graph|greatcircle")
        ->check(CLI::IsMember({"graph", "greatcircle"}));
    cmd->add_option("--normalize-max", flags.normalize_max,
                    "rescale great-circle distances to this maximum (default 11)");
}

geocox::WeightScheme scheme_from_flags(const SchemeFlags& flags, bool bandwidth_required) {
    using geocox::Kernel;
    using geocox::WeightDistance;
    const Kernel kernel = geocox::kernel_from_name(flags.kernel);
    const WeightDistance dist = flags.distance == "graph"
                                    ? WeightDistance::graph
                                    : WeightDistance::great_circle_normalized;
    const double h = flags.have_bandwidth ? flags.bandwidth : 1.0;
    switch (kernel) {
        case Kernel::indicator:
            if (!flags.have_threshold) throw UsageError("--kernel indicator requires --threshold");
            return geocox::WeightScheme::indicator(flags.threshold, dist);
        case Kernel::bisquare:
            if (!flags.have_threshold) throw UsageError("--kernel bisquare requires --threshold");
            return geocox::WeightScheme::bisquare(flags.threshold, dist);
        case Kernel::exponential:
            if (bandwidth_required && !flags.have_bandwidth)
                throw UsageError("--kernel exponential requires --bandwidth");
            return geocox::WeightScheme::exponential(h, dist);
        case Kernel::gaussian:
            if (bandwidth_required && !flags.have_bandwidth)
                throw UsageError("--kernel gaussian requires --bandwidth");
            return geocox::WeightScheme::gaussian(h, dist);
        case Kernel::stochastic_neighborhood:
            if (bandwidth_required && !flags.have_bandwidth)
                throw UsageError("--kernel stochastic-neighborhood requires --bandwidth");
            if (dist == WeightDistance::graph) {
                if (flags.have_threshold && flags.threshold != 1.0)
                    throw UsageError("graph stochastic-neighborhood fixes the threshold at 1");
                return geocox::WeightScheme::stochastic_neighborhood(h, dist);
            }
            if (!flags.have_threshold)
                throw UsageError(
                    "stochastic-neighborhood with --distance greatcircle requires --threshold");
            return geocox::WeightScheme::stochastic_neighborhood(h, dist, flags.threshold);
    }
    throw UsageError("unknown kernel");
}

geocox::DistanceMatrix scheme_matrix(const geocox::SpatialGraph& graph, const SchemeFlags& flags) {
    if (flags.distance == "graph") return geocox::graph_distance_matrix(graph);
    return geocox::normalize_to_max(geocox::great_circle_matrix(graph), flags.normalize_max);
}

int run(int argc, char** argv) {
    CLI::App app{"geographically weighted Cox regression for areal survival data"};
    app.require_subcommand(1);

    // ---- distances ----
    auto* dist_cmd = app.add_subcommand("distances", "emit a location-by-location distance matrix");
    std::string d_nodes, d_edges, d_metric, d_out;
    double d_normalize = 0.0;
    bool d_have_normalize = false;
    dist_cmd->add_option("--nodes", d_nodes)->required();
    dist_cmd->add_option("--edges", d_edges)->required();
    dist_cmd->add_option("--metric", d_metric, "graph|greatcircle")
        ->required()
        ->check(CLI::IsMember({"graph", "greatcircle"}));
    dist_cmd->add_option("--normalize-max", d_normalize, "rescale so the maximum equals this value")
        ->each([&d_have_normalize](const std::string&) { d_have_normalize = true; });
    dist_cmd->add_option("--out", d_out)->required();

    // ---- fit ----
    auto* fit_cmd = app.add_subcommand("fit", "per-location weighted Cox fits");
    std::string f_data, f_nodes, f_edges, f_out;
    SchemeFlags f_scheme;
    unsigned f_threads = 0;
    fit_cmd->add_option("--data", f_data)->required();
    fit_cmd->add_option("--nodes", f_nodes)->required();
    fit_cmd->add_option("--edges", f_edges)->required();
    add_scheme_flags(fit_cmd, f_scheme, true);
    fit_cmd->add_option("--out", f_out)->required();
    fit_cmd->add_option("--threads", f_threads, "worker threads (0 = hardware)");

    // ---- select-bandwidth ----
    auto* sel_cmd =
        app.add_subcommand("select-bandwidth", "criterion-based bandwidth selection over a grid");
    std::string s_data, s_nodes, s_edges, s_grid, s_out;
    SchemeFlags s_scheme;
    unsigned s_threads = 0;
    sel_cmd->add_option("--data", s_data)->required();
    sel_cmd->add_option("--nodes", s_nodes)->required();
    sel_cmd->add_option("--edges", s_edges)->required();
    sel_cmd->add_option("--grid", s_grid, "start:stop:step or comma list")->required();
    add_scheme_flags(sel_cmd, s_scheme, false);
    sel_cmd->add_option("--out", s_out)->required();
    sel_cmd->add_option("--threads", s_threads, "worker threads (0 = hardware)");

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "replicated synthetic study with metrics");
    std::string m_scenario, m_nodes, m_edges, m_outdir;
    std::string m_grid = "0.5,1,5,10,25,50";
    std::string m_variants = "local,global,gd,gcd";
    int m_replicates = 100;
    std::uint64_t m_seed = 20240501;
    unsigned m_threads = 0;
    bool m_archive = false;
    sim_cmd->add_option("--scenario", m_scenario, "null|coordinate|graphdist")
        ->required()
        ->check(CLI::IsMember({"null", "coordinate", "graphdist"}));
    sim_cmd->add_option("--replicates", m_replicates)->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", m_seed);
    sim_cmd->add_option("--nodes", m_nodes)->required();
    sim_cmd->add_option("--edges", m_edges)->required();
    sim_cmd->add_option("--grid", m_grid, "bandwidth grid (default 0.5,1,5,10,25,50)");
    sim_cmd->add_option("--variants", m_variants, "comma list from local,global,gd,gcd");
    sim_cmd->add_option("--out-dir", m_outdir)->required();
    sim_cmd->add_option("--threads", m_threads, "worker threads (0 = hardware)");
    sim_cmd->add_flag("--archive", m_archive, "also write the per-replicate estimates.csv");

    // ---- km ----
    auto* km_cmd = app.add_subcommand("km", "per-location Kaplan-Meier survival at a time");
    std::string k_data, k_out;
    double k_at = 50.0;
    km_cmd->add_option("--data", k_data)->required();
    km_cmd->add_option("--at", k_at, "evaluation time")->required();
    km_cmd->add_option("--out", k_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (dist_cmd->parsed()) {
            const auto graph = geocox::read_graph(d_nodes, d_edges);
            geocox::DistanceMatrix dmat = d_metric == "graph"
                                              ? geocox::graph_distance_matrix(graph)
                                              : geocox::great_circle_matrix(graph);
            if (d_have_normalize) dmat = geocox::normalize_to_max(dmat, d_normalize);
            geocox::write_matrix(d_out, dmat);
            std::cout << "wrote " << dmat.size() << "x" << dmat.size() << " matrix to " << d_out
                      << "\n";
        } else if (fit_cmd->parsed()) {
            const auto scheme = scheme_from_flags(f_scheme, true);
            const auto cohort = geocox::read_cohort(f_data);
            const auto graph = geocox::read_graph(f_nodes, f_edges);
            const auto dmat =
                geocox::reindex(scheme_matrix(graph, f_scheme), cohort.location_labels());
            const auto fits = geocox::fit_all_locations(cohort, dmat, scheme, {}, f_threads);
            int converged = 0;
            for (const auto& fit : fits) converged += fit.converged ? 1 : 0;
            geocox::write_fits(f_out, cohort, fits);
            std::cout << converged << "/" << fits.size() << " locations converged; wrote " << f_out
                      << "\n";
            if (converged == 0) return 4;
        } else if (sel_cmd->parsed()) {
            const auto family = scheme_from_flags(s_scheme, false);
            std::vector<double> grid;
            try {
                grid = geocox::parse_grid(s_grid);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            const auto cohort = geocox::read_cohort(s_data);
            const auto graph = geocox::read_graph(s_nodes, s_edges);
            const auto dmat =
                geocox::reindex(scheme_matrix(graph, s_scheme), cohort.location_labels());
            const auto trace = geocox::select_bandwidth(cohort, dmat, family, grid, {}, s_threads);
            geocox::write_trace(s_out, trace);
            std::cout << "selected h = " << geocox::format_double(trace.selected_h) << "; wrote "
                      << s_out << "\n";
        } else if (sim_cmd->parsed()) {
            std::vector<double> grid;
            try {
                grid = geocox::parse_grid(m_grid);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }

            bool want_local = false, want_global = false, want_gd = false, want_gcd = false;
            {
                std::stringstream ss(m_variants);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    if (tok == "local") want_local = true;
                    else if (tok == "global") want_global = true;
                    else if (tok == "gd") want_gd = true;
                    else if (tok == "gcd") want_gcd = true;
                    else throw UsageError("unknown variant '" + tok + "'");
                }
                if (!(want_local || want_global || want_gd || want_gcd))
                    throw UsageError("--variants selected nothing");
            }

            const auto graph = geocox::read_graph(m_nodes, m_edges);
            const auto graph_dmat = geocox::graph_distance_matrix(graph);
            // gcd variants need centroids; other runs work without them
            const geocox::DistanceMatrix gcd_dmat =
                want_gcd ? geocox::normalize_to_max(geocox::great_circle_matrix(graph), 11.0)
                         : graph_dmat;

            std::vector<geocox::ModelVariant> variants;
            for (auto& v : geocox::standard_variants(graph_dmat, gcd_dmat)) {
                const bool is_gcd = v.name.rfind("gcd", 0) == 0;
                if ((v.name == "local" && want_local) || (v.name == "global" && want_global) ||
                    (v.name == "gd" && want_gd) || (is_gcd && want_gcd))
                    variants.push_back(std::move(v));
            }

            geocox::SimScenario scenario =
                geocox::SimScenario::make(geocox::scenario_from_name(m_scenario));
            geocox::StudyConfig config;
            config.replicates = m_replicates;
            config.base_seed = m_seed;
            config.grid = grid;
            config.threads = m_threads;
            config.keep_estimates = m_archive;

            const auto result =
                geocox::run_study(scenario, graph, graph_dmat, gcd_dmat, variants, config);

            std::filesystem::create_directories(m_outdir);
            const auto out = [&m_outdir](const char* name) {
                return (std::filesystem::path(m_outdir) / name).string();
            };
            geocox::write_metrics(out("metrics.csv"), result.metrics);
            geocox::write_selection(out("bandwidth_selection.csv"), result.selections);
            if (m_archive)
                geocox::write_estimates(out("estimates.csv"), result.estimates, graph.labels());
            std::cout << "study complete: " << result.metrics.rows.size() << " metric rows, "
                      << result.failed_fits << " failed fits; outputs in " << m_outdir << "\n";
        } else if (km_cmd->parsed()) {
            const auto cohort = geocox::read_cohort(k_data);
            if (k_at < 0) throw UsageError("--at must be nonnegative");
            std::vector<double> survival;
            survival.reserve(cohort.num_locations());
            for (int j = 0; j < cohort.num_locations(); ++j) {
                const auto curve = geocox::kaplan_meier(cohort, &cohort.subjects_at()[j]);
                survival.push_back(geocox::km_survival_at(curve, k_at));
            }
            geocox::write_km(k_out, cohort.location_labels(), survival);
            std::cout << "wrote per-location survival at t=" << geocox::format_double(k_at)
                      << " to " << k_out << "\n";
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const geocox::numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const geocox::data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
