#include "geocox/simulate.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "geocox/errors.hpp"
#include "geocox/format.hpp"
#include "geocox/parallel.hpp"
#include "geocox/rng.hpp"
#include "geocox/tic.hpp"

namespace geocox {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

} // namespace

const char* scenario_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::null_effects: return "null";
        case ScenarioKind::coordinate: return "coordinate";
        case ScenarioKind::graph_distance: return "graphdist";
    }
    return "?";
}

ScenarioKind scenario_from_name(const std::string& name) {
    if (name == "null") return ScenarioKind::null_effects;
    if (name == "coordinate") return ScenarioKind::coordinate;
    if (name == "graphdist") return ScenarioKind::graph_distance;
    throw std::invalid_argument("unknown scenario '" + name + "'");
}

SimScenario SimScenario::make(ScenarioKind kind) {
    SimScenario s;
    s.kind = kind;
    return s;
}

Eigen::MatrixXd scenario_betas(const SimScenario& scenario, const SpatialGraph& graph,
                               const DistanceMatrix& graph_dmat) {
    const int locations = graph.size();
    if (locations < 1) throw data_error("empty graph");
    Eigen::MatrixXd out(locations, 3);
    for (int l = 0; l < locations; ++l) out.row(l) = scenario.base_beta.transpose();

    switch (scenario.kind) {
        case ScenarioKind::null_effects:
            break;
        case ScenarioKind::coordinate: {
            double mean_lat = 0.0, mean_lon = 0.0;
            for (const auto& node : graph.nodes()) {
                if (!node.latitude) throw data_error("node '" + node.label + "' is missing a centroid");
                mean_lat += *node.latitude;
                mean_lon += *node.longitude;
            }
            mean_lat /= locations;
            mean_lon /= locations;
            for (int l = 0; l < locations; ++l) {
                const auto& node = graph.nodes()[l];
                const double offset =
                    scenario.coordinate_slope *
                    (*node.latitude - mean_lat + *node.longitude - mean_lon);
                out.row(l).array() += offset;
            }
            break;
        }
        case ScenarioKind::graph_distance: {
            if (graph_dmat.source != DistanceSource::graph || graph_dmat.size() != locations)
                throw data_error("graph-distance scenario needs the hop-count matrix of the graph");
            const int baseline = graph.index_of(scenario.baseline_label);
            if (baseline < 0)
                throw data_error("baseline location '" + scenario.baseline_label + "' not in graph");
            double mean_others = 0.0;
            for (int l = 0; l < locations; ++l) {
                const double d = graph_dmat.values(baseline, l);
                if (!std::isfinite(d)) throw data_error("graph is not connected");
                if (l != baseline) mean_others += d;
            }
            if (locations > 1) mean_others /= (locations - 1);
            for (int l = 0; l < locations; ++l) {
                const double offset =
                    scenario.graph_slope * (graph_dmat.values(baseline, l) - mean_others);
                out.row(l).array() += offset;
            }
            break;
        }
    }
    return out;
}

Cohort simulate_cohort(const Eigen::MatrixXd& truths, const SimScenario& scenario,
                       const SpatialGraph& graph, std::uint64_t seed,
                       const std::vector<int>* county_sizes) {
    const int locations = graph.size();
    if (truths.rows() != locations || truths.cols() != 3)
        throw data_error("truth matrix must be J x 3");
    if (!(scenario.baseline_hazard > 0.0)) throw data_error("baseline hazard must be positive");
    if (scenario.censor_point_prob < 0.0 || scenario.censor_point_prob > 1.0 ||
        scenario.black_prob < 0.0 || scenario.black_prob > 1.0 || scenario.married_prob < 0.0 ||
        scenario.married_prob > 1.0)
        throw data_error("scenario probabilities must lie in [0, 1]");
    if (scenario.county_size_min < 1 || scenario.county_size_max < scenario.county_size_min)
        throw data_error("county size range is empty");
    if (county_sizes) {
        if (static_cast<int>(county_sizes->size()) != locations)
            throw data_error("county size list does not match the graph");
        for (int s : *county_sizes)
            if (s < 1) throw data_error("county sizes must be >= 1");
    }

    SplitMix64 rng = SplitMix64::substream(seed, 0);
    std::vector<SubjectRecord> records;
    records.reserve(static_cast<std::size_t>(locations) *
                    (county_sizes ? 1 : scenario.county_size_max));

    int serial = 0;
    for (int l = 0; l < locations; ++l) {
        const int count = county_sizes
                              ? (*county_sizes)[l]
                              : rng.next_int(scenario.county_size_min, scenario.county_size_max);
        for (int k = 0; k < count; ++k) {
            SubjectRecord rec;
            rec.id = std::to_string(++serial);
            rec.location = graph.label(l);
            const double age = rng.next_normal();
            const double black = rng.next_bernoulli(scenario.black_prob) ? 1.0 : 0.0;
            const double married = rng.next_bernoulli(scenario.married_prob) ? 1.0 : 0.0;
            rec.covariates = {age, black, married};

            const double eta =
                truths(l, 0) * age + truths(l, 1) * black + truths(l, 2) * married;
            const double u = rng.next_open();
            const double event_time = -std::log(u) / (scenario.baseline_hazard * std::exp(eta));
            const double censor_time = rng.next_bernoulli(scenario.censor_point_prob)
                                           ? scenario.censor_cap
                                           : scenario.censor_cap * rng.next_double();
            rec.time = std::min(event_time, censor_time);
            rec.status = event_time <= censor_time ? 1 : 0;
            assert((rec.status == 1) == (event_time <= censor_time));
            records.push_back(std::move(rec));
        }
    }
    return validate_cohort(records, 3, {"age", "black", "married"});
}

double censoring_fraction(const Cohort& cohort) {
    int censored = 0;
    for (int i = 0; i < cohort.n(); ++i)
        if (!cohort.event(i)) ++censored;
    return static_cast<double>(censored) / cohort.n();
}

MetricsTable compute_metrics(const std::vector<Eigen::MatrixXd>& estimates,
                             const std::vector<Eigen::MatrixXd>& ses,
                             const Eigen::MatrixXd& truths, const std::string& variant_label) {
    const int replicates = static_cast<int>(estimates.size());
    if (replicates < 2) throw data_error("metrics need at least two replicates");
    if (ses.size() != estimates.size()) throw data_error("estimate/se shape mismatch");
    const int counties = static_cast<int>(truths.rows());
    const int p = static_cast<int>(truths.cols());
    for (int r = 0; r < replicates; ++r)
        if (estimates[r].rows() != counties || estimates[r].cols() != p ||
            ses[r].rows() != counties || ses[r].cols() != p)
            throw data_error("estimate/se shape mismatch");

    MetricsTable table;
    table.replicates = replicates;
    for (int m = 0; m < p; ++m) {
        MetricsRow row;
        row.variant = variant_label;
        row.coefficient = m;
        double mab = 0.0, msd = 0.0, mmse = 0.0, mcp = 0.0;
        int used = 0;
        long failed = 0;
        for (int l = 0; l < counties; ++l) {
            double sum_abs = 0.0, sum_sq = 0.0, sum = 0.0, cover = 0.0;
            int valid = 0;
            for (int r = 0; r < replicates; ++r) {
                const double est = estimates[r](l, m);
                const double se = ses[r](l, m);
                if (!std::isfinite(est) || !std::isfinite(se)) continue;
                ++valid;
                const double err = est - truths(l, m);
                sum_abs += std::abs(err);
                sum_sq += err * err;
                sum += est;
                if (std::abs(err) <= 1.96 * se) cover += 1.0;
            }
            failed += replicates - valid;
            if (valid < 2) continue; // sample SD needs two points
            const double mean = sum / valid;
            double dev = 0.0;
            for (int r = 0; r < replicates; ++r) {
                const double est = estimates[r](l, m);
                if (!std::isfinite(est) || !std::isfinite(ses[r](l, m))) continue;
                dev += (est - mean) * (est - mean);
            }
            mab += sum_abs / valid;
            msd += std::sqrt(dev / (valid - 1));
            mmse += sum_sq / valid;
            mcp += cover / valid;
            ++used;
        }
        if (used > 0) {
            row.mab = mab / used;
            row.msd = msd / used;
            row.mmse = mmse / used;
            row.mcp = mcp / used;
        } else {
            row.mab = row.msd = row.mmse = row.mcp = kNan;
        }
        row.counties_used = used;
        row.failed_cells = failed;
        table.rows.push_back(std::move(row));
    }
    return table;
}

double matched_adjacency_threshold(const DistanceMatrix& graph_dmat,
                                   const DistanceMatrix& gcd_dmat) {
    if (graph_dmat.size() != gcd_dmat.size())
        throw data_error("distance matrices differ in dimension");
    const int n = graph_dmat.size();
    long target = 0;
    std::vector<double> offdiag;
    offdiag.reserve(static_cast<std::size_t>(n) * (n - 1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (graph_dmat.values(i, j) <= 1.0) ++target;
            offdiag.push_back(gcd_dmat.values(i, j));
        }
    if (target == 0) return 0.0;
    std::sort(offdiag.begin(), offdiag.end());
    return offdiag[static_cast<std::size_t>(target) - 1];
}

std::vector<ModelVariant> standard_variants(const DistanceMatrix& graph_dmat,
                                            const DistanceMatrix& gcd_dmat) {
    std::vector<ModelVariant> out;
    {
        ModelVariant v;
        v.name = "local";
        v.kind = VariantKind::local;
        out.push_back(v);
    }
    {
        ModelVariant v;
        v.name = "global";
        v.kind = VariantKind::global;
        out.push_back(v);
    }
    {
        ModelVariant v;
        v.name = "gd";
        v.kind = VariantKind::weighted;
        v.scheme = WeightScheme::stochastic_neighborhood(1.0, WeightDistance::graph);
        v.tic_select = true;
        out.push_back(v);
    }
    const double matched = matched_adjacency_threshold(graph_dmat, gcd_dmat);
    for (const double dl : {0.5, 1.0, 2.0, matched}) {
        ModelVariant v;
        v.name = "gcd:dl=" + format_double(dl);
        v.kind = VariantKind::weighted;
        v.scheme =
            WeightScheme::stochastic_neighborhood(1.0, WeightDistance::great_circle_normalized, dl);
        v.tic_select = true;
        out.push_back(v);
    }
    return out;
}

namespace {

/// Indicator threshold that keeps only zero-distance (same-county) subjects.
double local_threshold(const DistanceMatrix& dmat) {
    double min_positive = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dmat.size(); ++i)
        for (int j = 0; j < dmat.size(); ++j) {
            const double v = dmat.values(i, j);
            if (std::isfinite(v) && v > 0.0 && v < min_positive) min_positive = v;
        }
    if (!std::isfinite(min_positive)) return 0.5;
    return 0.5 * min_positive;
}

struct Column {
    int variant = 0;
    double h = kNan; // NaN for local/global
};

} // namespace

StudyResult run_study(const SimScenario& scenario, const SpatialGraph& graph,
                      const DistanceMatrix& graph_dmat, const DistanceMatrix& gcd_dmat,
                      const std::vector<ModelVariant>& variants, const StudyConfig& config) {
    if (config.replicates < 2) throw data_error("study needs at least two replicates");
    if (variants.empty()) throw data_error("no model variants");
    std::vector<double> grid = config.grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    bool any_weighted = false;
    for (const auto& v : variants) any_weighted |= v.kind == VariantKind::weighted;
    if (any_weighted && grid.empty()) throw data_error("weighted variants need a bandwidth grid");

    const Eigen::MatrixXd truths = scenario_betas(scenario, graph, graph_dmat);
    const int counties = graph.size();
    const int p = 3;

    std::vector<Column> columns;
    std::vector<std::vector<int>> variant_columns(variants.size());
    for (std::size_t v = 0; v < variants.size(); ++v) {
        if (variants[v].kind == VariantKind::weighted) {
            for (double h : grid) {
                variant_columns[v].push_back(static_cast<int>(columns.size()));
                columns.push_back({static_cast<int>(v), h});
            }
        } else {
            variant_columns[v].push_back(static_cast<int>(columns.size()));
            columns.push_back({static_cast<int>(v), kNan});
        }
    }

    const int R = config.replicates;
    std::vector<std::vector<Eigen::MatrixXd>> est(columns.size());
    std::vector<std::vector<Eigen::MatrixXd>> ses(columns.size());
    for (auto& col : est) col.assign(R, Eigen::MatrixXd::Constant(counties, p, kNan));
    for (auto& col : ses) col.assign(R, Eigen::MatrixXd::Constant(counties, p, kNan));
    // selected bandwidth per (variant, replicate); NaN = no valid grid point
    std::vector<std::vector<double>> selected(variants.size(), std::vector<double>(R, kNan));

    const WeightScheme local_scheme =
        WeightScheme::indicator(local_threshold(graph_dmat), WeightDistance::graph);

    parallel_for(static_cast<std::size_t>(R), config.threads, [&](std::size_t r) {
        const Cohort cohort =
            simulate_cohort(truths, scenario, graph, config.base_seed + r, nullptr);
        const Eigen::VectorXd unit = Eigen::VectorXd::Ones(cohort.n());

        for (std::size_t v = 0; v < variants.size(); ++v) {
            const ModelVariant& variant = variants[v];
            switch (variant.kind) {
                case VariantKind::global: {
                    const FitResult fit = fit_location(cohort, unit, config.fit);
                    auto& e = est[variant_columns[v][0]][r];
                    auto& s = ses[variant_columns[v][0]][r];
                    if (fit.converged) {
                        for (int l = 0; l < counties; ++l) {
                            e.row(l) = fit.beta.transpose();
                            s.row(l) = fit.se.transpose();
                        }
                    }
                    break;
                }
                case VariantKind::local: {
                    const auto fits =
                        fit_all_locations(cohort, graph_dmat, local_scheme, config.fit, 1);
                    auto& e = est[variant_columns[v][0]][r];
                    auto& s = ses[variant_columns[v][0]][r];
                    for (int l = 0; l < counties; ++l) {
                        if (!fits[l].converged) continue;
                        e.row(l) = fits[l].beta.transpose();
                        s.row(l) = fits[l].se.transpose();
                    }
                    break;
                }
                case VariantKind::weighted: {
                    const DistanceMatrix& dmat =
                        variant.scheme.distance == WeightDistance::graph ? graph_dmat : gcd_dmat;
                    double best_tic = std::numeric_limits<double>::infinity();
                    double best_h = kNan;
                    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                        const WeightScheme scheme = variant.scheme.with_bandwidth(grid[gi]);
                        const auto fits = fit_all_locations(cohort, dmat, scheme, config.fit, 1);
                        auto& e = est[variant_columns[v][gi]][r];
                        auto& s = ses[variant_columns[v][gi]][r];
                        int failed = 0;
                        for (int l = 0; l < counties; ++l) {
                            if (!fits[l].converged) {
                                ++failed;
                                continue;
                            }
                            e.row(l) = fits[l].beta.transpose();
                            s.row(l) = fits[l].se.transpose();
                        }
                        if (variant.tic_select && failed == 0) {
                            std::vector<Eigen::MatrixXd> infos(counties);
                            for (int l = 0; l < counties; ++l) {
                                const Eigen::VectorXd county = location_weights(dmat, l, scheme);
                                const WeightVector wv = expand_to_subjects(county, cohort, l);
                                infos[l] = observed_information(cohort, wv.values, fits[l].beta);
                            }
                            const TicValue value = tic(cohort, fits, infos);
                            if (value.total < best_tic ||
                                (value.total == best_tic && grid[gi] < best_h)) {
                                best_tic = value.total;
                                best_h = grid[gi];
                            }
                        }
                    }
                    if (variant.tic_select) selected[v][r] = best_h;
                    break;
                }
            }
        }
    });

    StudyResult result;
    result.metrics.replicates = R;

    long failed_fits = 0;
    for (std::size_t c = 0; c < columns.size(); ++c)
        for (int r = 0; r < R; ++r)
            for (int l = 0; l < counties; ++l)
                if (!std::isfinite(est[c][r](l, 0))) ++failed_fits;
    result.failed_fits = failed_fits;

    for (std::size_t v = 0; v < variants.size(); ++v) {
        const ModelVariant& variant = variants[v];
        if (variant.kind != VariantKind::weighted) {
            const int c = variant_columns[v][0];
            const MetricsTable t = compute_metrics(est[c], ses[c], truths, variant.name);
            result.metrics.rows.insert(result.metrics.rows.end(), t.rows.begin(), t.rows.end());
            continue;
        }
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            const int c = variant_columns[v][gi];
            const MetricsTable t = compute_metrics(
                est[c], ses[c], truths, variant.name + ":h=" + format_double(grid[gi]));
            result.metrics.rows.insert(result.metrics.rows.end(), t.rows.begin(), t.rows.end());
        }
        if (variant.tic_select) {
            StudyResult::Selection sel;
            sel.variant = variant.name;
            for (int r = 0; r < R; ++r) {
                const double h = selected[v][r];
                if (std::isfinite(h)) ++sel.counts[h];
            }
            if (!sel.counts.empty()) {
                int best_count = 0;
                for (const auto& [h, count] : sel.counts) {
                    if (count > best_count) { // map iterates ascending: ties keep smaller h
                        best_count = count;
                        sel.modal_h = h;
                    }
                }
                const auto it = std::find(grid.begin(), grid.end(), sel.modal_h);
                const int c = variant_columns[v][it - grid.begin()];
                const MetricsTable t =
                    compute_metrics(est[c], ses[c], truths, variant.name + ":selected");
                result.metrics.rows.insert(result.metrics.rows.end(), t.rows.begin(), t.rows.end());
            } else {
                sel.modal_h = kNan;
            }
            result.selections.push_back(std::move(sel));
        }
    }

    if (config.keep_estimates) {
        for (int r = 0; r < R; ++r)
            for (std::size_t c = 0; c < columns.size(); ++c)
                for (int l = 0; l < counties; ++l)
                    for (int m = 0; m < p; ++m) {
                        EstimateRecord rec;
                        rec.replicate = r;
                        rec.county = l;
                        rec.coefficient = m;
                        rec.estimate = est[c][r](l, m);
                        rec.se = ses[c][r](l, m);
                        rec.variant = variants[columns[c].variant].name;
                        rec.h = columns[c].h;
                        result.estimates.push_back(std::move(rec));
                    }
    }
    return result;
}

} // namespace geocox
