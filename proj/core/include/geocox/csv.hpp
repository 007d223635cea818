#pragma once

#include <string>
#include <vector>

#include "geocox/cohort.hpp"
#include "geocox/cox.hpp"
#include "geocox/format.hpp"
#include "geocox/graph.hpp"
#include "geocox/simulate.hpp"
#include "geocox/tic.hpp"

namespace geocox {

/// Cohort CSV with header `id,time,status,location,<covariate names...>`.
Cohort read_cohort(const std::string& path);
void write_cohort(const std::string& path, const Cohort& cohort);

/// Nodes CSV `label,latitude,longitude` (coordinates may be blank) and edges
/// CSV `label_a,label_b` (duplicates ignored).
SpatialGraph read_graph(const std::string& nodes_path, const std::string& edges_path);

/// J x J matrix with a label header row and column.
void write_matrix(const std::string& path, const DistanceMatrix& matrix);

/// One row per (location, covariate):
/// location,covariate,estimate,se,z,converged,iterations,loglik
void write_fits(const std::string& path, const Cohort& cohort,
                const std::vector<FitResult>& fits);

/// h,tic,loglik_term,trace_term,n_failed_locations,selected
void write_trace(const std::string& path, const TicTrace& trace);

/// variant,coefficient,mab,msd,mmse,mcp
void write_metrics(const std::string& path, const MetricsTable& metrics);

/// variant,h,times_selected
void write_selection(const std::string& path, const std::vector<StudyResult::Selection>& selections);

/// replicate,county,coefficient,estimate,se,variant,h
void write_estimates(const std::string& path, const std::vector<EstimateRecord>& records,
                     const std::vector<std::string>& county_labels);

/// location,survival — per-location survival probabilities at a fixed time.
void write_km(const std::string& path, const std::vector<std::string>& labels,
              const std::vector<double>& survival);

/// Grid specification: either `start:stop:step` (inclusive arithmetic
/// sequence) or a comma-separated list of bandwidths.
std::vector<double> parse_grid(const std::string& spec);

} // namespace geocox
