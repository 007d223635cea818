// Small helpers for assembling cohorts and graphs in tests.
#pragma once

#include <string>
#include <vector>

#include "geocox/cohort.hpp"
#include "geocox/graph.hpp"

namespace builders {

struct Row {
    double time;
    int status;
    std::vector<double> covariates;
    std::string location = "A";
};

inline geocox::Cohort cohort_of(const std::vector<Row>& rows) {
    std::vector<geocox::SubjectRecord> records;
    int id = 0;
    for (const auto& row : rows) {
        geocox::SubjectRecord rec;
        rec.id = std::to_string(++id);
        rec.time = row.time;
        rec.status = row.status;
        rec.location = row.location;
        rec.covariates = row.covariates;
        records.push_back(std::move(rec));
    }
    return geocox::validate_cohort(records, records.empty() ? 0 : static_cast<int>(records[0].covariates.size()));
}

inline geocox::SpatialGraph path_graph(int n) {
    std::vector<geocox::GraphNode> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < n; ++i) nodes.push_back({std::string(1, char('A' + i)), {}, {}});
    for (int i = 0; i + 1 < n; ++i)
        edges.emplace_back(std::string(1, char('A' + i)), std::string(1, char('A' + i + 1)));
    return geocox::build_graph(nodes, edges);
}

inline std::string fixture(const char* name) {
    return std::string(GEOCOX_FIXTURE_DIR) + "/" + name;
}

} // namespace builders
