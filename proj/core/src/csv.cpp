#include "geocox/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "geocox/errors.hpp"
#include "geocox/format.hpp"

namespace geocox {

namespace {

std::string format_sig(double v, const char* fmt) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

std::string trimmed(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trimmed(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw data_error(where + ": cannot parse number '" + s + "'");
    }
}

int parse_int(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw data_error(where + ": cannot parse integer '" + s + "'");
    }
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write '" + path + "'");
    return out;
}

std::string at_line(const std::string& path, std::size_t line) {
    return path + ":" + std::to_string(line);
}

} // namespace

std::string format_double(double v) { return format_sig(v, "%.9g"); }
std::string format_data(double v) { return format_sig(v, "%.15g"); }

Cohort read_cohort(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw data_error(path + ": empty file");
    const auto header = split_csv(line);
    if (header.size() < 4 || header[0] != "id" || header[1] != "time" || header[2] != "status" ||
        header[3] != "location")
        throw data_error(path + ": header must be id,time,status,location,<covariates...>");
    const int p = static_cast<int>(header.size()) - 4;
    std::vector<std::string> names(header.begin() + 4, header.end());

    std::vector<SubjectRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trimmed(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != header.size())
            throw data_error(at_line(path, lineno) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        SubjectRecord rec;
        rec.id = fields[0];
        rec.time = parse_double(fields[1], at_line(path, lineno));
        rec.status = parse_int(fields[2], at_line(path, lineno));
        rec.location = fields[3];
        rec.covariates.reserve(p);
        for (int k = 0; k < p; ++k)
            rec.covariates.push_back(parse_double(fields[4 + k], at_line(path, lineno)));
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw data_error(path + ": no subjects");
    return validate_cohort(records, p, std::move(names));
}

void write_cohort(const std::string& path, const Cohort& cohort) {
    std::ofstream out = open_out(path);
    out << "id,time,status,location";
    for (const auto& name : cohort.covariate_names()) out << ',' << name;
    out << '\n';
    for (int i = 0; i < cohort.n(); ++i) {
        out << cohort.id(i) << ',' << format_data(cohort.time(i)) << ','
            << (cohort.event(i) ? 1 : 0) << ',' << cohort.location_labels()[cohort.location(i)];
        for (int k = 0; k < cohort.p(); ++k) out << ',' << format_data(cohort.covariates()(i, k));
        out << '\n';
    }
}

SpatialGraph read_graph(const std::string& nodes_path, const std::string& edges_path) {
    std::vector<GraphNode> nodes;
    {
        std::ifstream in = open_in(nodes_path);
        std::string line;
        if (!std::getline(in, line)) throw data_error(nodes_path + ": empty file");
        const auto header = split_csv(line);
        if (header.empty() || header[0] != "label")
            throw data_error(nodes_path + ": header must be label,latitude,longitude");
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (trimmed(line).empty()) continue;
            const auto fields = split_csv(line);
            if (fields.empty() || fields[0].empty())
                throw data_error(at_line(nodes_path, lineno) + ": missing label");
            GraphNode node;
            node.label = fields[0];
            if (fields.size() >= 3 && !fields[1].empty() && !fields[2].empty()) {
                node.latitude = parse_double(fields[1], at_line(nodes_path, lineno));
                node.longitude = parse_double(fields[2], at_line(nodes_path, lineno));
            }
            nodes.push_back(std::move(node));
        }
    }
    std::vector<std::pair<std::string, std::string>> edges;
    {
        std::ifstream in = open_in(edges_path);
        std::string line;
        if (!std::getline(in, line)) throw data_error(edges_path + ": empty file");
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (trimmed(line).empty()) continue;
            const auto fields = split_csv(line);
            if (fields.size() != 2)
                throw data_error(at_line(edges_path, lineno) + ": expected label_a,label_b");
            edges.emplace_back(fields[0], fields[1]);
        }
    }
    return build_graph(nodes, edges);
}

void write_matrix(const std::string& path, const DistanceMatrix& matrix) {
    std::ofstream out = open_out(path);
    out << "label";
    for (const auto& label : matrix.labels) out << ',' << label;
    out << '\n';
    for (int i = 0; i < matrix.size(); ++i) {
        out << matrix.labels[i];
        for (int j = 0; j < matrix.size(); ++j) out << ',' << format_double(matrix.values(i, j));
        out << '\n';
    }
}

void write_fits(const std::string& path, const Cohort& cohort,
                const std::vector<FitResult>& fits) {
    std::ofstream out = open_out(path);
    out << "location,covariate,estimate,se,z,converged,iterations,loglik\n";
    const double nan = std::nan("");
    for (const auto& fit : fits) {
        const std::string& label = fit.location >= 0 && fit.location < cohort.num_locations()
                                       ? cohort.location_labels()[fit.location]
                                       : "(all)";
        for (int k = 0; k < cohort.p(); ++k) {
            const bool have = fit.beta.size() == cohort.p();
            const bool have_se = fit.se.size() == cohort.p();
            out << label << ',' << cohort.covariate_names()[k] << ','
                << format_double(have ? fit.beta[k] : nan) << ','
                << format_double(have_se ? fit.se[k] : nan) << ','
                << format_double(have_se ? fit.z[k] : nan) << ',' << (fit.converged ? 1 : 0) << ','
                << fit.iterations << ','
                << format_double(fit.status == FitStatus::no_weighted_events ? nan : fit.loglik)
                << '\n';
        }
    }
}

void write_trace(const std::string& path, const TicTrace& trace) {
    std::ofstream out = open_out(path);
    out << "h,tic,loglik_term,trace_term,n_failed_locations,selected\n";
    for (std::size_t i = 0; i < trace.entries.size(); ++i) {
        const auto& e = trace.entries[i];
        out << format_double(e.h) << ',' << format_double(e.tic) << ','
            << format_double(e.loglik_term) << ',' << format_double(e.trace_term) << ','
            << e.failed_locations << ',' << (static_cast<int>(i) == trace.selected_index ? 1 : 0)
            << '\n';
    }
}

void write_metrics(const std::string& path, const MetricsTable& metrics) {
    std::ofstream out = open_out(path);
    out << "variant,coefficient,mab,msd,mmse,mcp\n";
    for (const auto& row : metrics.rows) {
        out << row.variant << ',' << row.coefficient + 1 << ',' << format_double(row.mab) << ','
            << format_double(row.msd) << ',' << format_double(row.mmse) << ','
            << format_double(row.mcp) << '\n';
    }
}

void write_selection(const std::string& path,
                     const std::vector<StudyResult::Selection>& selections) {
    std::ofstream out = open_out(path);
    out << "variant,h,times_selected\n";
    for (const auto& sel : selections)
        for (const auto& [h, count] : sel.counts)
            out << sel.variant << ',' << format_double(h) << ',' << count << '\n';
}

void write_estimates(const std::string& path, const std::vector<EstimateRecord>& records,
                     const std::vector<std::string>& county_labels) {
    std::ofstream out = open_out(path);
    out << "replicate,county,coefficient,estimate,se,variant,h\n";
    for (const auto& rec : records) {
        out << rec.replicate << ',' << county_labels[rec.county] << ',' << rec.coefficient + 1
            << ',' << format_double(rec.estimate) << ',' << format_double(rec.se) << ','
            << rec.variant << ',' << format_double(rec.h) << '\n';
    }
}

void write_km(const std::string& path, const std::vector<std::string>& labels,
              const std::vector<double>& survival) {
    if (labels.size() != survival.size()) throw data_error("label/survival length mismatch");
    std::ofstream out = open_out(path);
    out << "location,survival\n";
    for (std::size_t i = 0; i < labels.size(); ++i)
        out << labels[i] << ',' << format_double(survival[i]) << '\n';
}

std::vector<double> parse_grid(const std::string& spec) {
    if (spec.empty()) throw std::invalid_argument("empty grid specification");
    std::vector<double> grid;
    if (spec.find(':') != std::string::npos) {
        std::vector<std::string> fields;
        std::string field;
        std::stringstream ss(spec);
        while (std::getline(ss, field, ':')) fields.push_back(trimmed(field));
        if (fields.size() != 3) throw std::invalid_argument("grid must be start:stop:step");
        double start, stop, step;
        try {
            start = std::stod(fields[0]);
            stop = std::stod(fields[1]);
            step = std::stod(fields[2]);
        } catch (const std::exception&) {
            throw std::invalid_argument("grid must be start:stop:step with numeric fields");
        }
        if (step <= 0.0 || stop < start) throw std::invalid_argument("grid needs step > 0 and stop >= start");
        const long count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (long k = 0; k < count; ++k) grid.push_back(start + static_cast<double>(k) * step);
    } else {
        std::string field;
        std::stringstream ss(spec);
        while (std::getline(ss, field, ',')) {
            field = trimmed(field);
            if (field.empty()) throw std::invalid_argument("empty grid element");
            try {
                grid.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw std::invalid_argument("cannot parse grid element '" + field + "'");
            }
        }
    }
    if (grid.empty()) throw std::invalid_argument("empty grid specification");
    return grid;
}

} // namespace geocox
