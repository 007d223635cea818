#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace geocox {

/// One parsed input row: right-censored survival record with a location label.
struct SubjectRecord {
    std::string id;
    double time = 0.0;
    int status = 0; // 1 = event observed, 0 = right-censored
    std::string location;
    std::vector<double> covariates;
};

/// Immutable survival cohort. Locations are registered in first-appearance
/// order and all location-indexed structures (weights, distance matrices,
/// per-location fits) use that ordinal registry.
class Cohort {
public:
    int n() const { return static_cast<int>(time_.size()); }
    int p() const { return static_cast<int>(covariates_.cols()); }
    int num_locations() const { return static_cast<int>(location_labels_.size()); }

    double time(int i) const { return time_[i]; }
    bool event(int i) const { return event_[i]; }
    int location(int i) const { return location_[i]; }
    const std::string& id(int i) const { return id_[i]; }

    /// n x p covariate matrix, one row per subject.
    const Eigen::MatrixXd& covariates() const { return covariates_; }

    const std::vector<std::string>& location_labels() const { return location_labels_; }
    const std::vector<std::string>& covariate_names() const { return covariate_names_; }

    /// Subject indices sorted by time ascending (stable).
    const std::vector<int>& order_by_time() const { return order_by_time_; }

    /// Subject indices grouped per location, each group in input order.
    const std::vector<std::vector<int>>& subjects_at() const { return subjects_at_; }

    /// Index of a location label, or -1.
    int location_index(const std::string& label) const;

    friend Cohort validate_cohort(const std::vector<SubjectRecord>& records, int p,
                                  std::vector<std::string> covariate_names);

private:
    std::vector<std::string> id_;
    std::vector<double> time_;
    std::vector<char> event_;
    std::vector<int> location_;
    Eigen::MatrixXd covariates_;
    std::vector<std::string> location_labels_;
    std::vector<std::string> covariate_names_;
    std::vector<int> order_by_time_;
    std::vector<std::vector<int>> subjects_at_;
};

/// Builds a Cohort from parsed rows, checking times, statuses and covariate
/// counts. Throws data_error with a row-identifying message on bad input.
Cohort validate_cohort(const std::vector<SubjectRecord>& records, int p,
                       std::vector<std::string> covariate_names = {});

/// Indices of subjects still at risk at time t, i.e. with time >= t.
std::vector<int> risk_set(const Cohort& cohort, double t);

/// Product-limit survival curve. Steps occur at distinct event times only;
/// censored subjects shrink the risk sets. Subjects censored at an event time
/// count as at risk at that time (events precede censorings within a tie).
struct KmCurve {
    std::vector<double> times;    // strictly increasing event times
    std::vector<double> survival; // nonincreasing, in [0, 1]
    std::vector<int> at_risk;
    std::vector<int> events;
};

/// Kaplan-Meier estimate over the whole cohort or an index subset.
KmCurve kaplan_meier(const Cohort& cohort, const std::vector<int>* subset = nullptr);

/// Right-continuous step evaluation; 1 before the first event time.
double km_survival_at(const KmCurve& curve, double t);

} // namespace geocox
