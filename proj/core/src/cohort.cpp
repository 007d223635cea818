#include "geocox/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "geocox/errors.hpp"

namespace geocox {

int Cohort::location_index(const std::string& label) const {
    for (int j = 0; j < num_locations(); ++j)
        if (location_labels_[j] == label) return j;
    return -1;
}

Cohort validate_cohort(const std::vector<SubjectRecord>& records, int p,
                       std::vector<std::string> covariate_names) {
    if (records.empty()) throw data_error("no subjects");
    if (p < 0) throw data_error("negative covariate dimension");

    Cohort cohort;
    const int n = static_cast<int>(records.size());
    cohort.id_.reserve(n);
    cohort.time_.reserve(n);
    cohort.event_.reserve(n);
    cohort.location_.reserve(n);
    cohort.covariates_.resize(n, p);

    std::unordered_map<std::string, int> registry;
    for (int i = 0; i < n; ++i) {
        const SubjectRecord& r = records[i];
        if (!std::isfinite(r.time)) throw data_error("non-finite time for subject '" + r.id + "'");
        if (r.time < 0.0) throw data_error("negative time for subject '" + r.id + "'");
        if (r.status != 0 && r.status != 1)
            throw data_error("status must be 0 or 1 for subject '" + r.id + "'");
        if (static_cast<int>(r.covariates.size()) != p)
            throw data_error("covariate count mismatch for subject '" + r.id + "': expected " +
                             std::to_string(p) + ", got " + std::to_string(r.covariates.size()));
        for (int k = 0; k < p; ++k) {
            if (!std::isfinite(r.covariates[k]))
                throw data_error("non-finite covariate for subject '" + r.id + "'");
            cohort.covariates_(i, k) = r.covariates[k];
        }
        cohort.id_.push_back(r.id);
        cohort.time_.push_back(r.time);
        cohort.event_.push_back(r.status == 1 ? 1 : 0);

        auto [it, inserted] = registry.try_emplace(r.location, static_cast<int>(cohort.location_labels_.size()));
        if (inserted) cohort.location_labels_.push_back(r.location);
        cohort.location_.push_back(it->second);
    }

    if (covariate_names.empty()) {
        for (int k = 0; k < p; ++k) covariate_names.push_back("z" + std::to_string(k + 1));
    }
    if (static_cast<int>(covariate_names.size()) != p)
        throw data_error("covariate name count mismatch");
    cohort.covariate_names_ = std::move(covariate_names);

    cohort.order_by_time_.resize(n);
    std::iota(cohort.order_by_time_.begin(), cohort.order_by_time_.end(), 0);
    std::stable_sort(cohort.order_by_time_.begin(), cohort.order_by_time_.end(),
                     [&](int a, int b) { return cohort.time_[a] < cohort.time_[b]; });

    cohort.subjects_at_.resize(cohort.location_labels_.size());
    for (int i = 0; i < n; ++i) cohort.subjects_at_[cohort.location_[i]].push_back(i);
    return cohort;
}

std::vector<int> risk_set(const Cohort& cohort, double t) {
    std::vector<int> out;
    for (int i = 0; i < cohort.n(); ++i)
        if (cohort.time(i) >= t) out.push_back(i);
    return out;
}

KmCurve kaplan_meier(const Cohort& cohort, const std::vector<int>* subset) {
    std::vector<int> idx;
    if (subset) {
        if (subset->empty()) throw data_error("empty subset");
        idx = *subset;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return cohort.time(a) < cohort.time(b); });
    } else {
        idx = cohort.order_by_time();
    }

    KmCurve curve;
    double surv = 1.0;
    int at_risk = static_cast<int>(idx.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        const double t = cohort.time(idx[i]);
        int deaths = 0, leaving = 0;
        std::size_t j = i;
        while (j < idx.size() && cohort.time(idx[j]) == t) {
            if (cohort.event(idx[j])) ++deaths;
            ++leaving;
            ++j;
        }
        if (deaths > 0) {
            surv *= 1.0 - static_cast<double>(deaths) / static_cast<double>(at_risk);
            curve.times.push_back(t);
            curve.survival.push_back(surv);
            curve.at_risk.push_back(at_risk);
            curve.events.push_back(deaths);
        }
        at_risk -= leaving;
        i = j;
    }
    return curve;
}

double km_survival_at(const KmCurve& curve, double t) {
    double s = 1.0;
    for (std::size_t k = 0; k < curve.times.size(); ++k) {
        if (curve.times[k] <= t)
            s = curve.survival[k];
        else
            break;
    }
    return s;
}

} // namespace geocox
