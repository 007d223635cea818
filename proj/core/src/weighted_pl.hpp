#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <vector>

#include "geocox/cohort.hpp"

namespace geocox::detail {

/// One-pass evaluator for the weighted Cox log partial likelihood and its
/// derivatives. Weights enter as case weights: each event's whole
/// contribution is multiplied by its weight, and risk-set sums are weighted.
/// Subjects with zero weight are dropped from risk sets; tied event times
/// share a single denominator (Breslow). Scanning runs over a fixed
/// descending-time order, so accumulation is bit-deterministic. Linear
/// predictors are centered at their maximum before exponentiation.
class WeightedPl {
public:
    /// candidates limits the evaluation to a subject subset (within-location
    /// machinery); nullptr means the whole cohort.
    WeightedPl(const Cohort& cohort, const Eigen::VectorXd& weights,
               const std::vector<int>* candidates = nullptr)
        : cohort_(cohort), w_(weights) {
        const auto& asc = cohort.order_by_time();
        order_.reserve(candidates ? candidates->size() : asc.size());
        if (candidates) {
            std::vector<char> keep(cohort.n(), 0);
            for (int i : *candidates) keep[i] = 1;
            for (auto it = asc.rbegin(); it != asc.rend(); ++it)
                if (keep[*it] && w_[*it] > 0.0) order_.push_back(*it);
        } else {
            for (auto it = asc.rbegin(); it != asc.rend(); ++it)
                if (w_[*it] > 0.0) order_.push_back(*it);
        }
        for (int i : order_) {
            if (cohort.event(i)) {
                has_events_ = true;
                weighted_events_ += w_[i];
            }
        }
    }

    bool has_events() const { return has_events_; }
    double weighted_events() const { return weighted_events_; }

    /// Log partial likelihood at beta; fills the gradient and/or the negative
    /// Hessian when requested. Zero events yield 0 (and zero derivatives).
    double evaluate(const Eigen::VectorXd& beta, Eigen::VectorXd* grad = nullptr,
                    Eigen::MatrixXd* info = nullptr) const {
        const Eigen::MatrixXd& Z = cohort_.covariates();
        const int p = static_cast<int>(Z.cols());
        if (grad) grad->setZero(p);
        if (info) info->setZero(p, p);
        if (order_.empty()) return 0.0;

        const Eigen::VectorXd eta = Z * beta;
        double shift = -std::numeric_limits<double>::infinity();
        for (int i : order_) shift = std::max(shift, eta[i]);

        double ll = 0.0;
        double s0 = 0.0;
        Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
        Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
        Eigen::VectorXd zbar(p);
        const bool derivs = grad || info;

        std::size_t i = 0;
        while (i < order_.size()) {
            const double t = cohort_.time(order_[i]);
            std::size_t j = i;
            for (; j < order_.size() && cohort_.time(order_[j]) == t; ++j) {
                const int k = order_[j];
                const double r = w_[k] * std::exp(eta[k] - shift);
                s0 += r;
                if (derivs) s1.noalias() += r * Z.row(k).transpose();
                if (info) s2.noalias() += r * Z.row(k).transpose() * Z.row(k);
            }
            for (std::size_t q = i; q < j; ++q) {
                const int k = order_[q];
                if (!cohort_.event(k)) continue;
                const double wk = w_[k];
                ll += wk * (std::log(wk) + (eta[k] - shift) - std::log(s0));
                if (derivs) {
                    zbar = s1 / s0;
                    if (grad) grad->noalias() += wk * (Z.row(k).transpose() - zbar);
                    if (info) {
                        info->noalias() += (wk / s0) * s2;
                        info->noalias() -= wk * zbar * zbar.transpose();
                    }
                }
            }
            i = j;
        }
        return ll;
    }

    /// Log partial likelihood restricted to events of one location, with risk
    /// sets over the full candidate set (criterion sensitivity variant).
    double loglik_events_at(const Eigen::VectorXd& beta, int location) const {
        const Eigen::MatrixXd& Z = cohort_.covariates();
        if (order_.empty()) return 0.0;
        const Eigen::VectorXd eta = Z * beta;
        double shift = -std::numeric_limits<double>::infinity();
        for (int i : order_) shift = std::max(shift, eta[i]);

        double ll = 0.0;
        double s0 = 0.0;
        std::size_t i = 0;
        while (i < order_.size()) {
            const double t = cohort_.time(order_[i]);
            std::size_t j = i;
            for (; j < order_.size() && cohort_.time(order_[j]) == t; ++j) {
                const int k = order_[j];
                s0 += w_[k] * std::exp(eta[k] - shift);
            }
            for (std::size_t q = i; q < j; ++q) {
                const int k = order_[q];
                if (!cohort_.event(k) || cohort_.location(k) != location) continue;
                ll += w_[k] * (std::log(w_[k]) + (eta[k] - shift) - std::log(s0));
            }
            i = j;
        }
        return ll;
    }

    /// Curvature with squared weights and squared risk scores in the first
    /// term; kept for evaluation experiments only.
    Eigen::MatrixXd squared_weight_curvature(const Eigen::VectorXd& beta) const {
        const Eigen::MatrixXd& Z = cohort_.covariates();
        const int p = static_cast<int>(Z.cols());
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
        if (order_.empty()) return out;

        const Eigen::VectorXd eta = Z * beta;
        double shift = -std::numeric_limits<double>::infinity();
        for (int i : order_) shift = std::max(shift, eta[i]);

        double s0 = 0.0;
        Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
        Eigen::MatrixXd s2sq = Eigen::MatrixXd::Zero(p, p);
        std::size_t i = 0;
        while (i < order_.size()) {
            const double t = cohort_.time(order_[i]);
            std::size_t j = i;
            for (; j < order_.size() && cohort_.time(order_[j]) == t; ++j) {
                const int k = order_[j];
                const double e = std::exp(eta[k] - shift);
                const double r = w_[k] * e;
                s0 += r;
                s2.noalias() += r * Z.row(k).transpose() * Z.row(k);
                s2sq.noalias() += r * r * Z.row(k).transpose() * Z.row(k);
            }
            for (std::size_t q = i; q < j; ++q) {
                const int k = order_[q];
                if (!cohort_.event(k)) continue;
                out.noalias() += s2sq / (s0 * s0);
                out.noalias() -= s2 / s0;
            }
            i = j;
        }
        return out;
    }

private:
    const Cohort& cohort_;
    const Eigen::VectorXd& w_;
    std::vector<int> order_; // positively weighted candidates, time descending
    bool has_events_ = false;
    double weighted_events_ = 0.0;
};

} // namespace geocox::detail
