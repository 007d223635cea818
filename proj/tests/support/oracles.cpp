#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace oracles {

Eigen::VectorXd fd_gradient(const ScalarFn& f, const Eigen::VectorXd& x, double step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd e = x;
    for (int k = 0; k < x.size(); ++k) {
        e[k] = x[k] + step;
        const double up = f(e);
        e[k] = x[k] - step;
        const double down = f(e);
        e[k] = x[k];
        g[k] = (up - down) / (2.0 * step);
    }
    return g;
}

Eigen::MatrixXd fd_jacobian(const VectorFn& f, const Eigen::VectorXd& x, double step) {
    const Eigen::VectorXd base = f(x);
    Eigen::MatrixXd jac(base.size(), x.size());
    Eigen::VectorXd e = x;
    for (int k = 0; k < x.size(); ++k) {
        e[k] = x[k] + step;
        const Eigen::VectorXd up = f(e);
        e[k] = x[k] - step;
        const Eigen::VectorXd down = f(e);
        e[k] = x[k];
        jac.col(k) = (up - down) / (2.0 * step);
    }
    return jac;
}

Eigen::VectorXd nelder_mead_max(const ScalarFn& f, const Eigen::VectorXd& start,
                                double initial_step, int max_iterations, double tol) {
    const int p = static_cast<int>(start.size());
    const auto neg = [&f](const Eigen::VectorXd& x) { return -f(x); };

    std::vector<Eigen::VectorXd> pts(p + 1, start);
    for (int k = 0; k < p; ++k) pts[k + 1][k] += initial_step;
    std::vector<double> vals(p + 1);
    for (int i = 0; i <= p; ++i) vals[i] = neg(pts[i]);

    std::vector<int> order(p + 1);
    for (int it = 0; it < max_iterations; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        const int best = order[0], worst = order[p], second = order[p - 1];

        double spread = 0.0;
        for (int i = 0; i <= p; ++i)
            spread = std::max(spread, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
        if (spread < tol && std::abs(vals[worst] - vals[best]) < tol) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(p);
        for (int i = 0; i <= p; ++i)
            if (i != worst) centroid += pts[i];
        centroid /= p;

        const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
        const double fr = neg(reflected);
        if (fr < vals[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = neg(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
        } else if (fr < vals[second]) {
            pts[worst] = reflected;
            vals[worst] = fr;
        } else {
            const Eigen::VectorXd contracted = centroid + 0.5 * (pts[worst] - centroid);
            const double fc = neg(contracted);
            if (fc < vals[worst]) {
                pts[worst] = contracted;
                vals[worst] = fc;
            } else {
                for (int i = 0; i <= p; ++i) {
                    if (i == best) continue;
                    pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
                    vals[i] = neg(pts[i]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= p; ++i)
        if (vals[i] < vals[best]) best = i;
    return pts[best];
}

Eigen::MatrixXd floyd_warshall(int n, const std::vector<std::pair<int, int>>& edges) {
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, inf);
    for (int i = 0; i < n; ++i) d(i, i) = 0.0;
    for (const auto& [a, b] : edges) {
        d(a, b) = 1.0;
        d(b, a) = 1.0;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    return d;
}

double brute_force_log_pl(const geocox::Cohort& cohort, const Eigen::VectorXd& weights,
                          const Eigen::VectorXd& beta) {
    double ll = 0.0;
    for (int i = 0; i < cohort.n(); ++i) {
        if (!cohort.event(i) || weights[i] <= 0.0) continue;
        double denom = 0.0;
        for (int j = 0; j < cohort.n(); ++j) {
            if (weights[j] <= 0.0 || cohort.time(j) < cohort.time(i)) continue;
            denom += weights[j] * std::exp(cohort.covariates().row(j).dot(beta));
        }
        ll += weights[i] * (std::log(weights[i]) + cohort.covariates().row(i).dot(beta) -
                            std::log(denom));
    }
    return ll;
}

geocox::Cohort random_cohort(geocox::SplitMix64& rng, int n, int p, int locations) {
    std::vector<geocox::SubjectRecord> records(n);
    for (int i = 0; i < n; ++i) {
        auto& rec = records[i];
        rec.id = std::to_string(i + 1);
        rec.time = -std::log(rng.next_open()) * 10.0;
        rec.status = rng.next_bernoulli(0.7) ? 1 : 0;
        rec.location = "L" + std::to_string(rng.next_int(0, locations - 1));
        rec.covariates.resize(p);
        for (int k = 0; k < p; ++k) rec.covariates[k] = rng.next_normal();
    }
    // guarantee at least one event
    records[0].status = 1;
    return geocox::validate_cohort(records, p);
}

Eigen::VectorXd random_weights(geocox::SplitMix64& rng, int n) {
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = 0.05 + 0.95 * rng.next_double();
    return w;
}

} // namespace oracles
