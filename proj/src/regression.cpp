#include "dtdsim/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtdsim/error.hpp"

namespace dtdsim {

double logistic_predict(double theta0, double theta1, double delta_t) {
    return 1.0 / (1.0 + std::exp(-(theta0 + theta1 * delta_t)));
}

double switching_log_likelihood(double theta0, double theta1,
                                const std::vector<SwitchObservation>& observations) {
    // log p = -log1p(exp(-z)), log(1-p) = -z - log1p(exp(-z)); evaluate via
    // the stable softplus form log1p(exp(-|z|)).
    double ll = 0.0;
    for (const auto& obs : observations) {
        const double z = theta0 + theta1 * obs.delta_t;
        const double softplus = std::log1p(std::exp(-std::abs(z)));
        // log(1+e^z) = max(z,0) + log1p(e^-|z|)
        const double log_denominator = std::max(z, 0.0) + softplus;
        ll += (obs.switched ? z : 0.0) - log_denominator;
    }
    return ll;
}

std::pair<double, double> switching_gradient(double theta0, double theta1,
                                             const std::vector<SwitchObservation>& observations) {
    double g0 = 0.0, g1 = 0.0;
    for (const auto& obs : observations) {
        const double residual =
            (obs.switched ? 1.0 : 0.0) - logistic_predict(theta0, theta1, obs.delta_t);
        g0 += residual;
        g1 += residual * obs.delta_t;
    }
    return {g0, g1};
}

FitResult fit_switching(const std::vector<SwitchObservation>& observations) {
    FitResult fit;
    fit.n_obs = observations.size();
    if (observations.size() < 2)
        throw SimError("logistic fit needs at least two observations");
    const bool any_switched = std::any_of(observations.begin(), observations.end(),
                                          [](const auto& o) { return o.switched; });
    const bool any_stayed = std::any_of(observations.begin(), observations.end(),
                                        [](const auto& o) { return !o.switched; });
    if (!any_switched || !any_stayed)
        throw SimError("logistic fit is degenerate: every observation " +
                       std::string(any_switched ? "switched" : "stayed"));

    constexpr double kGradientTolerance = 1e-8;
    constexpr int kMaxIterations = 100;

    double t0 = 0.0, t1 = 0.0;
    double ll = switching_log_likelihood(t0, t1, observations);
    double h00 = 0.0, h01 = 0.0, h11 = 0.0;  // negative Hessian (observed information)
    bool information_ok = false;

    for (fit.iterations = 0; fit.iterations < kMaxIterations; ++fit.iterations) {
        const auto [g0, g1] = switching_gradient(t0, t1, observations);
        h00 = h01 = h11 = 0.0;
        for (const auto& obs : observations) {
            const double p = logistic_predict(t0, t1, obs.delta_t);
            const double w = p * (1.0 - p);
            h00 += w;
            h01 += w * obs.delta_t;
            h11 += w * obs.delta_t * obs.delta_t;
        }
        if (std::max(std::abs(g0), std::abs(g1)) < kGradientTolerance) {
            fit.converged = true;
            information_ok = true;
            break;
        }
        const double det = h00 * h11 - h01 * h01;
        if (!(det > 1e-300)) break;  // information matrix collapsed
        information_ok = true;
        // Newton direction: solve (information) * d = gradient.
        double d0 = (h11 * g0 - h01 * g1) / det;
        double d1 = (h00 * g1 - h01 * g0) / det;
        // Step-halving keeps the likelihood ascending.
        double step = 1.0;
        double candidate = switching_log_likelihood(t0 + d0, t1 + d1, observations);
        int halvings = 0;
        while (candidate < ll - 1e-12 && halvings < 60) {
            step *= 0.5;
            candidate = switching_log_likelihood(t0 + step * d0, t1 + step * d1, observations);
            ++halvings;
        }
        t0 += step * d0;
        t1 += step * d1;
        ll = candidate;
    }

    fit.theta0 = t0;
    fit.theta1 = t1;
    fit.log_likelihood = ll;

    if (!fit.converged) {
        // A diverging fit drives |theta0 + theta1*d| toward infinity for every
        // observation — the classic signature of (quasi-)separated data.
        double max_z = 0.0;
        for (const auto& obs : observations)
            max_z = std::max(max_z, std::abs(t0 + t1 * obs.delta_t));
        fit.separation = max_z > 30.0;
    }

    const double det = h00 * h11 - h01 * h01;
    if (information_ok && det > 0.0) {
        fit.se0 = std::sqrt(h11 / det);
        fit.se1 = std::sqrt(h00 / det);
        auto wald_p = [](double estimate, double se) {
            if (!(se > 0.0)) return 1.0;
            return std::erfc(std::abs(estimate / se) / std::sqrt(2.0));
        };
        fit.p0 = wald_p(fit.theta0, fit.se0);
        fit.p1 = wald_p(fit.theta1, fit.se1);
    } else {
        fit.se0 = fit.se1 = std::numeric_limits<double>::quiet_NaN();
        fit.p0 = fit.p1 = 1.0;
    }
    return fit;
}

std::vector<SwitchObservation> extract_observations(const std::vector<DayLog>& days,
                                                    const std::vector<int>& agent_units,
                                                    const OdPair& od, int from_route,
                                                    int to_route) {
    std::vector<SwitchObservation> observations;
    for (std::size_t t = 0; t + 1 < days.size(); ++t) {
        const DayLog& today = days[t];
        const DayLog& tomorrow = days[t + 1];
        const auto& times = today.route_times.at(od);
        const double delta = times.at(static_cast<std::size_t>(from_route)) -
                             times.at(static_cast<std::size_t>(to_route));
        for (std::size_t i = 0; i < today.agents.size(); ++i) {
            const auto& now = today.agents[i];
            if (now.od != od || now.route != from_route) continue;
            if (tomorrow.agents.at(i).agent_id != now.agent_id)
                throw SimError("day logs disagree on agent ordering");
            const bool switched = tomorrow.agents[i].route != from_route;
            const int units = agent_units.at(static_cast<std::size_t>(now.agent_id));
            for (int u = 0; u < units; ++u) observations.push_back({delta, switched});
        }
    }
    return observations;
}

}  // namespace dtdsim
