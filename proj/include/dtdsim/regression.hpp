#pragma once

#include <utility>
#include <vector>

#include "dtdsim/sim.hpp"

namespace dtdsim {

/// One traveler-day: the cost difference seen on day t (stayed-route minus
/// alternative) and whether the traveler left the route on day t+1.
struct SwitchObservation {
    double delta_t = 0.0;
    bool switched = false;
};

/// P(switch) = 1 / (1 + exp(-(theta0 + theta1 * delta_t))).
double logistic_predict(double theta0, double theta1, double delta_t);

/// Bernoulli log-likelihood of the switching model over the observations.
double switching_log_likelihood(double theta0, double theta1,
                                const std::vector<SwitchObservation>& observations);

/// Analytic gradient of the log-likelihood, (d/d theta0, d/d theta1).
std::pair<double, double> switching_gradient(double theta0, double theta1,
                                             const std::vector<SwitchObservation>& observations);

struct FitResult {
    double theta0 = 0.0;
    double theta1 = 0.0;
    double se0 = 0.0;
    double se1 = 0.0;
    double p0 = 1.0;  // two-sided Wald p-values
    double p1 = 1.0;
    double log_likelihood = 0.0;
    bool converged = false;
    int iterations = 0;
    bool separation = false;  // fit diverged: a hyperplane separates the classes
    std::size_t n_obs = 0;
};

/// Maximum-likelihood fit by Newton-Raphson with step-halving; converges when
/// the gradient's max component drops below 1e-8 (at most 100 iterations).
/// Standard errors come from the inverse observed information. Throws
/// SimError when all observations fall in one class.
FitResult fit_switching(const std::vector<SwitchObservation>& observations);

/// Observations for travelers on `from_route` of `od`: delta_t is that
/// route's cost minus `to_route`'s cost on day t, switched is whether the
/// traveler was elsewhere on day t+1. Each agent contributes its traveler
/// units as that many observations; the last day has no successor and yields
/// none.
std::vector<SwitchObservation> extract_observations(const std::vector<DayLog>& days,
                                                    const std::vector<int>& agent_units,
                                                    const OdPair& od, int from_route,
                                                    int to_route);

}  // namespace dtdsim
