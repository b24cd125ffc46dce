#include "dtdsim/decider.hpp"

#include <algorithm>
#include <cmath>

#include "dtdsim/error.hpp"

namespace dtdsim {

namespace {

int route_count(const DeciderInput& input) {
    if (input.agent == nullptr || input.free_flow_times == nullptr)
        throw SimError("decider input is missing the agent or the route priors");
    const auto n = static_cast<int>(input.agent->memories.size());
    if (n == 0) throw SimError("traveler has an empty route set");
    if (input.free_flow_times->size() != input.agent->memories.size())
        throw SimError("route priors do not match the traveler's route set");
    return n;
}

std::vector<double> perceived_times(const DeciderInput& input) {
    const int n = route_count(input);
    std::vector<double> times(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r)
        times[static_cast<std::size_t>(r)] = perceived_time(*input.agent, r, *input.free_flow_times);
    return times;
}

}  // namespace

int argmin_route(const AgentState& agent, const std::vector<double>& free_flow_times) {
    const auto n = static_cast<int>(agent.memories.size());
    int best = 0;
    double best_time = perceived_time(agent, 0, free_flow_times);
    for (int r = 1; r < n; ++r) {
        const double t = perceived_time(agent, r, free_flow_times);
        if (t < best_time) {
            best = r;
            best_time = t;
        }
    }
    return best;
}

Decision RandomDecider::decide(const DeciderInput& input, Rng& rng) {
    const int n = route_count(input);
    return {static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n))), ""};
}

MnlDecider::MnlDecider(double alpha) : alpha_(alpha) {
    if (!(alpha >= 0.0)) throw ConfigError("logit sensitivity must be non-negative");
}

std::vector<double> mnl_probabilities(const std::vector<double>& perceived_times, double alpha) {
    if (perceived_times.empty()) throw SimError("cannot form choice probabilities over no routes");
    // Softmax of -alpha * t, shifted by the max utility for numeric stability.
    double best = -perceived_times[0];
    for (double t : perceived_times) best = std::max(best, -t);
    std::vector<double> probs(perceived_times.size());
    double total = 0.0;
    for (std::size_t r = 0; r < perceived_times.size(); ++r) {
        probs[r] = std::exp(alpha * (-perceived_times[r] - best));
        total += probs[r];
    }
    for (auto& p : probs) p /= total;
    return probs;
}

Decision MnlDecider::decide(const DeciderInput& input, Rng& rng) {
    const auto probs = mnl_probabilities(perceived_times(input), alpha_);
    return {static_cast<int>(rng.pick_weighted(probs)), ""};
}

Decision PrcDecider::decide(const DeciderInput& input, Rng&) {
    route_count(input);
    const auto& agent = *input.agent;
    if (agent.last_choice < 0) throw SimError("rational decider needs a previous choice");
    const int best = argmin_route(agent, *input.free_flow_times);
    const double current = perceived_time(agent, agent.last_choice, *input.free_flow_times);
    const double best_time = perceived_time(agent, best, *input.free_flow_times);
    if (best_time < current) return {best, ""};
    return {agent.last_choice, ""};
}

MockDecider::MockDecider(MockMode mode, double epsilon) : mode_(mode), epsilon_(epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("epsilon must lie in [0, 1]");
}

namespace {

/// Best perceived route, but a tie never pulls the traveler off yesterday's
/// route (so an equal-cost day is a fixed point, not a stampede to route 1).
int sticky_argmin(const AgentState& agent, const std::vector<double>& free_flow_times) {
    const int best = argmin_route(agent, free_flow_times);
    if (agent.last_choice >= 0 &&
        perceived_time(agent, agent.last_choice, free_flow_times) ==
            perceived_time(agent, best, free_flow_times))
        return agent.last_choice;
    return best;
}

}  // namespace

Decision MockDecider::decide(const DeciderInput& input, Rng& rng) {
    const int n = route_count(input);
    switch (mode_) {
        case MockMode::kArgmin:
            return {sticky_argmin(*input.agent, *input.free_flow_times), "lowest expected time"};
        case MockMode::kEpsilonGreedy:
            if (rng.bernoulli(epsilon_))
                return {static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n))), "exploring"};
            return {sticky_argmin(*input.agent, *input.free_flow_times), "lowest expected time"};
        case MockMode::kCyclic:
            return {input.agent->days_traveled() % n, "next route in rotation"};
    }
    throw SimError("unhandled mock decider mode");
}

}  // namespace dtdsim
