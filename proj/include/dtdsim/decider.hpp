#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dtdsim/agent.hpp"
#include "dtdsim/rng.hpp"

namespace dtdsim {

struct Decision {
    int route = 0;
    std::string reason;     // free text; empty for rule-based deciders
    bool fallback = false;  // decision came from the degraded-path rule
};

/// Everything a decision rule may look at for one traveler on one day.
/// Day 1 never reaches a decider: the engine assigns a uniform random route
/// so every rule starts from the same blank slate.
struct DeciderInput {
    int day = 0;  // 1-based simulated day
    const AgentState* agent = nullptr;
    const std::vector<double>* free_flow_times = nullptr;  // prior for unvisited routes
};

class Decider {
  public:
    virtual ~Decider() = default;
    virtual Decision decide(const DeciderInput& input, Rng& rng) = 0;
    virtual std::string name() const = 0;
};

/// Uniform random route every day.
class RandomDecider : public Decider {
  public:
    Decision decide(const DeciderInput& input, Rng& rng) override;
    std::string name() const override { return "random"; }
};

/// Multinomial logit on perceived times: P(r) proportional to
/// exp(-alpha * perceived_time(r)).
class MnlDecider : public Decider {
  public:
    explicit MnlDecider(double alpha);
    Decision decide(const DeciderInput& input, Rng& rng) override;
    std::string name() const override { return "mnl"; }

  private:
    double alpha_;
};

/// Computes the logit choice distribution over perceived route times.
std::vector<double> mnl_probabilities(const std::vector<double>& perceived_times, double alpha);

/// Pure rational choice: stay on yesterday's route unless some route's
/// perceived time is strictly lower; then take the best (lowest index on ties).
class PrcDecider : public Decider {
  public:
    Decision decide(const DeciderInput& input, Rng& rng) override;
    std::string name() const override { return "prc"; }
};

enum class MockMode { kArgmin, kEpsilonGreedy, kCyclic };

/// Deterministic stand-in for the language-model decider, used by tests and
/// offline runs. argmin: best perceived route, staying on yesterday's route
/// when it ties the minimum. epsilon_greedy: that same rule with an epsilon
/// chance of a uniform draw. cyclic: route (days traveled) mod k, which walks
/// the route set in order regardless of costs.
class MockDecider : public Decider {
  public:
    explicit MockDecider(MockMode mode, double epsilon = 0.1);
    Decision decide(const DeciderInput& input, Rng& rng) override;
    std::string name() const override { return "mock"; }

  private:
    MockMode mode_;
    double epsilon_;
};

/// Lowest perceived-time route, lowest index on ties.
int argmin_route(const AgentState& agent, const std::vector<double>& free_flow_times);

}  // namespace dtdsim
