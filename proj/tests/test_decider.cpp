#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "dtdsim/decider.hpp"
#include "dtdsim/error.hpp"

using namespace dtdsim;

namespace {

/// Agent with fully observed memories pinned to the given perceived times.
AgentState agent_with_times(const std::vector<double>& times, int last_choice) {
    AgentState a;
    a.od = {1, 2};
    a.memories.resize(times.size());
    for (std::size_t r = 0; r < times.size(); ++r) {
        a.memories[r].observed = true;
        a.memories[r].ewmatt = times[r];
        a.memories[r].chosen_count = 1;
    }
    a.last_choice = last_choice;
    return a;
}

DeciderInput input_for(const AgentState& agent, const std::vector<double>& free_flow, int day = 2) {
    DeciderInput in;
    in.day = day;
    in.agent = &agent;
    in.free_flow_times = &free_flow;
    return in;
}

}  // namespace

TEST_CASE("logit probabilities match the analytic two-route values") {
    const auto p = mnl_probabilities({20.0, 30.0}, 0.1);
    REQUIRE(p.size() == 2);
    CHECK(p[0] == doctest::Approx(0.7311).epsilon(1e-4));
    CHECK(p[1] == doctest::Approx(0.2689).epsilon(1e-4));
    CHECK(p[0] + p[1] == doctest::Approx(1.0));
}

TEST_CASE("logit probabilities are invariant to shifting all times") {
    const auto base = mnl_probabilities({11.0, 14.0, 9.5}, 0.7);
    const auto shifted = mnl_probabilities({511.0, 514.0, 509.5}, 0.7);
    REQUIRE(base.size() == shifted.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(base[i] == doctest::Approx(shifted[i]).epsilon(1e-12));
}

TEST_CASE("logit probabilities survive extreme magnitudes") {
    const auto p = mnl_probabilities({1000.0, 2000.0}, 5.0);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] >= 0.0);
    CHECK(std::isfinite(p[1]));
}

TEST_CASE("logit sampling frequencies match the analytic probabilities") {
    const std::vector<double> times{20.0, 25.0, 22.0};
    const double alpha = 0.3;
    const auto want = mnl_probabilities(times, alpha);

    const AgentState agent = agent_with_times(times, 0);
    const std::vector<double> free_flow{20.0, 25.0, 22.0};
    MnlDecider decider(alpha);
    Rng rng(777);
    std::array<int, 3> counts{};
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(
        decider.decide(input_for(agent, free_flow), rng).route)];

    for (std::size_t r = 0; r < want.size(); ++r)
        CHECK(std::abs(counts[r] / double(n) - want[r]) <= 0.02);
}

TEST_CASE("logit with huge alpha collapses onto the best route") {
    const AgentState agent = agent_with_times({20.0, 30.0}, 1);
    MnlDecider decider(50.0);
    Rng rng(5);
    const std::vector<double> free_flow{6.0, 6.0};
    for (int i = 0; i < 50; ++i)
        CHECK(decider.decide(input_for(agent, free_flow), rng).route == 0);
}

TEST_CASE("rational rule stays put unless somewhere is strictly faster") {
    const std::vector<double> free_flow{6.0, 6.0};
    Rng rng(1);
    PrcDecider decider;

    const AgentState tied = agent_with_times({25.0, 25.0}, 1);
    CHECK(decider.decide(input_for(tied, free_flow), rng).route == 1);

    const AgentState better_elsewhere = agent_with_times({20.0, 25.0}, 1);
    CHECK(decider.decide(input_for(better_elsewhere, free_flow), rng).route == 0);

    const AgentState already_best = agent_with_times({20.0, 25.0}, 0);
    CHECK(decider.decide(input_for(already_best, free_flow), rng).route == 0);
}

TEST_CASE("rational rule is invariant to scaling all perceived times") {
    const std::vector<double> free_flow{6.0, 6.0, 6.0};
    Rng rng(1);
    PrcDecider decider;
    for (const double scale : {1.0, 3.0, 100.0}) {
        const AgentState a =
            agent_with_times({30.0 * scale, 10.0 * scale, 20.0 * scale}, 2);
        CHECK(decider.decide(input_for(a, free_flow), rng).route == 1);
    }
}

TEST_CASE("rational rule needs a yesterday to stand on") {
    AgentState fresh;
    fresh.memories.resize(2);
    const std::vector<double> free_flow{6.0, 6.0};
    Rng rng(1);
    PrcDecider decider;
    CHECK_THROWS_AS(decider.decide(input_for(fresh, free_flow), rng), SimError);
}

TEST_CASE("greedy mock keeps yesterday's route on an exact tie") {
    const std::vector<double> free_flow{6.0, 6.0};
    Rng rng(1);
    MockDecider decider(MockMode::kArgmin);

    const AgentState tied = agent_with_times({22.0, 22.0}, 1);
    CHECK(decider.decide(input_for(tied, free_flow), rng).route == 1);

    const AgentState strict = agent_with_times({22.0, 21.0}, 0);
    CHECK(decider.decide(input_for(strict, free_flow), rng).route == 1);
}

TEST_CASE("epsilon zero reduces the exploring mock to the greedy one") {
    const std::vector<double> free_flow{6.0, 6.0};
    Rng greedy_rng(9), epsilon_rng(9);
    MockDecider greedy(MockMode::kArgmin);
    MockDecider never_explores(MockMode::kEpsilonGreedy, 0.0);
    for (int last = 0; last < 2; ++last) {
        const AgentState a = agent_with_times({25.0, 23.0}, last);
        CHECK(greedy.decide(input_for(a, free_flow), greedy_rng).route ==
              never_explores.decide(input_for(a, free_flow), epsilon_rng).route);
    }
}

TEST_CASE("exploring mock explores at its configured rate") {
    const std::vector<double> free_flow{6.0, 6.0};
    // Route 0 is clearly better, so any route-1 pick is an exploration draw
    // (half of explorations land back on route 0, halving the visible rate).
    const AgentState a = agent_with_times({10.0, 40.0}, 0);
    MockDecider decider(MockMode::kEpsilonGreedy, 0.1);
    Rng rng(31337);
    int explored = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i)
        if (decider.decide(input_for(a, free_flow), rng).route == 1) ++explored;
    CHECK(std::abs(explored / double(n) - 0.05) <= 0.02);
}

TEST_CASE("cyclic mock walks the route set in order") {
    const std::vector<double> free_flow(5, 6.0);
    Rng rng(1);
    MockDecider decider(MockMode::kCyclic);

    AgentState a;
    a.memories.resize(5);
    a.last_choice = 0;
    a.memories[0].chosen_count = 4;
    a.memories[1].chosen_count = 3;  // 7 days traveled -> 7 mod 5 = route index 2
    CHECK(decider.decide(input_for(a, free_flow), rng).route == 2);
}

TEST_CASE("random decider covers all routes roughly uniformly") {
    const std::vector<double> free_flow{6.0, 6.0, 6.0};
    const AgentState a = agent_with_times({10.0, 20.0, 30.0}, 0);
    RandomDecider decider;
    Rng rng(2024);
    std::array<int, 3> counts{};
    const int n = 9000;
    for (int i = 0; i < n; ++i)
        ++counts[static_cast<std::size_t>(decider.decide(input_for(a, free_flow), rng).route)];
    for (const int c : counts) CHECK(std::abs(c / double(n) - 1.0 / 3.0) <= 0.03);
}
