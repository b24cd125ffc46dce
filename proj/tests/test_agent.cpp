#include <doctest.h>

#include <cmath>
#include <vector>

#include "dtdsim/agent.hpp"
#include "dtdsim/error.hpp"
#include "dtdsim/rng.hpp"

using namespace dtdsim;

namespace {

AgentState two_route_agent() {
    AgentState a;
    a.id = 0;
    a.od = {1, 2};
    a.memories.resize(2);
    return a;
}

}  // namespace

TEST_CASE("moving average blends new observations with weight omega") {
    CHECK(ewmatt_update(30.0, 40.0, 0.2, true) == doctest::Approx(32.0));
    CHECK(ewmatt_update(0.0, 17.5, 0.2, false) == doctest::Approx(17.5));  // first seeds
    CHECK(ewmatt_update(10.0, 20.0, 1.0, true) == doctest::Approx(20.0));  // memoryless
}

TEST_CASE("moving average rejects weights outside (0, 1]") {
    CHECK_THROWS_AS(ewmatt_update(1.0, 2.0, 0.0, true), ConfigError);
    CHECK_THROWS_AS(ewmatt_update(1.0, 2.0, -0.1, true), ConfigError);
    CHECK_THROWS_AS(ewmatt_update(1.0, 2.0, 1.5, true), ConfigError);
}

TEST_CASE("recursive moving average equals the unrolled geometric sum") {
    Rng rng(314159);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng.bounded(30));
        const double omega = rng.uniform(0.01, 1.0);
        std::vector<double> obs(static_cast<std::size_t>(n));
        for (auto& t : obs) t = rng.uniform(0.0, 120.0);

        double recursive = 0.0;
        bool seeded = false;
        for (const double t : obs) {
            recursive = ewmatt_update(recursive, t, omega, seeded);
            seeded = true;
        }

        // Direct form: the seed decays by (1-w)^(n-1), observation i (1-based)
        // contributes w * (1-w)^(n-i).
        double unrolled = obs[0] * std::pow(1.0 - omega, n - 1);
        for (int i = 2; i <= n; ++i)
            unrolled += omega * std::pow(1.0 - omega, n - i) * obs[static_cast<std::size_t>(i - 1)];

        CHECK(std::abs(recursive - unrolled) <= 1e-10);
    }
}

TEST_CASE("the bonus pays per minute saved and settles in whole cents") {
    CHECK(compute_bonus(38.0, 40.0, 0.02) == doctest::Approx(0.04));
    CHECK(compute_bonus(40.0, 40.0, 0.02) == doctest::Approx(0.0));
    CHECK(compute_bonus(55.0, 40.0, 0.02) == doctest::Approx(0.0));  // never negative
    CHECK(compute_bonus(24.0, 40.0, 0.02) == doctest::Approx(0.32));
    // 0.02 * 12.345 = 0.2469 -> 0.25 after cent rounding.
    CHECK(compute_bonus(40.0 - 12.345, 40.0, 0.02) == doctest::Approx(0.25));
}

TEST_CASE("memory update with full feedback touches every route") {
    AgentState a = two_route_agent();
    update_memory(a, 1, {22.0, 30.0}, Feedback::kAllRoutes, 0.2, 40.0, 0.02);

    CHECK(a.memories[0].chosen_count == 0);
    CHECK(a.memories[0].observed);
    CHECK(a.memories[0].ewmatt == doctest::Approx(22.0));
    CHECK(a.memories[1].chosen_count == 1);
    CHECK(a.memories[1].ewmatt == doctest::Approx(30.0));
    CHECK(a.last_choice == 1);
    CHECK(a.last_travel_time == doctest::Approx(30.0));
    CHECK(a.last_bonus == doctest::Approx(0.2));
    CHECK(a.cumulative_bonus == doctest::Approx(0.2));
    REQUIRE(a.yesterday_times.size() == 2);
    CHECK(a.yesterday_times[0] == doctest::Approx(22.0));
    CHECK(a.yesterday_times[1] == doctest::Approx(30.0));
    CHECK(a.days_traveled() == 1);

    update_memory(a, 0, {20.0, 34.0}, Feedback::kAllRoutes, 0.2, 40.0, 0.02);
    CHECK(a.memories[0].ewmatt == doctest::Approx(0.2 * 20.0 + 0.8 * 22.0));
    CHECK(a.cumulative_bonus == doctest::Approx(0.2 + 0.4));
    CHECK(a.days_traveled() == 2);
}

TEST_CASE("memory update with chosen-only feedback leaves other routes unseen") {
    AgentState a = two_route_agent();
    update_memory(a, 0, {25.0, 31.0}, Feedback::kChosenOnly, 0.2, 40.0, 0.02);

    CHECK(a.memories[0].observed);
    CHECK(!a.memories[1].observed);
    REQUIRE(a.yesterday_times.size() == 2);
    CHECK(a.yesterday_times[0] == doctest::Approx(25.0));
    CHECK(std::isnan(a.yesterday_times[1]));
}

TEST_CASE("a zero bonus rate disables the reward without touching memory") {
    AgentState a = two_route_agent();
    update_memory(a, 0, {10.0, 50.0}, Feedback::kAllRoutes, 0.2, 40.0, 0.0);
    CHECK(a.last_bonus == doctest::Approx(0.0));
    CHECK(a.cumulative_bonus == doctest::Approx(0.0));
    CHECK(a.memories[0].ewmatt == doctest::Approx(10.0));
}

TEST_CASE("perceived time falls back to the free-flow prior until observed") {
    AgentState a = two_route_agent();
    const std::vector<double> prior{6.0, 10.0};
    CHECK(perceived_time(a, 0, prior) == doctest::Approx(6.0));
    CHECK(perceived_time(a, 1, prior) == doctest::Approx(10.0));

    update_memory(a, 0, {30.0, 0.0}, Feedback::kChosenOnly, 0.2, 0.0, 0.0);
    CHECK(perceived_time(a, 0, prior) == doctest::Approx(30.0));
    CHECK(perceived_time(a, 1, prior) == doctest::Approx(10.0));  // still the prior
}
