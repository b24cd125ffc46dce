#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "dtdsim/error.hpp"
#include "dtdsim/metrics.hpp"

using namespace dtdsim;

namespace {

const OdPair kOd{1, 2};

/// Two-route day log with the given per-agent routes and route times; flows
/// are derived from the choices with one unit per agent.
DayLog make_day(int day, const std::vector<int>& routes, const std::vector<double>& times) {
    DayLog log;
    log.day = day;
    log.route_flows[kOd] = {0.0, 0.0};
    for (std::size_t i = 0; i < routes.size(); ++i) {
        AgentDayRecord r;
        r.agent_id = static_cast<int>(i);
        r.od = kOd;
        r.route = routes[i];
        r.travel_time = times[static_cast<std::size_t>(routes[i])];
        log.agents.push_back(r);
        log.route_flows[kOd][static_cast<std::size_t>(routes[i])] += 1.0;
    }
    log.route_times[kOd] = times;
    return log;
}

const std::vector<int> kUnitWeights{1, 1, 1, 1};

}  // namespace

TEST_CASE("switching rates count unit-weighted route movements") {
    const std::vector<DayLog> days{make_day(1, {0, 0, 1, 1}, {22.0, 30.0}),
                                   make_day(2, {0, 1, 1, 0}, {24.0, 28.0})};
    const SwitchSeries series = switching_rates(days, kUnitWeights);
    REQUIRE(series.at(kOd).size() == 1);
    const DaySwitchMatrix& m = series.at(kOd)[0];
    CHECK(m.day == 1);
    CHECK(m.occupants[0] == doctest::Approx(2.0));
    CHECK(m.occupants[1] == doctest::Approx(2.0));
    CHECK(m.rate(0, 0) == doctest::Approx(0.5));
    CHECK(m.rate(0, 1) == doctest::Approx(0.5));
    CHECK(m.rate(1, 0) == doctest::Approx(0.5));
    CHECK(m.rate(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("agents standing for several travelers weigh in with their units") {
    const std::vector<DayLog> days{make_day(1, {0, 0, 1, 1}, {22.0, 30.0}),
                                   make_day(2, {0, 1, 1, 0}, {24.0, 28.0})};
    const std::vector<int> weights{2, 1, 1, 1};  // agent 0 stands for 2 travelers
    const SwitchSeries series = switching_rates(days, weights);
    const DaySwitchMatrix& m = series.at(kOd)[0];
    CHECK(m.occupants[0] == doctest::Approx(3.0));
    CHECK(m.rate(0, 1) == doctest::Approx(1.0 / 3.0));

    const auto dsr = day_switching_rate(days, weights);
    REQUIRE(dsr.size() == 1);
    CHECK(dsr[0] == doctest::Approx(2.0 / 5.0));
}

TEST_CASE("an empty route has no defined switching rate") {
    const std::vector<DayLog> days{make_day(1, {0, 0, 0, 0}, {22.0, 30.0}),
                                   make_day(2, {0, 0, 1, 0}, {24.0, 28.0})};
    const DaySwitchMatrix& m = switching_rates(days, kUnitWeights).at(kOd)[0];
    CHECK(m.defined(0));
    CHECK(!m.defined(1));
    CHECK_THROWS_AS(m.rate(1, 0), SimError);
}

TEST_CASE("switching rates refuse inconsistent logs") {
    CHECK_THROWS_AS(switching_rates({make_day(1, {0}, {22.0, 30.0})}, kUnitWeights), SimError);
    const std::vector<DayLog> mismatched{make_day(1, {0, 1}, {22.0, 30.0}),
                                         make_day(2, {0}, {24.0, 28.0})};
    CHECK_THROWS_AS(switching_rates(mismatched, kUnitWeights), SimError);
}

TEST_CASE("defined rows of the switching matrix sum to one") {
    const std::vector<DayLog> days{make_day(1, {0, 0, 1, 1}, {22.0, 30.0}),
                                   make_day(2, {1, 1, 0, 0}, {24.0, 28.0}),
                                   make_day(3, {0, 1, 0, 1}, {26.0, 26.0})};
    for (const auto& [od, matrices] : switching_rates(days, kUnitWeights)) {
        for (const auto& m : matrices) {
            for (std::size_t i = 0; i < m.occupants.size(); ++i) {
                if (!m.defined(static_cast<int>(i))) continue;
                double row = 0.0;
                for (std::size_t j = 0; j < m.occupants.size(); ++j)
                    row += m.rate(static_cast<int>(i), static_cast<int>(j));
                CHECK(row == doctest::Approx(1.0));
            }
        }
    }
}

TEST_CASE("a quarter of sixteen travelers switching reads 0.25") {
    std::vector<int> before(16, 0), after(16, 0);
    for (int i = 0; i < 4; ++i) after[static_cast<std::size_t>(i)] = 1;  // 4 of 16 move
    const std::vector<DayLog> days{make_day(1, before, {22.0, 30.0}),
                                   make_day(2, after, {24.0, 28.0})};
    const std::vector<int> units(16, 1);
    const auto dsr = day_switching_rate(days, units);
    CHECK(dsr[0] == doctest::Approx(0.25));
}

TEST_CASE("cost combinations key on two-decimal renderings") {
    CHECK(cost_combo_key({22.0, 54.0}) == "22.00|54.00");
    CHECK(cost_combo_key({22.004, 53.999}) == "22.00|54.00");
    CHECK(cost_combo_key({6.0}) == "6.00");
}

TEST_CASE("average switching pools days that share a cost combination") {
    // Days 1 and 2 present the same costs; day 3 differs. Transition rates
    // out of day 1: p01 = 0.5; out of day 2: p01 = 0.0.
    const std::vector<DayLog> days{make_day(1, {0, 0, 1, 1}, {22.0, 30.0}),
                                   make_day(2, {0, 1, 1, 1}, {22.0, 30.0}),
                                   make_day(3, {0, 1, 1, 1}, {26.0, 26.0})};
    const auto series = switching_rates(days, kUnitWeights);
    const auto average = average_switching_by_cost(days, series);
    const auto& combos = average.at(kOd);
    REQUIRE(combos.count("22.00|30.00") == 1);
    const CostComboStat& stat = combos.at("22.00|30.00");
    CHECK(stat.days_counted[0][1] == 2);
    CHECK(stat.rate_sum[0][1] / stat.days_counted[0][1] == doctest::Approx(0.25));
}

TEST_CASE("descriptive statistics report mean, gap, and population spread") {
    const std::vector<DayLog> days{make_day(1, {0, 0, 1, 1}, {20.0, 30.0}),
                                   make_day(2, {0, 1, 1, 0}, {24.0, 34.0})};
    const std::map<OdPair, std::vector<double>> refs{{kOd, {22.0, 30.0}}};
    const auto stats = descriptive_stats(days, refs, 1, 2);
    const auto& rows = stats.at(kOd);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mean == doctest::Approx(22.0));
    CHECK(rows[0].rel_gap == doctest::Approx(0.0));
    CHECK(rows[0].std_dev == doctest::Approx(2.0));  // population: sqrt(((2)^2+(2)^2)/2)
    CHECK(rows[1].mean == doctest::Approx(32.0));
    CHECK(rows[1].rel_gap == doctest::Approx(2.0 / 30.0));
}

TEST_CASE("the day window of the statistics is honored") {
    const std::vector<DayLog> days{make_day(1, {0, 0, 1, 1}, {10.0, 30.0}),
                                   make_day(2, {0, 0, 1, 1}, {20.0, 30.0}),
                                   make_day(3, {0, 0, 1, 1}, {40.0, 30.0})};
    const std::map<OdPair, std::vector<double>> refs{{kOd, {22.0, 30.0}}};
    const auto stats = descriptive_stats(days, refs, 2, 3);
    CHECK(stats.at(kOd)[0].mean == doctest::Approx(30.0));
    CHECK_THROWS_AS(descriptive_stats(days, refs, 7, 9), SimError);
}

TEST_CASE("the switching csv carries per-run and pooled rows") {
    const std::vector<std::vector<DayLog>> runs{
        {make_day(1, {0, 0, 1, 1}, {22.0, 30.0}), make_day(2, {0, 1, 1, 0}, {24.0, 28.0})},
        {make_day(1, {0, 0, 1, 1}, {22.0, 30.0}), make_day(2, {0, 0, 1, 1}, {24.0, 28.0})}};
    std::ostringstream out;
    write_switching_rates_csv(runs, kUnitWeights, out);
    const std::string csv = out.str();
    CHECK(csv.find("run,od,day,from_route,to_route,switch_units,occupant_units,rate\n") == 0);
    CHECK(csv.find("\n1,1->2,1,") != std::string::npos);
    CHECK(csv.find("\n2,1->2,1,") != std::string::npos);
    // Pooled: occupants double up, run 1 moved 1 of 2 off route 1, run 2 none.
    CHECK(csv.find("pooled,1->2,1,1,2,1,4,0.25") != std::string::npos);
}

TEST_CASE("the cost-combination csv quotes its key column") {
    const std::vector<std::vector<DayLog>> runs{
        {make_day(1, {0, 0, 1, 1}, {22.0, 30.0}), make_day(2, {0, 1, 1, 0}, {24.0, 28.0})}};
    std::ostringstream out;
    write_avg_switching_by_cost_csv(runs, kUnitWeights, out);
    const std::string csv = out.str();
    CHECK(csv.find("run,od,costs,from_route,to_route,avg_rate,n_days\n") == 0);
    CHECK(csv.find("\"22.00|30.00\"") != std::string::npos);
    CHECK(csv.find("pooled,") != std::string::npos);
}

TEST_CASE("the day-rate csv averages replications in its pooled rows") {
    // Run 1 switches half the travelers, run 2 none: pooled mean 0.25.
    const std::vector<std::vector<DayLog>> runs{
        {make_day(1, {0, 0, 1, 1}, {22.0, 30.0}), make_day(2, {0, 1, 1, 0}, {24.0, 28.0})},
        {make_day(1, {0, 0, 1, 1}, {22.0, 30.0}), make_day(2, {0, 0, 1, 1}, {24.0, 28.0})}};
    std::ostringstream out;
    write_dsr_csv(runs, kUnitWeights, out);
    const std::string csv = out.str();
    CHECK(csv.find("run,day,rate\n") == 0);
    CHECK(csv.find("1,1,0.5\n") != std::string::npos);
    CHECK(csv.find("2,1,0\n") != std::string::npos);
    CHECK(csv.find("pooled,1,0.25\n") != std::string::npos);
}

TEST_CASE("the statistics csv pools all replications' days") {
    const std::vector<std::vector<DayLog>> runs{
        {make_day(1, {0, 0, 1, 1}, {20.0, 30.0})}, {make_day(1, {0, 0, 1, 1}, {24.0, 30.0})}};
    const std::map<OdPair, std::vector<double>> refs{{kOd, {22.0, 30.0}}};
    std::ostringstream out;
    write_stats_csv(runs, refs, out);
    const std::string csv = out.str();
    CHECK(csv.find("run,od,route,equilibrium_time,mean,rel_gap,std\n") == 0);
    CHECK(csv.find("1,1->2,1,22,20,") != std::string::npos);
    CHECK(csv.find("2,1->2,1,22,24,") != std::string::npos);
    CHECK(csv.find("pooled,1->2,1,22,22,0,2\n") != std::string::npos);
}
