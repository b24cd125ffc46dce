#include "dtdsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "dtdsim/error.hpp"

namespace dtdsim {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

int units_for(const std::vector<int>& agent_units, int agent_id) {
    if (agent_id < 0 || static_cast<std::size_t>(agent_id) >= agent_units.size())
        throw SimError("agent id " + std::to_string(agent_id) + " has no unit entry");
    return agent_units[static_cast<std::size_t>(agent_id)];
}

}  // namespace

bool DaySwitchMatrix::defined(int from) const {
    return occupants.at(static_cast<std::size_t>(from)) > 0.0;
}

double DaySwitchMatrix::rate(int from, int to) const {
    if (!defined(from))
        throw SimError("switching rate undefined: route " + std::to_string(from + 1) +
                       " is empty on day " + std::to_string(day));
    return moved.at(static_cast<std::size_t>(from)).at(static_cast<std::size_t>(to)) /
           occupants.at(static_cast<std::size_t>(from));
}

SwitchSeries switching_rates(const std::vector<DayLog>& days,
                             const std::vector<int>& agent_units) {
    if (days.size() < 2) throw SimError("switching rates need at least two days");
    SwitchSeries series;

    for (std::size_t t = 0; t + 1 < days.size(); ++t) {
        const DayLog& today = days[t];
        const DayLog& tomorrow = days[t + 1];
        if (today.agents.size() != tomorrow.agents.size())
            throw SimError("day logs disagree on the agent population");

        std::map<OdPair, DaySwitchMatrix> by_od;
        for (const auto& [od, flows] : today.route_flows) {
            DaySwitchMatrix m;
            m.day = today.day;
            m.occupants.assign(flows.size(), 0.0);
            m.moved.assign(flows.size(), std::vector<double>(flows.size(), 0.0));
            by_od.emplace(od, std::move(m));
        }

        for (std::size_t i = 0; i < today.agents.size(); ++i) {
            const auto& now = today.agents[i];
            const auto& next = tomorrow.agents[i];
            if (now.agent_id != next.agent_id)
                throw SimError("day logs disagree on agent ordering");
            const double units = units_for(agent_units, now.agent_id);
            auto& m = by_od.at(now.od);
            m.occupants[static_cast<std::size_t>(now.route)] += units;
            m.moved[static_cast<std::size_t>(now.route)][static_cast<std::size_t>(next.route)] +=
                units;
        }
        for (auto& [od, m] : by_od) series[od].push_back(std::move(m));
    }
    return series;
}

std::string cost_combo_key(const std::vector<double>& route_times) {
    std::string key;
    char buf[64];
    for (std::size_t i = 0; i < route_times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.2f", route_times[i]);
        if (i > 0) key += "|";
        key += buf;
    }
    return key;
}

std::map<OdPair, std::map<std::string, CostComboStat>> average_switching_by_cost(
    const std::vector<DayLog>& days, const SwitchSeries& series) {
    std::map<OdPair, std::map<std::string, CostComboStat>> result;
    for (const auto& [od, matrices] : series) {
        for (const auto& m : matrices) {
            // Costs the travelers reacted to: the route times of the day the
            // transition started from.
            const auto day_index = static_cast<std::size_t>(m.day - days.front().day);
            const auto& times = days.at(day_index).route_times.at(od);
            const std::string key = cost_combo_key(times);
            auto& stat = result[od][key];
            const auto k = m.occupants.size();
            if (stat.rate_sum.empty()) {
                stat.rate_sum.assign(k, std::vector<double>(k, 0.0));
                stat.days_counted.assign(k, std::vector<int>(k, 0));
            }
            for (std::size_t i = 0; i < k; ++i) {
                if (!m.defined(static_cast<int>(i))) continue;
                for (std::size_t j = 0; j < k; ++j) {
                    stat.rate_sum[i][j] += m.rate(static_cast<int>(i), static_cast<int>(j));
                    stat.days_counted[i][j] += 1;
                }
            }
        }
    }
    return result;
}

std::vector<double> day_switching_rate(const std::vector<DayLog>& days,
                                       const std::vector<int>& agent_units) {
    if (days.size() < 2) throw SimError("day switching rate needs at least two days");
    std::vector<double> rates;
    for (std::size_t t = 0; t + 1 < days.size(); ++t) {
        const DayLog& today = days[t];
        const DayLog& tomorrow = days[t + 1];
        if (today.agents.size() != tomorrow.agents.size())
            throw SimError("day logs disagree on the agent population");
        double switched = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < today.agents.size(); ++i) {
            const double units = units_for(agent_units, today.agents[i].agent_id);
            total += units;
            if (today.agents[i].route != tomorrow.agents[i].route) switched += units;
        }
        rates.push_back(switched / total);
    }
    return rates;
}

std::map<OdPair, std::vector<RouteStats>> descriptive_stats(
    const std::vector<DayLog>& days,
    const std::map<OdPair, std::vector<double>>& reference_times, int first_day, int last_day) {
    std::map<OdPair, std::vector<RouteStats>> result;
    for (const auto& [od, refs] : reference_times) {
        std::vector<RouteStats> rows(refs.size());
        std::vector<double> sum(refs.size(), 0.0), sum_sq(refs.size(), 0.0);
        int n = 0;
        for (const auto& d : days) {
            if (d.day < first_day || d.day > last_day) continue;
            const auto& times = d.route_times.at(od);
            for (std::size_t r = 0; r < refs.size(); ++r) {
                sum[r] += times[r];
                sum_sq[r] += times[r] * times[r];
            }
            ++n;
        }
        if (n == 0) throw SimError("no days in the requested window");
        for (std::size_t r = 0; r < refs.size(); ++r) {
            rows[r].reference = refs[r];
            rows[r].mean = sum[r] / n;
            rows[r].rel_gap = refs[r] != 0.0 ? (rows[r].mean - refs[r]) / refs[r] : 0.0;
            const double variance = std::max(0.0, sum_sq[r] / n - rows[r].mean * rows[r].mean);
            rows[r].std_dev = std::sqrt(variance);
        }
        result[od] = std::move(rows);
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV emitters. Every file repeats per-run rows (run = 1..R) and adds pooled
// rows (run = "pooled") merging the replications.
// ---------------------------------------------------------------------------

void write_switching_rates_csv(const std::vector<std::vector<DayLog>>& runs,
                               const std::vector<int>& agent_units, std::ostream& out) {
    out << "run,od,day,from_route,to_route,switch_units,occupant_units,rate\n";
    // pooled[od][day][i][j] accumulates across runs
    std::map<OdPair, std::map<int, DaySwitchMatrix>> pooled;
    for (std::size_t run = 0; run < runs.size(); ++run) {
        const auto series = switching_rates(runs[run], agent_units);
        for (const auto& [od, matrices] : series) {
            for (const auto& m : matrices) {
                const auto k = m.occupants.size();
                auto [it, fresh] = pooled[od].try_emplace(m.day);
                if (fresh) {
                    it->second.day = m.day;
                    it->second.occupants.assign(k, 0.0);
                    it->second.moved.assign(k, std::vector<double>(k, 0.0));
                }
                for (std::size_t i = 0; i < k; ++i) {
                    it->second.occupants[i] += m.occupants[i];
                    for (std::size_t j = 0; j < k; ++j) it->second.moved[i][j] += m.moved[i][j];
                    if (!m.defined(static_cast<int>(i))) continue;
                    for (std::size_t j = 0; j < k; ++j) {
                        out << run + 1 << "," << od_key(od) << "," << m.day << "," << i + 1 << ","
                            << j + 1 << "," << num(m.moved[i][j]) << "," << num(m.occupants[i])
                            << "," << num(m.rate(static_cast<int>(i), static_cast<int>(j)))
                            << "\n";
                    }
                }
            }
        }
    }
    for (const auto& [od, by_day] : pooled) {
        for (const auto& [day, m] : by_day) {
            for (std::size_t i = 0; i < m.occupants.size(); ++i) {
                if (!m.defined(static_cast<int>(i))) continue;
                for (std::size_t j = 0; j < m.occupants.size(); ++j) {
                    out << "pooled," << od_key(od) << "," << day << "," << i + 1 << "," << j + 1
                        << "," << num(m.moved[i][j]) << "," << num(m.occupants[i]) << ","
                        << num(m.rate(static_cast<int>(i), static_cast<int>(j))) << "\n";
                }
            }
        }
    }
}

namespace {

void emit_avg_switching(const std::string& run_label,
                        const std::map<OdPair, std::map<std::string, CostComboStat>>& average,
                        std::ostream& out) {
    for (const auto& [od, combos] : average) {
        for (const auto& [key, stat] : combos) {
            for (std::size_t i = 0; i < stat.rate_sum.size(); ++i) {
                for (std::size_t j = 0; j < stat.rate_sum.size(); ++j) {
                    if (stat.days_counted[i][j] == 0) continue;
                    out << run_label << "," << od_key(od) << ",\"" << key << "\"," << i + 1 << ","
                        << j + 1 << "," << num(stat.rate_sum[i][j] / stat.days_counted[i][j])
                        << "," << stat.days_counted[i][j] << "\n";
                }
            }
        }
    }
}

}  // namespace

void write_avg_switching_by_cost_csv(const std::vector<std::vector<DayLog>>& runs,
                                     const std::vector<int>& agent_units, std::ostream& out) {
    out << "run,od,costs,from_route,to_route,avg_rate,n_days\n";
    std::map<OdPair, std::map<std::string, CostComboStat>> pooled;
    for (std::size_t run = 0; run < runs.size(); ++run) {
        const auto series = switching_rates(runs[run], agent_units);
        const auto average = average_switching_by_cost(runs[run], series);
        emit_avg_switching(std::to_string(run + 1), average, out);
        for (const auto& [od, combos] : average) {
            for (const auto& [key, stat] : combos) {
                auto& p = pooled[od][key];
                if (p.rate_sum.empty()) {
                    p.rate_sum.assign(stat.rate_sum.size(),
                                      std::vector<double>(stat.rate_sum.size(), 0.0));
                    p.days_counted.assign(stat.rate_sum.size(),
                                          std::vector<int>(stat.rate_sum.size(), 0));
                }
                for (std::size_t i = 0; i < stat.rate_sum.size(); ++i)
                    for (std::size_t j = 0; j < stat.rate_sum.size(); ++j) {
                        p.rate_sum[i][j] += stat.rate_sum[i][j];
                        p.days_counted[i][j] += stat.days_counted[i][j];
                    }
            }
        }
    }
    emit_avg_switching("pooled", pooled, out);
}

void write_dsr_csv(const std::vector<std::vector<DayLog>>& runs,
                   const std::vector<int>& agent_units, std::ostream& out) {
    out << "run,day,rate\n";
    std::map<int, std::pair<double, int>> pooled;  // day -> (sum of rates, runs)
    for (std::size_t run = 0; run < runs.size(); ++run) {
        const auto rates = day_switching_rate(runs[run], agent_units);
        for (std::size_t t = 0; t < rates.size(); ++t) {
            const int day = runs[run][t].day;
            out << run + 1 << "," << day << "," << num(rates[t]) << "\n";
            auto& p = pooled[day];
            p.first += rates[t];
            p.second += 1;
        }
    }
    for (const auto& [day, p] : pooled)
        out << "pooled," << day << "," << num(p.first / p.second) << "\n";
}

void write_stats_csv(const std::vector<std::vector<DayLog>>& runs,
                     const std::map<OdPair, std::vector<double>>& reference_times,
                     std::ostream& out) {
    // std is population (divide by N), matching descriptive reporting.
    out << "run,od,route,equilibrium_time,mean,rel_gap,std\n";
    auto emit = [&](const std::string& label, const std::vector<DayLog>& days) {
        const auto stats =
            descriptive_stats(days, reference_times, days.front().day, days.back().day);
        for (const auto& [od, rows] : stats) {
            for (std::size_t r = 0; r < rows.size(); ++r) {
                out << label << "," << od_key(od) << "," << r + 1 << ","
                    << num(rows[r].reference) << "," << num(rows[r].mean) << ","
                    << num(rows[r].rel_gap) << "," << num(rows[r].std_dev) << "\n";
            }
        }
    };
    std::vector<DayLog> all_days;
    for (std::size_t run = 0; run < runs.size(); ++run) {
        emit(std::to_string(run + 1), runs[run]);
        all_days.insert(all_days.end(), runs[run].begin(), runs[run].end());
    }
    if (!all_days.empty()) emit("pooled", all_days);
    else throw SimError("stats need at least one day");
}

}  // namespace dtdsim
