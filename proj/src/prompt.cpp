#include "dtdsim/prompt.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dtdsim {

namespace {

std::string route_label(int index) {  // 0-based in, 1-based label out
    return "route " + std::to_string(index + 1);
}

/// "Chosen 1 time" / "Chosen 21 times".
std::string chosen_phrase(int count) {
    std::string s = "Chosen " + std::to_string(count) + " time";
    if (count != 1) s += "s";
    return s;
}

std::string experiences_text(const AgentState& state, int route_count, bool bonuses_enabled) {
    std::ostringstream out;
    const bool has_yesterday = state.last_choice >= 0;

    if (has_yesterday) {
        out << "Yesterday: ";
        bool first = true;
        for (int r = 0; r < route_count; ++r) {
            const auto idx = static_cast<std::size_t>(r);
            if (idx >= state.yesterday_times.size() || std::isnan(state.yesterday_times[idx]))
                continue;
            if (!first) out << ", ";
            out << route_label(r) << "'s travel time was "
                << format_fixed2(state.yesterday_times[idx]);
            first = false;
        }
        out << ", and you chose " << route_label(state.last_choice) << ".";
        if (bonuses_enabled) {
            out << " Yesterday, you received a " << format_fixed2(state.last_bonus)
                << " RMB bonus, bringing your cumulative bonus to "
                << format_fixed2(state.cumulative_bonus) << " RMB.";
        }
        out << " Your historical travel experiences for each route over the past "
            << state.days_traveled() << " days are as follows: ";
    } else {
        out << "You have not traveled yet. Your historical travel experiences for each route"
               " are as follows: ";
    }

    for (int r = 0; r < route_count; ++r) {
        if (r > 0) out << "; ";
        out << route_label(r) << ": ";
        const auto& m = state.memories[static_cast<std::size_t>(r)];
        if (m.observed) {
            out << chosen_phrase(m.chosen_count)
                << ", with an Experience Weighted Moving Average Travel Time of "
                << format_fixed2(m.ewmatt);
        } else {
            out << "not yet chosen";
        }
    }
    out << ".";
    return out.str();
}

}  // namespace

std::string format_fixed2(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

PromptBundle build_prompt(const AgentState& state, int route_count,
                          const std::string& scenario_text, bool bonuses_enabled) {
    if (route_count <= 0) throw ConfigError("prompt needs at least one route");
    if (state.memories.size() != static_cast<std::size_t>(route_count))
        throw SimError("traveler memory is not sized to the route set");

    PromptBundle bundle;
    bundle.system_text =
        "You role-play as a traveler who makes a route choice every day. Stay in character "
        "and answer exactly in the requested format.";

    std::ostringstream user;
    user << "Traveler Profile:\n" << state.profile.render() << "\n\n";

    user << "Task Description:\n";
    if (!scenario_text.empty()) user << scenario_text << " ";
    user << "There are " << route_count << " routes available, numbered route 1 to route "
         << route_count << ". Today you must choose exactly one of them.\n\n";

    user << "Travel Experiences:\n"
         << experiences_text(state, route_count, bonuses_enabled) << "\n\n";

    user << "Thinking Guidance:\n"
            "Please think step-by-step. Optimize your route choice by considering both "
            "well-traveled routes and less explored options.\n\n";

    user << "Output Format:\n"
            "Your response should be in JSON format with exactly two keys in this order: "
            "\"reason\", the reasoning behind your choice, and \"choice\", the route you "
            "choose today written like \"route 1\". Do not output anything besides this "
            "JSON object.";

    bundle.user_text = user.str();
    return bundle;
}

namespace {

/// Returns the position one past the matching '}' for the '{' at `start`,
/// honoring JSON string literals and escapes, or npos if never balanced.
std::size_t balanced_end(const std::string& raw, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
        const char c = raw[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            --depth;
            if (depth == 0) return i + 1;
        }
    }
    return std::string::npos;
}

/// Accepts "2", "route 2", "Route2" (any case, flexible spacing); -1 otherwise.
int route_number_from_text(const std::string& text) {
    std::size_t pos = 0;
    auto skip_spaces = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    skip_spaces();
    static constexpr const char* kWord = "route";
    bool word_matches = true;
    for (std::size_t i = 0; i < 5; ++i) {
        if (pos + i >= text.size() ||
            std::tolower(static_cast<unsigned char>(text[pos + i])) != kWord[i]) {
            word_matches = false;
            break;
        }
    }
    if (word_matches) pos += 5;
    skip_spaces();
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) return -1;
    long value = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        value = value * 10 + (text[pos] - '0');
        if (value > 1000000) return -1;
        ++pos;
    }
    skip_spaces();
    if (pos != text.size()) return -1;
    return static_cast<int>(value);
}

/// 1-based route number from the JSON "choice" value, or -1 if unusable.
int route_number_from_json(const nlohmann::json& value) {
    if (value.is_number_integer() || value.is_number_unsigned())
        return static_cast<int>(value.get<long long>());
    if (value.is_number_float()) {
        const double d = value.get<double>();
        if (std::nearbyint(d) == d) return static_cast<int>(d);
        return -1;
    }
    if (value.is_string()) return route_number_from_text(value.get<std::string>());
    return -1;
}

}  // namespace

LlmReply parse_reply(const std::string& raw, int route_count) {
    if (route_count <= 0) throw ConfigError("route count must be positive");

    for (std::size_t i = raw.find('{'); i != std::string::npos; i = raw.find('{', i + 1)) {
        const std::size_t end = balanced_end(raw, i);
        if (end == std::string::npos) continue;
        const auto candidate =
            nlohmann::json::parse(raw.begin() + static_cast<std::ptrdiff_t>(i),
                                  raw.begin() + static_cast<std::ptrdiff_t>(end),
                                  /*cb=*/nullptr, /*allow_exceptions=*/false);
        if (candidate.is_discarded() || !candidate.is_object() || !candidate.contains("choice"))
            continue;

        const int number = route_number_from_json(candidate["choice"]);
        if (number < 0) throw ParseError("reply has no recognizable route choice");
        if (number < 1 || number > route_count)
            throw RangeError("route " + std::to_string(number) + " is outside the route set of " +
                             std::to_string(route_count));

        LlmReply reply;
        reply.choice = number - 1;
        if (candidate.contains("reason") && candidate["reason"].is_string())
            reply.reason = candidate["reason"].get<std::string>();
        if (reply.reason.empty()) throw ParseError("reply gives no reason for the choice");
        return reply;
    }
    throw ParseError("no JSON object with a route choice in reply");
}

}  // namespace dtdsim
