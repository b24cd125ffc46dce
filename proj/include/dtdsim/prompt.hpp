#pragma once

#include <array>
#include <string>

#include "dtdsim/agent.hpp"
#include "dtdsim/error.hpp"

namespace dtdsim {

/// The reply could not be parsed into a route choice; the caller re-asks.
class ParseError : public SimError {
  public:
    using SimError::SimError;
};

/// The reply named a route outside the traveler's route set; the caller re-asks.
class RangeError : public SimError {
  public:
    using SimError::SimError;
};

/// A fully rendered chat prompt. The user text always contains the five
/// sections, each introduced by its header, in this order.
struct PromptBundle {
    static constexpr std::array<const char*, 5> kSections = {
        "profile", "task", "experiences", "guidance", "output_format"};

    std::string system_text;
    std::string user_text;
};

/// Renders a number with two decimals ("33.35", "6.00").
std::string format_fixed2(double value);

/// Builds the daily decision prompt from the traveler's state. `scenario_text`
/// is the scenario-specific part of the task description; the route count and
/// the standard instructions are appended here. Pure: same inputs, same bytes.
PromptBundle build_prompt(const AgentState& state, int route_count,
                          const std::string& scenario_text, bool bonuses_enabled);

struct LlmReply {
    std::string reason;
    int choice = 0;  // 0-based route index
};

/// Extracts the first JSON object carrying a "choice" key from a raw model
/// reply, tolerating code fences and surrounding prose. Route labels are
/// 1-based in text ("route 2", "2", 2) and returned 0-based. Throws
/// ParseError when no usable object exists or the reason is empty, RangeError
/// when the named route is outside [1, route_count]. Never crashes on any
/// input.
LlmReply parse_reply(const std::string& raw, int route_count);

}  // namespace dtdsim
