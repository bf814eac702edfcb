#pragma once

#include <string_view>

// Section labels shared by prompt builders and the mock backends that read
// rendered prompts back.
namespace autointent::prompt_format {

inline constexpr std::string_view kTask = "Task: ";
inline constexpr std::string_view kCandidates = "Candidate elements:";
inline constexpr std::string_view kPreviousActions = "Previous actions:";
inline constexpr std::string_view kPreviousIntents = "Previous intents:";
inline constexpr std::string_view kNextIntents = "Possible next intents";
inline constexpr std::string_view kAction = "Action: ";
inline constexpr std::string_view kNone = "(none)";

}  // namespace autointent::prompt_format
