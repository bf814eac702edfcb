#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace autointent {

struct InContextExample {
  std::string input;
  std::string output;

  friend bool operator==(const InContextExample&, const InContextExample&) = default;
};

// Prompt texts. Query templates use named placeholders:
//   extractor_query: {task} {previous_intents} {candidates} {action}
//   policy_query:    {task} {previous_actions} {candidates} {intent_section}
struct PromptAssets {
  std::string extractor_system;
  std::string extractor_query;
  std::vector<InContextExample> extractor_examples;
  std::string policy_system;
  std::string policy_query;
  std::vector<InContextExample> policy_examples;

  /// The texts shipped in assets/prompts, compiled in.
  static const PromptAssets& builtin();
  /// Reads the same file names from `dir`; missing files keep the built-in text.
  static PromptAssets load(const std::filesystem::path& dir);
};

/// Drops lines starting with '#' and trims trailing newlines.
std::string strip_comment_lines(std::string_view text);

/// Blocks separated by `=====` lines, each with `[input]` and `[output]` sections.
/// Throws ConfigError when a block lacks either section.
std::vector<InContextExample> parse_examples(std::string_view text);

}  // namespace autointent
