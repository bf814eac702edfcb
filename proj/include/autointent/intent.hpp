#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace autointent {

/// Maximum intent length in words.
inline constexpr std::size_t kMaxIntentWords = 3;

// A short lowercase phrase of 1..3 word tokens. Words contain lowercase
// ASCII letters, digits, bytes of multi-byte UTF-8 sequences, and
// internal hyphens only.
class Intent {
 public:
  /// Throws EmptyIntent for no words, ValidationError otherwise.
  static Intent from_words(std::vector<std::string> words);

  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  std::string text() const;

  friend bool operator==(const Intent&, const Intent&) = default;
  friend auto operator<=>(const Intent&, const Intent&) = default;

 private:
  explicit Intent(std::vector<std::string> words) : words_(std::move(words)) {}
  std::vector<std::string> words_;
};

struct NormalizedIntent {
  Intent intent;
  bool truncated = false;
};

bool is_valid_intent_word(std::string_view word);

/// Lowercases, drops apostrophes, turns other punctuation into spaces and
/// strips hyphens at word edges, then keeps the first three words.
/// Throws EmptyIntent if nothing survives.
NormalizedIntent normalize_intent(std::string_view raw);

inline std::string intent_text(const Intent& intent) { return intent.text(); }

/// Parses text already in canonical form; same as normalize_intent but
/// rejects input that needed truncation.
Intent parse_canonical_intent(std::string_view text);

/// Heuristic only: first word ends in "ing".
bool looks_gerund_led(const Intent& intent);

}  // namespace autointent
