#include "autointent/intent.hpp"

#include "autointent/errors.hpp"
#include "autointent/text.hpp"

namespace autointent {

namespace {

constexpr std::string_view kRightQuote = "\xE2\x80\x99";

bool word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c >= 0x80;
}

}  // namespace

bool is_valid_intent_word(std::string_view word) {
  if (word.empty() || word.front() == '-' || word.back() == '-') return false;
  if (word.find(kRightQuote) != std::string_view::npos) return false;
  for (unsigned char c : word) {
    if (!word_byte(c)) return false;
  }
  return true;
}

Intent Intent::from_words(std::vector<std::string> words) {
  if (words.empty()) throw EmptyIntent("intent has no words");
  if (words.size() > kMaxIntentWords) {
    throw ValidationError("intent has " + std::to_string(words.size()) + " words, limit is " +
                          std::to_string(kMaxIntentWords));
  }
  for (const auto& w : words) {
    if (!is_valid_intent_word(w)) throw ValidationError("invalid intent word '" + w + "'");
  }
  return Intent(std::move(words));
}

std::string Intent::text() const { return text::join(words_, " "); }

NormalizedIntent normalize_intent(std::string_view raw) {
  std::string lowered = text::to_lower(raw);
  std::string cleaned;
  cleaned.reserve(lowered.size());
  for (std::size_t i = 0; i < lowered.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(lowered[i]);
    if (std::string_view(lowered).substr(i, kRightQuote.size()) == kRightQuote) {
      i += kRightQuote.size() - 1;
      continue;
    }
    if (c == '\'') continue;
    cleaned += word_byte(c) ? static_cast<char>(c) : ' ';
  }

  std::vector<std::string> words;
  for (auto& token : text::split_whitespace(cleaned)) {
    std::size_t b = token.find_first_not_of('-');
    if (b == std::string::npos) continue;
    std::size_t e = token.find_last_not_of('-');
    words.push_back(token.substr(b, e - b + 1));
  }
  if (words.empty()) throw EmptyIntent("no word tokens in '" + std::string(raw) + "'");

  bool truncated = false;
  if (words.size() > kMaxIntentWords) {
    words.resize(kMaxIntentWords);
    truncated = true;
  }
  return NormalizedIntent{Intent::from_words(std::move(words)), truncated};
}

Intent parse_canonical_intent(std::string_view text) {
  auto n = normalize_intent(text);
  if (n.truncated) throw ValidationError("intent '" + std::string(text) + "' exceeds the word limit");
  return n.intent;
}

bool looks_gerund_led(const Intent& intent) {
  const auto& w = intent.words().front();
  return w.size() > 3 && w.ends_with("ing");
}

}  // namespace autointent
