#include "autointent/predictor/intent_trie.hpp"

#include <algorithm>

#include "autointent/text.hpp"

namespace autointent {

IntentTrie::IntentTrie() { nodes_.emplace_back(); }

std::size_t IntentTrie::insert(const Intent& intent, double weight) {
  std::size_t at = kRoot;
  nodes_[at].pass_weight += weight;
  for (const auto& w : intent.words()) {
    auto it = nodes_[at].children.find(w);
    std::size_t next;
    if (it == nodes_[at].children.end()) {
      next = nodes_.size();
      Node n;
      n.word = w;
      n.parent = at;
      n.depth = nodes_[at].depth + 1;
      nodes_.push_back(std::move(n));
      nodes_[at].children.emplace(w, next);
    } else {
      next = it->second;
    }
    at = next;
    nodes_[at].pass_weight += weight;
  }
  nodes_[at].terminal_weight += weight;
  nodes_[at].terminal_count += 1;
  return at;
}

std::optional<std::size_t> IntentTrie::child(std::size_t node, const std::string& word) const {
  const auto& ch = nodes_[node].children;
  auto it = ch.find(word);
  if (it == ch.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> IntentTrie::find(std::span<const std::string> prefix) const {
  std::size_t at = kRoot;
  for (const auto& w : prefix) {
    auto next = child(at, w);
    if (!next) return std::nullopt;
    at = *next;
  }
  return at;
}

std::vector<std::string> IntentTrie::path(std::size_t id) const {
  std::vector<std::string> out;
  for (std::size_t at = id; at != kRoot; at = nodes_[at].parent) out.push_back(nodes_[at].word);
  std::reverse(out.begin(), out.end());
  return out;
}

std::string IntentTrie::text(std::size_t id) const { return text::join(path(id), " "); }

std::vector<std::size_t> IntentTrie::terminals() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].terminal()) out.push_back(i);
  }
  return out;
}

}  // namespace autointent
