#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autointent/intent.hpp"

namespace autointent {

// Prefix tree over intent words. Node 0 is the root; depth never exceeds
// kMaxIntentWords. Each node keeps the total weight of training intents
// passing through it and of those ending at it.
class IntentTrie {
 public:
  static constexpr std::size_t kRoot = 0;

  struct Node {
    std::string word;
    std::size_t parent = kRoot;
    std::size_t depth = 0;
    std::map<std::string, std::size_t> children;
    double pass_weight = 0.0;
    double terminal_weight = 0.0;
    std::size_t terminal_count = 0;

    bool terminal() const { return terminal_count > 0; }
  };

  IntentTrie();

  /// Returns the node that completes `intent`.
  std::size_t insert(const Intent& intent, double weight = 1.0);

  std::optional<std::size_t> find(std::span<const std::string> prefix) const;
  std::optional<std::size_t> child(std::size_t node, const std::string& word) const;

  const Node& node(std::size_t id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }

  std::vector<std::string> path(std::size_t id) const;
  std::string text(std::size_t id) const;

  /// Terminal nodes, in creation order.
  std::vector<std::size_t> terminals() const;

 private:
  std::vector<Node> nodes_;
};

}  // namespace autointent
