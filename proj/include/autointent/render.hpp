#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "autointent/types.hpp"

namespace autointent {

/// `(index) <tag id=ID name="value" ...> text`, text capped at `max_text` bytes.
std::string render_element(const Element& e, std::size_t index, std::size_t max_text, bool with_attributes = true);

/// First `max_count` candidates, one per line, numbered from 1.
std::string render_candidates(std::span<const Element> candidates, std::size_t max_count, std::size_t max_text,
                              bool with_attributes = true);

/// `1. item` lines, or "(none)" for an empty list.
std::string render_numbered(const std::vector<std::string>& items);

}  // namespace autointent
