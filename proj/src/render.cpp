#include "autointent/render.hpp"

#include "autointent/prompt_format.hpp"
#include "autointent/text.hpp"

namespace autointent {

namespace {
std::string one_line(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  return std::string(text::trim(out));
}
}  // namespace

std::string render_element(const Element& e, std::size_t index, std::size_t max_text, bool with_attributes) {
  std::string out = "(" + std::to_string(index) + ") <" + (e.tag.empty() ? "element" : e.tag) + " id=" + e.element_id;
  if (with_attributes) {
    for (const auto& [name, value] : e.attributes) {
      out += " " + name + "=\"" + text::truncate_utf8(one_line(value), max_text) + "\"";
    }
  }
  out += ">";
  const std::string body = text::truncate_utf8(one_line(e.text), max_text);
  if (!body.empty()) out += " " + body;
  return out;
}

std::string render_candidates(std::span<const Element> candidates, std::size_t max_count, std::size_t max_text,
                              bool with_attributes) {
  std::string out;
  const std::size_t n = std::min(max_count, candidates.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += '\n';
    out += render_element(candidates[i], i + 1, max_text, with_attributes);
  }
  return out;
}

std::string render_numbered(const std::vector<std::string>& items) {
  if (items.empty()) return std::string(prompt_format::kNone);
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += '\n';
    out += std::to_string(i + 1) + ". " + items[i];
  }
  return out;
}

}  // namespace autointent
