#include "autointent/prompt_assets.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "autointent/errors.hpp"
#include "autointent/text.hpp"

namespace autointent {

namespace detail {
const std::map<std::string, std::string>& builtin_prompt_assets();
}

namespace {

std::string rstrip_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

PromptAssets from_sources(const std::map<std::string, std::string>& src) {
  auto get = [&](const std::string& name) -> const std::string& {
    auto it = src.find(name);
    if (it == src.end()) throw ConfigError("missing prompt asset " + name);
    return it->second;
  };
  PromptAssets a;
  a.extractor_system = strip_comment_lines(get("extractor_system.txt"));
  a.extractor_query = strip_comment_lines(get("extractor_query.txt"));
  a.extractor_examples = parse_examples(get("extractor_examples.txt"));
  a.policy_system = strip_comment_lines(get("policy_system.txt"));
  a.policy_query = strip_comment_lines(get("policy_query.txt"));
  a.policy_examples = parse_examples(get("policy_examples.txt"));
  if (a.extractor_examples.empty()) throw ConfigError("extractor needs at least one in-context example");
  return a;
}

}  // namespace

std::string strip_comment_lines(std::string_view text) {
  std::string out;
  for (const auto& line : text::split_lines(text)) {
    if (line.starts_with("#")) continue;
    out += line;
    out += '\n';
  }
  // Leading blank lines left behind by a comment header are dropped too.
  std::size_t first = out.find_first_not_of('\n');
  out = first == std::string::npos ? std::string() : out.substr(first);
  return rstrip_newlines(std::move(out));
}

std::vector<InContextExample> parse_examples(std::string_view raw) {
  std::vector<InContextExample> out;
  const std::string body = strip_comment_lines(raw);
  std::vector<std::string> block;
  auto flush = [&]() {
    bool any = false;
    for (const auto& l : block) any = any || !text::trim(l).empty();
    if (!any) {
      block.clear();
      return;
    }
    enum { None, In, Out } section = None;
    InContextExample ex;
    bool saw_in = false, saw_out = false;
    for (const auto& l : block) {
      if (text::trim(l) == "[input]") {
        section = In;
        saw_in = true;
      } else if (text::trim(l) == "[output]") {
        section = Out;
        saw_out = true;
      } else if (section == In) {
        ex.input += l + "\n";
      } else if (section == Out) {
        ex.output += l + "\n";
      }
    }
    if (!saw_in || !saw_out) throw ConfigError("in-context example block lacks [input] or [output]");
    ex.input = rstrip_newlines(ex.input);
    ex.output = std::string(text::trim(ex.output));
    out.push_back(std::move(ex));
    block.clear();
  };
  for (const auto& line : text::split_lines(body)) {
    if (text::trim(line) == "=====") {
      flush();
    } else {
      block.push_back(line);
    }
  }
  flush();
  return out;
}

const PromptAssets& PromptAssets::builtin() {
  static const PromptAssets assets = from_sources(detail::builtin_prompt_assets());
  return assets;
}

PromptAssets PromptAssets::load(const std::filesystem::path& dir) {
  std::map<std::string, std::string> src = detail::builtin_prompt_assets();
  for (auto& [name, content] : src) {
    std::ifstream in(dir / name, std::ios::binary);
    if (!in) continue;
    std::ostringstream ss;
    ss << in.rdbuf();
    content = ss.str();
  }
  return from_sources(src);
}

}  // namespace autointent
