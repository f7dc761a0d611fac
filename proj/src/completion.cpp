#include "georl/completion.hpp"

#include <cctype>
#include <optional>
#include <vector>

#include "georl/errors.hpp"
#include "georl/text.hpp"

namespace georl {
namespace {

bool has_prefix_icase(std::string_view line, std::string_view prefix) {
  if (line.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(line[i])) != prefix[i]) return false;
  }
  return true;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Answer lines can share a physical line with the template tags
// ("...</think><answer>country: France"), so tags are dropped before the
// prefix match.
std::string without_tags(std::string_view line) {
  std::string out(line);
  for (std::string_view tag : {"<answer>", "</answer>", "<think>", "</think>"}) {
    std::size_t at;
    while ((at = out.find(tag)) != std::string::npos) out.erase(at, tag.size());
  }
  return out;
}

// Last line carrying the prefix whose remainder normalizes to something
// non-empty; a bare "country:" does not count as an answer.
std::optional<std::string> last_answer_line(std::string_view raw, std::string_view prefix) {
  std::optional<std::string> found;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t eol = raw.find('\n', pos);
    if (eol == std::string_view::npos) eol = raw.size();
    std::string cleaned = without_tags(raw.substr(pos, eol - pos));
    std::string_view line = strip(cleaned);
    if (has_prefix_icase(line, prefix)) {
      std::string_view value = line.substr(prefix.size());
      try {
        found = normalize_place(value);
      } catch (const EmptyAfterNormalization&) {
      }
    }
    pos = eol + 1;
  }
  return found;
}

}  // namespace

ParsedCompletion parse_completion(std::string_view raw) {
  constexpr std::string_view open_tag = "<think>";
  constexpr std::string_view close_tag = "</think>";
  std::size_t open = raw.find(open_tag);
  if (open == std::string_view::npos) throw MissingThinkBlock();
  std::size_t body = open + open_tag.size();
  std::size_t close = raw.find(close_tag, body);
  if (close == std::string_view::npos) throw MissingThinkBlock();

  ParsedCompletion out;
  out.think = std::string(raw.substr(body, close - body));
  // Answer lines live outside the reasoning; excising the think span keeps
  // place names mentioned mid-reasoning from shadowing the answer.
  std::string rest = std::string(raw.substr(0, open));
  rest += raw.substr(close + close_tag.size());
  auto country = last_answer_line(rest, "country:");
  if (!country) throw MissingCountryLine();
  auto city = last_answer_line(rest, "city:");
  if (!city) throw MissingCityLine();
  out.country = std::move(*country);
  out.city = std::move(*city);
  return out;
}

std::string render_completion(const ParsedCompletion& completion) {
  std::string out = "<think>";
  out += completion.think;
  out += "</think>\n<answer>country: ";
  out += completion.country;
  out += "\ncity: ";
  out += completion.city;
  out += "</answer>\n";
  return out;
}

}  // namespace georl
