#pragma once

#include <string>
#include <string_view>

namespace georl {

/// Structured form of a raw model completion.
struct ParsedCompletion {
  std::string think;    // verbatim text between the first <think> and the next </think>
  std::string country;  // normalized
  std::string city;     // normalized
};

/// Extracts the think block plus the final "country:" / "city:" answer lines.
/// Answer lines may appear anywhere in the response; the last line with a
/// case-insensitive "country:" ("city:") prefix whose value survives
/// normalization wins, so earlier mentions inside the reasoning do not shadow
/// the answer. Throws MissingThinkBlock, MissingCountryLine, MissingCityLine.
ParsedCompletion parse_completion(std::string_view raw);

/// Instantiates the answer template for a parsed completion; the inverse of
/// parse_completion over its own output.
std::string render_completion(const ParsedCompletion& completion);

}  // namespace georl
