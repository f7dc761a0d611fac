#pragma once

#include <string>
#include <string_view>
#include <set>
#include <vector>

namespace georl {

/// Canonical place-name / entity-text normalization used everywhere names are
/// compared for equality: lowercase, diacritics folded to base letters,
/// punctuation dropped, whitespace trimmed and collapsed to single spaces.
/// Case and diacritic folding cover ASCII plus the Latin-1 Supplement and
/// Latin Extended-A/B ranges; other scripts pass through verbatim, so
/// equality checks stay consistent as long as both sides are normalized.
/// Idempotent. Throws EmptyAfterNormalization when nothing survives.
std::string normalize_place(std::string_view raw);

/// Splits an already-normalized string on single spaces.
std::vector<std::string> tokenize(std::string_view normalized);

/// Token-set Jaccard similarity. Two empty sets are treated as identical (1.0).
double token_jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

}  // namespace georl
