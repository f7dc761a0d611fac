#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "georl/types.hpp"

namespace georl {

/// Reads a JSON Lines corpus, one Sample per line, preserving file order.
/// Name fields are normalized on load. Throws SchemaError (with the offending
/// line number) on malformed records, DuplicateId on repeated ids, IoError if
/// the file cannot be opened.
std::vector<Sample> load_corpus(const std::string& path);
std::vector<Sample> read_corpus(std::istream& in);

/// Canonical JSONL serialization; load followed by save is byte-stable.
void save_corpus(const std::vector<Sample>& corpus, const std::string& path);
void write_corpus(const std::vector<Sample>& corpus, std::ostream& out);

std::string sample_to_json_line(const Sample& sample);

}  // namespace georl
