#pragma once

#include <stdexcept>
#include <string>

namespace georl {

/// Base class for all recoverable errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input validated against a file schema failed; carries the 1-based line number.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& detail)
      : Error("schema error at line " + std::to_string(line) + ": " + detail),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& id)
      : Error("duplicate sample id \"" + id + "\"") {}
};

class EmptyAfterNormalization : public Error {
 public:
  explicit EmptyAfterNormalization(const std::string& raw)
      : Error("string \"" + raw + "\" is empty after normalization") {}
};

class MissingThinkBlock : public Error {
 public:
  MissingThinkBlock() : Error("completion has no <think>...</think> block") {}
};

class MissingCountryLine : public Error {
 public:
  MissingCountryLine() : Error("completion has no \"country:\" line") {}
};

class MissingCityLine : public Error {
 public:
  MissingCityLine() : Error("completion has no \"city:\" line") {}
};

class UnknownSampleId : public Error {
 public:
  explicit UnknownSampleId(const std::string& id)
      : Error("sample id \"" + id + "\" not present in fixture score table") {}
};

class GroupTooSmall : public Error {
 public:
  explicit GroupTooSmall(std::size_t k)
      : Error("reward group needs at least 2 members, got " + std::to_string(k)) {}
};

class SupportMismatch : public Error {
 public:
  SupportMismatch() : Error("KL undefined: p has mass where q is zero") {}
};

class UnknownPrompt : public Error {
 public:
  explicit UnknownPrompt(const std::string& id)
      : Error("prompt \"" + id + "\" not known to the policy") {}
};

class ClipBoundaryHit : public Error {
 public:
  ClipBoundaryHit() : Error("likelihood ratio too close to a clip boundary for finite differences") {}
};

class NoAnnotations : public Error {
 public:
  explicit NoAnnotations(const std::string& id)
      : Error("sample \"" + id + "\" has no model annotations") {}
};

class Unresolvable : public Error {
 public:
  explicit Unresolvable(const std::string& what) : Error("unresolvable location: " + what) {}
};

class UnknownPredictionId : public Error {
 public:
  explicit UnknownPredictionId(const std::string& id)
      : Error("prediction id \"" + id + "\" does not match any sample") {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what) : Error("empty input: " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

}  // namespace georl
