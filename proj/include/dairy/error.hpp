#pragma once

#include <stdexcept>
#include <string>

namespace dairy {

// Base for every failure the engine reports. `stage` names the pipeline step
// (e.g. "generate_sql", "gateway") so callers can surface it in traces.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class IngestionError : public Error {
 public:
  using Error::Error;
};

}  // namespace dairy
