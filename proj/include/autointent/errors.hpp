#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace autointent {

// Every library failure derives from Error. The three families below map
// onto the CLI exit codes (config 2, backend 3, data 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  explicit BackendError(const std::string& what, std::optional<int> http_status = std::nullopt)
      : Error(what), http_status_(http_status) {}
  std::optional<int> http_status() const { return http_status_; }

 private:
  std::optional<int> http_status_;
};

// 401/403: never retried.
class AuthError : public BackendError {
 public:
  using BackendError::BackendError;
};

class UnscriptedPrompt : public BackendError {
 public:
  UnscriptedPrompt(const std::string& fingerprint, const std::string& excerpt)
      : BackendError("unscripted prompt " + fingerprint + ": " + excerpt), fingerprint_(fingerprint) {}
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::string fingerprint_;
};

class EmbeddingBackendError : public BackendError {
 public:
  using BackendError::BackendError;
};

// Malformed on-disk record. `line` is 1-based; `field` is a dotted path
// such as "steps[2].action.kind".
class SchemaError : public DataError {
 public:
  SchemaError(std::size_t line, std::string field, const std::string& detail)
      : DataError("line " + std::to_string(line) + ": " + field + ": " + detail),
        line_(line),
        field_(std::move(field)) {}
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyIntent : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientCandidates : public DataError {
 public:
  using DataError::DataError;
};

class EmptyDataset : public DataError {
 public:
  using DataError::DataError;
};

class PromptTooLong : public Error {
 public:
  using Error::Error;
};

class MalformedPrediction : public BackendError {
 public:
  using BackendError::BackendError;
};

class UnparseableAction : public Error {
 public:
  using Error::Error;
};

class UnknownElement : public Error {
 public:
  using Error::Error;
};

}  // namespace autointent
