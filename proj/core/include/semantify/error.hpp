#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace semantify {

// Base of every error the library throws. Callers that only need a message
// catch this; the CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input. `locator` is a human-readable position such as
// "corpus.jsonl:12" and is empty when no position applies.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string locator = {})
      : Error(locator.empty() ? message : locator + ": " + message),
        locator_(std::move(locator)) {}

  const std::string& locator() const noexcept { return locator_; }

 private:
  std::string locator_;
};

// Input parsed but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Operation called outside its precondition (untrained model, bad argument).
class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Failures talking to the remote inference service.
class RemoteError : public Error {
 public:
  enum class Kind { connection, timeout, service, protocol, unknown_model };

  RemoteError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace semantify
