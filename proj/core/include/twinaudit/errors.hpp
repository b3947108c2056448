#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twinaudit {

// Base of every error thrown by the library. `code()` is a stable
// machine-readable token, also used as the `code` field of HTTP error bodies.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& message, std::string code = "not_found")
      : Error(std::move(code), message) {}
};

class ConflictError : public Error {
 public:
  explicit ConflictError(const std::string& message, std::string code = "conflict")
      : Error(std::move(code), message) {}
};

class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& message,
                                std::string code = "invalid_argument")
      : Error(std::move(code), message) {}
};

class DeniedError : public Error {
 public:
  explicit DeniedError(const std::string& message) : Error("denied", message) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message) : Error("transport", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message, std::string code = "io_error")
      : Error(std::move(code), message) {}
};

// A document failed structural or invariant checks. Carries every violation
// found, never just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error("validation_failed", Join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string Join(const std::vector<std::string>& items) {
    std::string out = "validation failed:";
    for (const auto& v : items) {
      out += "\n  ";
      out += v;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

// Malformed input text (JSON, XML, PEM). `position` is a byte offset where
// the parser stopped, when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error("parse_error", message + " (at byte " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace twinaudit
