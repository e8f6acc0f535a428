#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace decor {

/// Root of every error the engine raises on purpose.
class DecorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: malformed files, schema violations, bad requests.
class ValidationError : public DecorError {
 public:
  using DecorError::DecorError;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& message, int line)
      : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_ = 0;
};

class EmptyMeshError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NoSurfaceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class OutOfBoundsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Plan directives that cannot be turned into a constraint set.
class CompileError : public ValidationError {
 public:
  CompileError(std::string code, const std::string& message)
      : ValidationError(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// No layout satisfies the hard constraints (or none was found).
class InfeasibleError : public DecorError {
 public:
  InfeasibleError(std::string asset_id, const std::string& message)
      : DecorError(message), asset_id_(std::move(asset_id)) {}

  const std::string& asset_id() const noexcept { return asset_id_; }

 private:
  std::string asset_id_;
};

/// An edit could not be realized; the scene it targeted is unchanged.
class InfeasibleEditError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

/// Failures talking to the language-model backend.
class BackendError : public DecorError {
 public:
  using DecorError::DecorError;
};

class TimeoutError : public BackendError {
 public:
  using BackendError::BackendError;
};

class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

class AuthError : public BackendError {
 public:
  using BackendError::BackendError;
};

class UnresolvableTargetError : public ValidationError {
 public:
  UnresolvableTargetError(std::string target, const std::string& message)
      : ValidationError(message), target_(std::move(target)) {}

  const std::string& target() const noexcept { return target_; }

 private:
  std::string target_;
};

}  // namespace decor
