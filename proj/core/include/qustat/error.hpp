#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qustat {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Invalid input: wrong dimensions, broken invariants, bad configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

/// A dense allocation would exceed the configured dimension budget.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, std::size_t required_dim, std::size_t max_dim)
      : Error(what), required_dim_(required_dim), max_dim_(max_dim) {}
  const char* kind() const noexcept override { return "budget"; }
  std::size_t required_dim() const noexcept { return required_dim_; }
  std::size_t max_dim() const noexcept { return max_dim_; }
  /// Bytes one dense complex matrix of the required dimension would take.
  std::size_t required_bytes() const noexcept { return required_dim_ * required_dim_ * 16; }

 private:
  std::size_t required_dim_;
  std::size_t max_dim_;
};

/// A numerical cross-check (route equality, truncation tail, ...) failed.
class ToleranceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "tolerance"; }
};

}  // namespace qustat
