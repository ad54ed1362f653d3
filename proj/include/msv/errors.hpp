#pragma once

#include <stdexcept>
#include <string>

namespace msv {

/// Base of every error raised by the library. The category drives the CLI
/// exit code.
class Error : public std::runtime_error {
 public:
  enum class Category { config, data, numerical };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(Category::config, what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(Category::data, what) {}
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(const std::string& what)
      : Error(Category::numerical, what) {}
};

class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& what)
      : Error(Category::numerical, what) {}
};

/// Overflow or NaN in an intermediate result.
class NonFiniteResult : public Error {
 public:
  explicit NonFiniteResult(const std::string& what)
      : Error(Category::numerical, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(Category::data, what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class MissingValue : public ParseError {
 public:
  using ParseError::ParseError;
};

class NonPositiveLevel : public ParseError {
 public:
  using ParseError::ParseError;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Category::data, what) {}
};

}  // namespace msv
