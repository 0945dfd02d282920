#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyprime {

// Every failure raised by the library derives from Error and carries a short
// machine-readable kind, which the CLI writes into its error object.
class Error : public std::runtime_error {
 public:
  Error(std::string_view kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  std::string_view kind() const noexcept { return kind_; }

 private:
  std::string_view kind_;
};

// Input outside the supported range of a routine (e.g. sieve limit < 2).
class BoundsError : public Error {
 public:
  explicit BoundsError(const std::string& what) : Error("bounds", what) {}
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error("argument", what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse", what) {}
};

// Integer overflow in checked arithmetic.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error("range", what) {}
};

// Memory budget or brute-force cap exceeded.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error("resource", what) {}
};

// A numerical routine could not reach its stated tolerance.
class AccuracyError : public Error {
 public:
  explicit AccuracyError(const std::string& what) : Error("accuracy", what) {}
};

}  // namespace polyprime
