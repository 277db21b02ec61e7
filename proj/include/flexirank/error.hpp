#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flexirank {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FetchError : public Error {
 public:
  FetchError(std::string url, std::string cause)
      : Error("fetch " + url + ": " + cause), url_(std::move(url)), cause_(std::move(cause)) {}

  const std::string& url() const noexcept { return url_; }
  const std::string& cause() const noexcept { return cause_; }

 private:
  std::string url_;
  std::string cause_;
};

/// Malformed input file; line() is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyQueryError : public Error {
 public:
  EmptyQueryError() : Error("empty query") {}
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace flexirank
