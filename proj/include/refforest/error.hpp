#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace refforest {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed environment or grammar text. `line()` is 1-based.
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

class CompositionError : public Error {
 public:
  using Error::Error;
};

class UnknownWordError : public Error {
 public:
  UnknownWordError(std::string word, std::size_t position)
      : Error("unknown word '" + word + "' at position " + std::to_string(position)),
        word_(std::move(word)),
        position_(position) {}
  const std::string& word() const noexcept { return word_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::string word_;
  std::size_t position_;
};

class NoParseError : public Error {
 public:
  NoParseError() : Error("no parse") {}
};

}  // namespace refforest
