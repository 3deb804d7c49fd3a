#pragma once

#include <stdexcept>
#include <string>

namespace projed {

// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A path or identity lookup that no longer matches the tree it was computed for.
class CorruptCacheError : public Error {
 public:
  using Error::Error;
};

struct SourcePos {
  int line = 0;
  int column = 0;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourcePos pos)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message),
        pos_(pos) {}

  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

class LanguageError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

}  // namespace projed
