// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace tal {

// Base class for every error raised by the library. Callers that only care
// about "something went wrong" catch this; tests match the concrete kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Raised when an operation needs the logit direction of an all-zero vector.
class DegenerateLogitsError : public Error {
 public:
  DegenerateLogitsError() : Error("degenerate logits: zero vector has no direction") {}
  using Error::Error;
};

class QueueNotReadyError : public Error {
 public:
  using Error::Error;
};

// A scored set lacks the positives and/or negatives a metric needs.
class DegenerateSetError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace tal
