// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace msfem {

// Input-file or configuration problem; maps to CLI exit code 2.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = -1)
      : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Linear solver failure; maps to CLI exit code 3. pivot_index is the column
// reported by the factorization when available, -1 otherwise.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, long pivot_index)
      : std::runtime_error(what), pivot_(pivot_index) {}
  long pivot_index() const { return pivot_; }

 private:
  long pivot_;
};

} // namespace msfem
