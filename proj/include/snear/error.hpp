// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNEAR_ERROR_HPP
#define SNEAR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace snear {

enum class ErrorCode {
  parameter,
  generation,
  numeric,
  parse,
  convergence,
  unsupported,
  invariant,
  config,
  io,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// C API can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace snear

#endif  // SNEAR_ERROR_HPP
