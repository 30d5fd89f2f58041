// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace brwlab {

enum class ErrorKind {
  InvalidArgument,
  Subcritical,
  NoPairs,
  DomainExceeded,
  QuadratureFailure,
  NoSolution,
  DegenerateStep,
  EmptyGeneration,
  Timeout,
  HorizonTooLarge,
  DegenerateBarrier,
  WindowEmpty,
  IndexOutOfRange,
  Config,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace brwlab
