// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "brwlab/error.hpp"

namespace brwlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Subcritical: return "Subcritical";
    case ErrorKind::NoPairs: return "NoPairs";
    case ErrorKind::DomainExceeded: return "DomainExceeded";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::DegenerateStep: return "DegenerateStep";
    case ErrorKind::EmptyGeneration: return "EmptyGeneration";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::HorizonTooLarge: return "HorizonTooLarge";
    case ErrorKind::DegenerateBarrier: return "DegenerateBarrier";
    case ErrorKind::WindowEmpty: return "WindowEmpty";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace brwlab
