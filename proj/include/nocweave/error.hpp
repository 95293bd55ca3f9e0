// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nocweave {

/// Base class for every error raised by the toolchain.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The instance has no solution under the requested constraints (no path
/// within a hop limit, no free slot for a token sequence). The CLI maps this
/// to exit code 2.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration, detected before any stage runs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nocweave
