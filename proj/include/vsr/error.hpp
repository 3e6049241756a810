// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vsr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible tensor or layer geometry.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid network or algorithm configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad user-supplied data (empty sequences, missing frames, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents. `offset` is the byte position where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace vsr
