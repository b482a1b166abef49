#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fogserve {

using VertexId = std::uint32_t;
using FogId = std::uint32_t;

/// Malformed input file or record.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A data structure invariant was violated (duplicate edge, bad endpoint, ...).
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation preconditions not met by the caller's arguments.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Matrix or vector shapes do not line up.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fogserve
