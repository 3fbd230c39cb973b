#pragma once

#include <stdexcept>
#include <string>

namespace press {

// All recoverable library failures derive from Error so the CLI can map them
// to exit codes (DataError -> 2, ModelMismatch -> 3).
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input, broken invariant, out-of-range query.
struct DataError : Error {
  explicit DataError(const std::string& msg) : Error(msg) {}
};

// Compressed data presented with a model it was not encoded with.
struct ModelMismatch : Error {
  explicit ModelMismatch(const std::string& msg) : Error(msg) {}
};

}  // namespace press
