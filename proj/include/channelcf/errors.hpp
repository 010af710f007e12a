#pragma once

#include <stdexcept>
#include <string>

namespace channelcf {

// Bad input data: unreadable files, malformed lines, violated dataset
// invariants. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A broken internal invariant (e.g. a failed graph consistency check
// surfaced as an exception). CLI exit code 3.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace channelcf
