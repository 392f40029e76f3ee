#pragma once

#include <stdexcept>
#include <string>

namespace wordlap {

// Error taxonomy mirrored by the CLI exit codes: IoError and FormatError
// exit 2, NumericError exits 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wordlap
