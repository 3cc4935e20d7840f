#pragma once

#include <stdexcept>
#include <string>

namespace translit {

// Thrown on any contract violation: malformed input files, graphemes without
// a mapping, dimension mismatches, undefined loss instances. Messages name
// the offending grapheme/position where one exists.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace translit
