#pragma once

#include <stdexcept>
#include <string>

namespace ddchain {

// Malformed or out-of-contract user input (bad config, duplicate ids, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A result violated one of the model invariants, e.g. two backends disagree.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ddchain
