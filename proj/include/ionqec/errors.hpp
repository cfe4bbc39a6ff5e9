#pragma once

#include <stdexcept>
#include <string>

namespace ionqec {

// Ion or basis index outside the register.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed input: non-unitary matrix, bad weights, control == target, bad config.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A non-unitary operator removed all support from the state.
class AnnihilationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Register is not in the code space it was asked to decode from.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A correction circuit left the ancilla entangled with the register.
class FeedbackError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Register too large for the requested representation.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace ionqec
