#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinxfer {

/// Malformed or inconsistent caller input (lengths, ranges, parity).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input that is well-formed but admits no meaningful result, e.g. a dark
/// state whose every coupling product vanishes.
class DegenerateInputError : public InputError {
 public:
  using InputError::InputError;
};

/// Unreadable or unwritable file, or a file whose contents do not parse.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure inside one Monte Carlo realization; carries the realization index.
class RealizationError : public std::runtime_error {
 public:
  RealizationError(std::size_t index, const std::string& what)
      : std::runtime_error("realization " + std::to_string(index) + ": " + what),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace spinxfer
