#ifndef HMCTAG_ERROR_H_
#define HMCTAG_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hmctag {

// Bad argument or violated precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + (line ? ":" + std::to_string(line) : std::string()) +
                           ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A normalizer underflowed to zero (or went non-finite) at some position.
class NumericalDegeneracy : public std::runtime_error {
 public:
  NumericalDegeneracy(std::size_t position, const std::string& what)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace hmctag

#endif  // HMCTAG_ERROR_H_
