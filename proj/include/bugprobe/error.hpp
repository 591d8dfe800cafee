#pragma once

#include <stdexcept>
#include <string>

namespace bugprobe {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, const std::string& what)
      : Error("line " + std::to_string(line) + ", col " + std::to_string(col) +
              ": " + what),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

class UndeclaredClass : public Error {
 public:
  UndeclaredClass(std::string name, int line)
      : Error("line " + std::to_string(line) + ": undeclared sprite class '" +
              name + "'"),
        name_(std::move(name)),
        line_(line) {}
  const std::string& name() const { return name_; }
  int line() const { return line_; }

 private:
  std::string name_;
  int line_;
};

class DuplicateClass : public Error {
 public:
  DuplicateClass(std::string name, int line)
      : Error("line " + std::to_string(line) + ": duplicate sprite class '" +
              name + "'"),
        name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ConflictingMutations : public Error {
 public:
  ConflictingMutations(std::string a, std::string b)
      : Error("mutations " + a + " and " + b + " touch the same rule"),
        first_(std::move(a)),
        second_(std::move(b)) {}
  const std::string& first() const { return first_; }
  const std::string& second() const { return second_; }

 private:
  std::string first_;
  std::string second_;
};

#define BUGPROBE_SIMPLE_ERROR(Name)       \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

BUGPROBE_SIMPLE_ERROR(InvalidSpec)
BUGPROBE_SIMPLE_ERROR(InvalidLevel)
BUGPROBE_SIMPLE_ERROR(InvalidMutation)
BUGPROBE_SIMPLE_ERROR(SteppedTerminalState)
BUGPROBE_SIMPLE_ERROR(SequenceExhausted)
BUGPROBE_SIMPLE_ERROR(UnreachableAccept)
BUGPROBE_SIMPLE_ERROR(NoLegalActions)
BUGPROBE_SIMPLE_ERROR(TrajectoryMismatch)
BUGPROBE_SIMPLE_ERROR(BudgetExceeded)
BUGPROBE_SIMPLE_ERROR(EmptyCatalog)
BUGPROBE_SIMPLE_ERROR(TooFewSamples)
BUGPROBE_SIMPLE_ERROR(EmptyReference)
BUGPROBE_SIMPLE_ERROR(MissingAsset)

#undef BUGPROBE_SIMPLE_ERROR

}  // namespace bugprobe
