#pragma once

#include <stdexcept>
#include <string>

namespace grasplab {

// Base for all library errors. `code()` is a stable machine-readable tag;
// what() is "<code>: <message>".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class NonMonotoneTime : public Error {
 public:
  explicit NonMonotoneTime(const std::string& m) : Error("NonMonotoneTime", m) {}
};

class NonPositiveDuration : public Error {
 public:
  explicit NonPositiveDuration(const std::string& m) : Error("NonPositiveDuration", m) {}
};

class DegenerateTrajectory : public Error {
 public:
  explicit DegenerateTrajectory(const std::string& m) : Error("DegenerateTrajectory", m) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& m, long line)
      : Error("ParseError", m + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

class UnknownTrajectory : public Error {
 public:
  explicit UnknownTrajectory(const std::string& m) : Error("UnknownTrajectory", m) {}
};

class SteppedAfterDone : public Error {
 public:
  explicit SteppedAfterDone(const std::string& m) : Error("SteppedAfterDone", m) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& m) : Error("DimensionMismatch", m) {}
};

class EmptyBuffer : public Error {
 public:
  explicit EmptyBuffer(const std::string& m) : Error("EmptyBuffer", m) {}
};

class EmptyDataset : public Error {
 public:
  explicit EmptyDataset(const std::string& m) : Error("EmptyDataset", m) {}
};

class SingleClassDataset : public Error {
 public:
  explicit SingleClassDataset(const std::string& m) : Error("SingleClassDataset", m) {}
};

class MissingCheckpoint : public Error {
 public:
  explicit MissingCheckpoint(const std::string& m) : Error("MissingCheckpoint", m) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error("ConfigError", m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error("IoError", m) {}
};

class SearchError : public Error {
 public:
  explicit SearchError(const std::string& m) : Error("SearchError", m) {}
};

}  // namespace grasplab
