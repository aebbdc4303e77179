#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jacobi {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text; offset is the byte position of the failure.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, std::size_t offset)
      : Error(msg + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Identifier that is neither a chart coordinate nor a known function.
class UnknownIdentifier : public Error {
 public:
  explicit UnknownIdentifier(const std::string& name)
      : Error("unknown identifier '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Evaluation hit a singular or undefined subexpression.
class DomainError : public Error {
 public:
  DomainError(const std::string& msg, const std::string& subexpression)
      : Error(msg + " in subexpression: " + subexpression), subexpression_(subexpression) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

/// Objects attached to different charts were combined.
class ChartMismatch : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration file contents.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, const std::string& key_path = "", int line = 0)
      : Error(format(msg, key_path, line)), key_path_(key_path), line_(line) {}
  const std::string& key_path() const { return key_path_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& msg, const std::string& key, int line) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += key + ": ";
    return out + msg;
  }
  std::string key_path_;
  int line_;
};

/// Recursion step requested with no basis functions.
class EmptyBasis : public Error {
 public:
  using Error::Error;
};

/// Collocation produced an identically zero design matrix.
class DegenerateSampling : public Error {
 public:
  using Error::Error;
};

/// Flow integration would exceed the configured step cap.
class StepCountExceeded : public Error {
 public:
  using Error::Error;
};

/// Constant gauge functions generate only rescaled chains; refused unless overridden.
class ConstantGaugeRefused : public Error {
 public:
  using Error::Error;
};

}  // namespace jacobi
