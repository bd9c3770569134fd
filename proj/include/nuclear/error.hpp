#pragma once

#include <stdexcept>
#include <string>

namespace nuclear {

enum class ErrorKind {
  invalid_argument,
  resource_exhausted,
  range,
  unsupported,
  precision,
  numeric,
  io,
  usage,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so the CLI can map it to
// an exit code and the report to an error message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace nuclear
