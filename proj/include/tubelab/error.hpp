#pragma once

#include <stdexcept>
#include <string>

namespace tubelab {

/// Error carrying a stable machine-readable code ("delta-range", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace tubelab
