#pragma once

#include <stdexcept>
#include <string>

namespace retroimg {

enum class ErrorCode {
  Validation,       // bad input, precondition or invariant violation
  DarkConditional,  // conditioning on a (numerically) zero-probability event
  Verification,     // an oracle comparison exceeded its tolerance
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(const std::string& what) {
  throw Error(ErrorCode::Validation, what);
}

}  // namespace retroimg
