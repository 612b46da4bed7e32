// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <stdexcept>
#include <string>

namespace hbmlab {

enum class ErrorKind {
  kUsage,                // bad arguments, mismatched sizes, caps exceeded
  kDomain,               // log of zero and similar
  kNumericRange,         // overflow in exp
  kInconsistentEta,      // eta coordinates that map to negative probabilities
  kDivergenceUndefined,  // KL support violation
  kNonConvergence,       // gradient ascent blew up
  kPrecondition,         // submanifold check and similar
  kIo,
  kConfig,
};

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

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::kUsage, what);
}

}  // namespace hbmlab
