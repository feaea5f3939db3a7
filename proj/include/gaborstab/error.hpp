#pragma once

#include <stdexcept>
#include <string>

namespace gaborstab {

enum class ErrorKind {
  precondition,  // caller supplied inputs outside an operation's domain
  convergence,   // a numerical limit (tail, refinement, iteration cap) was not reached
  io,            // file parsing / loading
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& what) { throw Error(ErrorKind::precondition, what); }

[[noreturn]] inline void fail_convergence(const std::string& what) {
  throw Error(ErrorKind::convergence, what);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(what);
}

}  // namespace gaborstab
