#pragma once

#include <stdexcept>
#include <string>

namespace ies {

/// Failure categories. Each maps to a distinct process exit code in the CLI.
enum class ErrorKind {
  Parameter,   // argument out of its documented range
  Dimension,   // shape mismatch between inputs
  Constraint,  // structural requirement violated (e.g. coordinate 1 missing)
  Topology,    // disconnected graph, isolated point
  Numeric,     // eigensolver non-convergence, degenerate fit
  Parse,       // malformed input file
  Io,          // unreadable/unwritable path
  Dependency,  // upstream artifact missing
  Catalog,     // unknown manifold id
  Exhaustion,  // no candidate survives a filter
  Refusal,     // request exceeds a configured cap
};

const char* to_string(ErrorKind kind) noexcept;
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace ies
