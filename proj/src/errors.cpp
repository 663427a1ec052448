#include "ies/errors.hpp"

namespace ies {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Dimension: return "dimension error";
    case ErrorKind::Constraint: return "constraint error";
    case ErrorKind::Topology: return "topology error";
    case ErrorKind::Numeric: return "numeric error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::Dependency: return "dependency error";
    case ErrorKind::Catalog: return "catalog error";
    case ErrorKind::Exhaustion: return "exhaustion error";
    case ErrorKind::Refusal: return "refusal";
  }
  return "error";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parameter: return 2;
    case ErrorKind::Dimension: return 2;
    case ErrorKind::Constraint: return 2;
    case ErrorKind::Catalog: return 2;
    case ErrorKind::Topology: return 3;
    case ErrorKind::Numeric: return 4;
    case ErrorKind::Parse: return 5;
    case ErrorKind::Io: return 5;
    case ErrorKind::Dependency: return 6;
    case ErrorKind::Exhaustion: return 7;
    case ErrorKind::Refusal: return 8;
  }
  return 1;
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, std::string(to_string(kind)) + ": " + message);
}

}  // namespace ies
