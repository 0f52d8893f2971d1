#include "nij/common/error.hpp"

namespace nij {

std::string_view error_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::InvalidStructure: return "invalid-structure";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::NonGeneric: return "non-generic";
    case ErrorKind::SingularConfiguration: return "singular-configuration";
    case ErrorKind::NoComplexStructure: return "no-complex-structure";
    case ErrorKind::DegenerateWeb: return "degenerate-web";
    case ErrorKind::Refit: return "refit";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace nij
