#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nij {

enum class ErrorKind {
  Dimension,
  Domain,
  InvalidStructure,
  Argument,
  DegenerateInput,
  NonGeneric,
  SingularConfiguration,
  NoComplexStructure,
  DegenerateWeb,
  Refit,
  Parse,
  Schema,
  Io,
};

/// Stable lowercase identifier used in CLI reports ("no-complex-structure", ...).
std::string_view error_code(ErrorKind kind);

/// Every failure raised by the toolkit carries a kind so callers can map it to
/// report codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view code() const { return error_code(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace nij
