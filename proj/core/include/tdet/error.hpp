#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tdet {

enum class ErrorKind {
  io,
  format,
  unsupported_layout,
  truncation,
  parse,
  domain,
  vocabulary,
  identity,
  alignment,
  shape,
  numeric,
  consistency,
  placement,
  split,
  empty_dataset,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tdet
