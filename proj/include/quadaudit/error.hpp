#pragma once

#include <stdexcept>
#include <string>

namespace quadaudit {

enum class ErrorKind {
  kInput,       // out-of-range argument, malformed option
  kValidation,  // cohort-level contract violated
  kUndefined,   // statistic undefined for the given data (zero variance, one class)
  kIo,          // unreadable stream or unwritable destination
};

class AuditError : public std::runtime_error {
 public:
  AuditError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace quadaudit
