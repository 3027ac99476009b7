#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace excal {

/// Base of every error raised by the engine. `tag()` is the stable short name
/// used in reports and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string tag, const std::string& what)
      : std::runtime_error(what), tag_(std::move(tag)) {}
  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

#define EXCAL_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

EXCAL_DEFINE_ERROR(ShapeMismatch)
EXCAL_DEFINE_ERROR(DivisionByZeroAtPoint)
EXCAL_DEFINE_ERROR(DomainError)
EXCAL_DEFINE_ERROR(OrderExceeded)
EXCAL_DEFINE_ERROR(IndexOutOfRange)
EXCAL_DEFINE_ERROR(UnknownIdentifier)
EXCAL_DEFINE_ERROR(ArityError)
EXCAL_DEFINE_ERROR(DegreeError)
EXCAL_DEFINE_ERROR(TypeError)
EXCAL_DEFINE_ERROR(PointExcluded)
EXCAL_DEFINE_ERROR(SingularMetric)
EXCAL_DEFINE_ERROR(JetCapExceeded)
EXCAL_DEFINE_ERROR(NotADerivation)
EXCAL_DEFINE_ERROR(ReconstructionMismatch)
EXCAL_DEFINE_ERROR(UnknownEntry)
EXCAL_DEFINE_ERROR(ValidationFailed)
EXCAL_DEFINE_ERROR(ConfigError)
EXCAL_DEFINE_ERROR(UnknownSuite)

#undef EXCAL_DEFINE_ERROR

/// Parse failure with the byte offset into the source text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& msg)
      : Error("SyntaxError", msg + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace excal
