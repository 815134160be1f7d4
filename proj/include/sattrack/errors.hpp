#pragma once

#include <stdexcept>
#include <string>

namespace sattrack {

// Base for every error raised by the library. Subclasses carry the
// condition name so callers can branch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SATTRACK_DEFINE_ERROR(Name)                                    \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

SATTRACK_DEFINE_ERROR(EmptyMask);
SATTRACK_DEFINE_ERROR(InvalidBox);
SATTRACK_DEFINE_ERROR(InvalidMask);
SATTRACK_DEFINE_ERROR(InvalidPrompt);
SATTRACK_DEFINE_ERROR(SingularInnovation);
SATTRACK_DEFINE_ERROR(EmptyCandidates);
SATTRACK_DEFINE_ERROR(NoCandidates);
SATTRACK_DEFINE_ERROR(OutOfOrderFrame);
SATTRACK_DEFINE_ERROR(FrameOutOfRange);
SATTRACK_DEFINE_ERROR(ProtocolError);
SATTRACK_DEFINE_ERROR(BridgeClosed);
SATTRACK_DEFINE_ERROR(BridgeTimeout);
SATTRACK_DEFINE_ERROR(SpecError);
SATTRACK_DEFINE_ERROR(LengthMismatch);
SATTRACK_DEFINE_ERROR(EmptyGroup);
SATTRACK_DEFINE_ERROR(UnknownVariant);
SATTRACK_DEFINE_ERROR(ConfigError);

#undef SATTRACK_DEFINE_ERROR

}  // namespace sattrack
