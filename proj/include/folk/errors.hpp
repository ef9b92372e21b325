#ifndef FOLK_ERRORS_HPP
#define FOLK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace folk {

// Base class for all recoverable errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FOLK_DEFINE_ERROR(Name)        \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

// fol_core
FOLK_DEFINE_ERROR(MalformedPredicate);
FOLK_DEFINE_ERROR(EmptyClause);
FOLK_DEFINE_ERROR(MissingAssignment);

// prompt_kit
FOLK_DEFINE_ERROR(UnsupportedPhase);
FOLK_DEFINE_ERROR(NoQuestions);
FOLK_DEFINE_ERROR(MissingContext);

// llm_gateway
FOLK_DEFINE_ERROR(BackendUnavailable);
FOLK_DEFINE_ERROR(ReplayMiss);
FOLK_DEFINE_ERROR(StorageFailure);
FOLK_DEFINE_ERROR(NetworkError);

// grounding
FOLK_DEFINE_ERROR(GroundingMiss);
FOLK_DEFINE_ERROR(ProviderUnavailable);

// pipeline
FOLK_DEFINE_ERROR(MissingFolkArtifacts);

// evalsuite
FOLK_DEFINE_ERROR(FormatError);
FOLK_DEFINE_ERROR(InsufficientClass);
FOLK_DEFINE_ERROR(LengthMismatch);
FOLK_DEFINE_ERROR(DegenerateData);

// cli / configuration
FOLK_DEFINE_ERROR(ConfigError);

#undef FOLK_DEFINE_ERROR

}  // namespace folk

#endif  // FOLK_ERRORS_HPP
