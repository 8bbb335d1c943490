#ifndef FLATSURF_ERRORS_HPP
#define FLATSURF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace flatsurf {

enum class ErrorCode {
    AngleNotMultipleOfPi,
    SingularMatrix,
    DegeneratePolygon,
    FlipLimitExceeded,
    SearchBudgetExceeded,
    NoConePoints,
    ResolutionTooCoarse,
    IterationLimit,
    PointOffSurface,
    BranchedCover,
    NotClosed,
    NotSimple,
    StartAtConePoint,
    CylinderDetected,
    BudgetExceeded,
    SyntaxError,
    UnknownEdge,
    DuplicateGluing,
    BadParams,
    InvalidSurface,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace flatsurf

#endif
