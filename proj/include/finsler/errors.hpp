#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

// Engine-level failures carry a short reason; anything recoverable (a finding,
// a tolerance miss) is reported through result structs instead of thrown.
struct EngineError : std::runtime_error {
    explicit EngineError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

struct OrderTooHigh : EngineError {
    using EngineError::EngineError;
};
struct SlitViolation : EngineError {
    using EngineError::EngineError;
};
struct NonFinite : EngineError {
    using EngineError::EngineError;
};
struct DomainError : EngineError {
    using EngineError::EngineError;
};
struct NotPositiveDefinite : EngineError {
    using EngineError::EngineError;
};
struct DegenerateFlag : EngineError {
    using EngineError::EngineError;
};
struct NonRiemannianBase : EngineError {
    using EngineError::EngineError;
};
struct NonpositiveWarp : EngineError {
    using EngineError::EngineError;
};
struct IntegrationBudgetExceeded : EngineError {
    using EngineError::EngineError;
};
struct WarpBoundViolated : EngineError {
    using EngineError::EngineError;
};
struct BlowUp : EngineError {
    using EngineError::EngineError;
};
struct ParseError : EngineError {
    ParseError(int line_, int col_, const std::string& msg)
        : EngineError("parse error at " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
    int line;
    int col;
};
struct UnknownSymbol : EngineError {
    using EngineError::EngineError;
};
struct DimensionMismatch : EngineError {
    using EngineError::EngineError;
};

}  // namespace finsler
