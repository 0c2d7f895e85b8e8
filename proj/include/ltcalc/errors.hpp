#pragma once

#include <stdexcept>
#include <string>

namespace ltcalc {

// Error categories for precondition violations and failed bounded searches.
// Every throwing operation documents which of these it can raise.
enum class Errc {
    InsufficientDepth,
    LengthMismatch,
    NotANode,
    NotASubtree,
    PreconditionFailed,
    NoJoinFound,
    NotAFusionChain,
    BaseNotContained,
    BaseMismatch,
    NotBelow,
    NotDense,
    NotACollage,
    IndexInUse,
    IndexMissing,
    IndexOutsideBase,
    NotPreDense,
    MalformedBundle,
    DepthExhausted,
    NotGood,
    SimpleSomewhere,
    SeparationImpossible,
    SupportNotContained,
    Unbounded,
    NotNormal,
    NotArithmetic,
    CodeInvalid,
    ParseError,
    InternalCheckFailed,
};

const char* errc_name(Errc e);

class CalcError : public std::runtime_error {
public:
    CalcError(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw CalcError(code, what);
}

// Postcondition guard: operations that promise verified output use this
// instead of assert so the check survives release builds.
inline void ensure(bool ok, Errc code, const std::string& what) {
    if (!ok) throw CalcError(code, what);
}

}  // namespace ltcalc
