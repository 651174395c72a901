#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hrs {

enum class ErrorKind {
    MissingKey,
    InvalidValue,
    Overflow,
    OutOfRange,
    DimensionMismatch,
    SameParticle,
    EmptyParticle,
    NotNormalized,
    GridTooSmall,
    AllZeroProbabilities,
    SingleDim,
    DistanceExceedsBox,
    PreconditionViolated,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type; `kind` lets callers
// (the CLI in particular) map failures onto exit codes without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    bool is_config_error() const noexcept {
        return kind_ == ErrorKind::MissingKey || kind_ == ErrorKind::InvalidValue;
    }

private:
    ErrorKind kind_;
};

}  // namespace hrs
