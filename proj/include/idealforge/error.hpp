#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace idealforge {

using Nat = std::uint64_t;

enum class ErrorCode {
    InvalidArgument,
    CarrierMismatch,
    CannotAvoid,
    TooLarge,
    TooSmall,
    Overflow,
    NotInFS,
    NotSparse,
    NotVerySparse,
    PoolExhausted,
    WindowExceeded,
    ZeroInput,
    DegeneratePair,
    SearchExhausted,
    CaseMismatch,
    MalformedBundle,
    NoSuchC,
    ParseError,
    Incomplete,
};

constexpr std::string_view code_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CarrierMismatch: return "CarrierMismatch";
    case ErrorCode::CannotAvoid: return "CannotAvoid";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NotInFS: return "NotInFS";
    case ErrorCode::NotSparse: return "NotSparse";
    case ErrorCode::NotVerySparse: return "NotVerySparse";
    case ErrorCode::PoolExhausted: return "PoolExhausted";
    case ErrorCode::WindowExceeded: return "WindowExceeded";
    case ErrorCode::ZeroInput: return "ZeroInput";
    case ErrorCode::DegeneratePair: return "DegeneratePair";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::CaseMismatch: return "CaseMismatch";
    case ErrorCode::MalformedBundle: return "MalformedBundle";
    case ErrorCode::NoSuchC: return "NoSuchC";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Incomplete: return "Incomplete";
    }
    return "Unknown";
}

/// Base exception for every failure surfaced by the library. The code is
/// machine-readable and is what the CLI writes into reports.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string & message) :
        std::runtime_error(std::string(code_name(code)) + ": " + message),
        code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// A bounded construction ran out of candidates. This is an expected
/// outcome for inputs that witness nothing at the configured scale.
class SearchExhausted : public Error {
public:
    SearchExhausted(std::size_t step, Nat window, std::string condition) :
        Error(ErrorCode::SearchExhausted,
              "step " + std::to_string(step) + " exhausted within window " + std::to_string(window) + " (" +
                  condition + ")"),
        step_(step),
        window_(window),
        condition_(std::move(condition))
    {
    }

    std::size_t step() const noexcept { return step_; }
    Nat window() const noexcept { return window_; }
    const std::string & condition() const noexcept { return condition_; }

private:
    std::size_t step_;
    Nat window_;
    std::string condition_;
};

/// Parse failure with a byte offset into the offending text.
class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string & message) :
        Error(ErrorCode::ParseError, "at position " + std::to_string(position) + ": " + message),
        position_(position)
    {
    }

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

namespace detail {

inline Nat checked_add(Nat a, Nat b)
{
    Nat r;
    if (__builtin_add_overflow(a, b, &r))
        throw Error(ErrorCode::Overflow, "natural addition overflows 64 bits");
    return r;
}

inline Nat checked_mul(Nat a, Nat b)
{
    Nat r;
    if (__builtin_mul_overflow(a, b, &r))
        throw Error(ErrorCode::Overflow, "natural multiplication overflows 64 bits");
    return r;
}

} // namespace detail

} // namespace idealforge
