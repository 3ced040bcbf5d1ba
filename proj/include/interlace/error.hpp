#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace interlace {

enum class Errc {
    OutOfBounds,
    UnknownLayer,
    LayerMismatch,
    SelfLoop,
    UnknownNode,
    ParseError,
    SameSide,
    InvalidSpec,
    EmptyPolicy,
    InvalidGraph,
    UnknownPrimitive,
    MalformedOneHot,
    MultiplyDrivenNet,
    DanglingPort,
    UnplacedPin,
    InsufficientCapacity,
    CombinationalLoop,
    Unreachable,
    RoutingFailed,
    UnroutableSink,
    AllFailed,
    FieldConflict,
    UnknownField,
    BadAddress,
    SelectOutOfRange,
    Io,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

class ParseError : public Error {
public:
    ParseError(const std::string &message, int line, int column);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class RoutingFailed : public Error {
public:
    RoutingFailed(int iterations, int remaining_overuse);

    int iterations() const noexcept { return iterations_; }
    int remaining_overuse() const noexcept { return remaining_overuse_; }

private:
    int iterations_;
    int remaining_overuse_;
};

} // namespace interlace
