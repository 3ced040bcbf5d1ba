#include "interlace/error.hpp"

#include <fmt/format.h>

namespace interlace {

std::string_view to_string(Errc code) {
    switch (code) {
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::UnknownLayer: return "UnknownLayer";
    case Errc::LayerMismatch: return "LayerMismatch";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::ParseError: return "ParseError";
    case Errc::SameSide: return "SameSide";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::EmptyPolicy: return "EmptyPolicy";
    case Errc::InvalidGraph: return "InvalidGraph";
    case Errc::UnknownPrimitive: return "UnknownPrimitive";
    case Errc::MalformedOneHot: return "MalformedOneHot";
    case Errc::MultiplyDrivenNet: return "MultiplyDrivenNet";
    case Errc::DanglingPort: return "DanglingPort";
    case Errc::UnplacedPin: return "UnplacedPin";
    case Errc::InsufficientCapacity: return "InsufficientCapacity";
    case Errc::CombinationalLoop: return "CombinationalLoop";
    case Errc::Unreachable: return "Unreachable";
    case Errc::RoutingFailed: return "RoutingFailed";
    case Errc::UnroutableSink: return "UnroutableSink";
    case Errc::AllFailed: return "AllFailed";
    case Errc::FieldConflict: return "FieldConflict";
    case Errc::UnknownField: return "UnknownField";
    case Errc::BadAddress: return "BadAddress";
    case Errc::SelectOutOfRange: return "SelectOutOfRange";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

ParseError::ParseError(const std::string &message, int line, int column)
    : Error(Errc::ParseError,
            fmt::format("{}:{}: {}", line, column, message)),
      line_(line), column_(column) {}

RoutingFailed::RoutingFailed(int iterations, int remaining_overuse)
    : Error(Errc::RoutingFailed,
            fmt::format("routing failed after {} iterations, {} overused "
                        "node(s) remain",
                        iterations, remaining_overuse)),
      iterations_(iterations), remaining_overuse_(remaining_overuse) {}

} // namespace interlace
