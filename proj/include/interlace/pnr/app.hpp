#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace interlace::pnr {

enum class InstKind { Pe, Mem, Io, Const, Reg };

std::string_view kind_name(InstKind k); // "pe", "mem", "io", "const", "reg"
std::optional<InstKind> parse_kind(std::string_view s);

const std::vector<std::string> &input_ports(InstKind k);
const std::vector<std::string> &output_ports(InstKind k);

struct PortRef {
    std::string inst;
    std::string port;
    friend auto operator<=>(const PortRef &, const PortRef &) = default;
};

std::string to_string(const PortRef &p); // "inst.port"

struct AppInstance {
    std::string name;
    InstKind kind = InstKind::Pe;
    std::map<std::string, std::string> attrs;
    friend bool operator==(const AppInstance &, const AppInstance &) = default;
};

// A net is named after its source pin.
struct AppNet {
    PortRef source;
    std::vector<PortRef> sinks;

    std::string name() const { return to_string(source); }
    friend bool operator==(const AppNet &, const AppNet &) = default;
};

struct AppGraph {
    std::vector<AppInstance> instances;
    std::vector<AppNet> nets;

    const AppInstance *find(std::string_view name) const;
    const AppNet *net_driving(const PortRef &sink) const;
    std::vector<const AppNet *> nets_from(std::string_view inst) const;
    friend bool operator==(const AppGraph &, const AppGraph &) = default;
};

// Throws Error(MultiplyDrivenNet) when a sink pin appears on two nets or two
// nets share a source, Error(DanglingPort) when a net names an unknown
// instance, a port that the kind does not have, or has no sinks, and
// Error(InvalidGraph) on duplicate instance names.
void check_app(const AppGraph &a);

// Text format, one statement per line, '#' comments:
//   inst <name> <kind> [key=value ...]
//   net <inst.port> -> <inst.port>[,<inst.port>...]
AppGraph parse_app(std::string_view text);
std::string format_app(const AppGraph &a);

// Operand annotation on one instance input after packing.
struct InputAnnotation {
    bool reg = false;                 // absorbed pipeline register
    std::optional<long long> constant; // folded constant
    friend bool operator==(const InputAnnotation &, const InputAnnotation &) = default;
};

struct PackedGraph {
    AppGraph app;
    // instance -> input port -> annotation
    std::map<std::string, std::map<std::string, InputAnnotation>> inputs;
    std::vector<std::string> absorbed_regs;
    std::vector<std::string> folded_consts;

    const InputAnnotation *annotation(std::string_view inst, std::string_view port) const;
    friend bool operator==(const PackedGraph &, const PackedGraph &) = default;
};

// Absorbs every REG whose single sink is a PE input (one register per PE
// input), then folds every CONST into its consumers' annotations.
PackedGraph pack(const AppGraph &a);
PackedGraph pack(const PackedGraph &p);

} // namespace interlace::pnr
