#pragma once

#include "interlace/rtl/netlist.hpp"

#include <string>
#include <string_view>

// Structural Verilog subset:
//
//   file     := module* ; the last module named `top` is the root
//   module   := "module" ID [ "(" [port {"," port}] ")" ] ";" item* "endmodule"
//   port     := ("input" | "output") [range] ID
//   item     := "wire" [range] ID {"," ID} ";"
//             | "assign" ID "=" ref ";"
//             | TYPE ["#" "(" param {"," param} ")"] ID "(" [conn {"," conn}] ")" ";"
//   param    := "." ID "(" NUMBER ")"
//   conn     := "." ID "(" ref ")"
//   ref      := ID [ "[" NUMBER ":" NUMBER "]" ]
//   range    := "[" NUMBER ":" NUMBER "]"
//
// TYPE is a primitive (MUX, REG, FIFO_REG, CFG_REG, CORE_<name>, CONST,
// RDY_JOIN) or a module defined earlier in the file. Comments are // and
// /* */. Undeclared nets referenced in a connection are implicit 1-bit wires.
namespace interlace::rtl {

// One module per tile (tile_x<X>_y<Y>) plus `top`. Nets touching a single
// tile are local; nets spanning tiles are declared in top and passed as
// ports. Everything is sorted, so emission is deterministic.
std::string emit_rtl(const StructNetlist &n);

// Flattens the hierarchy back into a StructNetlist. Throws ParseError with a
// line and column, or Error(UnknownPrimitive).
StructNetlist parse_rtl(std::string_view text);

} // namespace interlace::rtl
