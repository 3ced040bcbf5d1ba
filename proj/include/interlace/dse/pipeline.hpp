#pragma once

#include "interlace/arch/spec.hpp"
#include "interlace/error.hpp"
#include "interlace/ir/graph.hpp"
#include "interlace/pnr/app.hpp"
#include "interlace/pnr/place.hpp"
#include "interlace/pnr/route.hpp"
#include "interlace/rtl/netlist.hpp"
#include "interlace/rtl/verify.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace interlace::dse {

// Process exit codes of the command-line driver.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitParse = 2,
    kExitValidation = 3,
    kExitStructure = 4,
    kExitCapacity = 5,
    kExitRouting = 6,
};

int exit_code(Errc code);

enum class FifoKind { None, Full2, Split };

std::string_view fifo_kind_name(FifoKind f);
std::optional<FifoKind> parse_fifo_kind(std::string_view s);

// Static lowering for FifoKind::None, ready-valid lowering otherwise.
rtl::StructNetlist lower(const ir::RoutingGraph &g, FifoKind fifo, int split_chain_depth = 2);

struct GenResult {
    ir::RoutingGraph graph;
    rtl::StructNetlist netlist;
    rtl::Report structure;
    std::optional<rtl::Report> valid_mirror; // ready-valid only
    bool pass() const { return structure.pass() && (!valid_mirror || valid_mirror->pass()); }
};

GenResult generate(const arch::ArchSpec &spec, FifoKind fifo);

struct PnrOptions {
    uint64_t seed = 1;
    std::vector<double> alphas{1.0};
    pnr::PlaceParams place;
    pnr::RouteParams route;
};

struct PnrResult {
    pnr::PackedGraph packed;
    pnr::Placement placement;
    pnr::RouteResult route;
    double alpha = 1;
    std::vector<pnr::SweepPoint> sweep; // one entry per alpha tried
};

// Pack, place (one alpha or a best-of-alphas sweep) and route. Throws
// InsufficientCapacity, RoutingFailed, UnroutableSink or AllFailed.
PnrResult run_pnr(const ir::RoutingGraph &g, const pnr::AppGraph &app,
                  const PnrOptions &options);

// Summary of a PnR run: critical path, per-net slack and routed length.
std::string format_timing_report(const ir::RoutingGraph &g, const PnrResult &r);

} // namespace interlace::dse
