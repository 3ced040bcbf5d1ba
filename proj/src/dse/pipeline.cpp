#include "interlace/dse/pipeline.hpp"

#include "interlace/arch/builder.hpp"
#include "interlace/util/text.hpp"

#include <fmt/format.h>

namespace interlace::dse {

int exit_code(Errc code) {
    switch (code) {
    case Errc::ParseError:
        return kExitParse;
    case Errc::InsufficientCapacity:
        return kExitCapacity;
    case Errc::Io:
        return kExitUsage;
    case Errc::RoutingFailed:
    case Errc::UnroutableSink:
    case Errc::Unreachable:
    case Errc::AllFailed:
        return kExitRouting;
    default:
        return kExitValidation;
    }
}

std::string_view fifo_kind_name(FifoKind f) {
    switch (f) {
    case FifoKind::None:
        return "none";
    case FifoKind::Full2:
        return "full2";
    case FifoKind::Split:
        return "split";
    }
    return "none";
}

std::optional<FifoKind> parse_fifo_kind(std::string_view s) {
    for (auto f : {FifoKind::None, FifoKind::Full2, FifoKind::Split})
        if (fifo_kind_name(f) == s)
            return f;
    return std::nullopt;
}

rtl::StructNetlist lower(const ir::RoutingGraph &g, FifoKind fifo, int split_chain_depth) {
    if (fifo == FifoKind::None)
        return rtl::lower_static(g);
    rtl::ReadyValidOptions o;
    o.fifo = fifo == FifoKind::Full2 ? rtl::FifoMode::Full2 : rtl::FifoMode::Split;
    o.split_chain_depth = split_chain_depth;
    return rtl::lower_ready_valid(g, o);
}

GenResult generate(const arch::ArchSpec &spec, FifoKind fifo) {
    GenResult r{arch::create_uniform_interconnect(spec), {}, {}, std::nullopt};
    r.netlist = lower(r.graph, fifo);
    r.structure = rtl::verify_structure(r.graph, r.netlist);
    if (fifo != FifoKind::None)
        r.valid_mirror = rtl::verify_valid_mirror(r.graph, r.netlist);
    return r;
}

PnrResult run_pnr(const ir::RoutingGraph &g, const pnr::AppGraph &app,
                  const PnrOptions &options) {
    PnrResult r;
    r.packed = pnr::pack(app);
    const auto sites = pnr::SiteMap::from_graph(g);
    const auto io = pnr::assign_io(r.packed, sites);
    const auto gp = pnr::global_place(r.packed, sites, io, options.place.cg, options.seed);
    const auto legal = pnr::legalize(gp, r.packed, sites, io);
    auto sa = options.place.sa;
    sa.seed = options.seed;
    if (options.alphas.size() == 1) {
        sa.alpha = options.alphas[0];
        r.alpha = sa.alpha;
        r.placement = pnr::detailed_place(legal, r.packed, sites, sa).placement;
        r.route = pnr::route(g, r.packed, r.placement, options.route);
        r.sweep = {{r.alpha, r.route.timing.critical_path}};
        return r;
    }
    pnr::RouteEval eval = [&](const pnr::Placement &p) -> std::optional<double> {
        return pnr::route(g, r.packed, p, options.route).timing.critical_path;
    };
    auto best = pnr::alpha_sweep(legal, r.packed, sites, eval, options.alphas, sa);
    r.alpha = best.alpha;
    r.sweep = best.points;
    r.placement = best.placement;
    r.route = pnr::route(g, r.packed, r.placement, options.route);
    return r;
}

std::string format_timing_report(const ir::RoutingGraph &g, const PnrResult &r) {
    std::string out;
    out += fmt::format("critical_path {}\n", text::format_number(r.route.timing.critical_path));
    out += fmt::format("alpha {}\n", text::format_number(r.alpha));
    out += fmt::format("route_iterations {}\n", r.route.iterations);
    long long wl = 0;
    for (const auto &[net, tree] : r.route.routes)
        wl += pnr::routed_wirelength(g, tree);
    out += fmt::format("wirelength {}\n", wl);
    for (const auto &[net, tree] : r.route.routes)
        out += fmt::format("net {} slack {} length {}\n", net,
                           text::format_number(r.route.timing.net_slack.at(net)),
                           pnr::routed_wirelength(g, tree));
    return out;
}

} // namespace interlace::dse
