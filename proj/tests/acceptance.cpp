// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "interlace/arch/builder.hpp"
#include "interlace/arch/spec.hpp"
#include "interlace/dse/dse.hpp"
#include "interlace/dse/pipeline.hpp"
#include "interlace/error.hpp"
#include "interlace/pnr/place.hpp"
#include "interlace/pnr/route.hpp"
#include "interlace/rtl/ready_join.hpp"
#include "interlace/rtl/verify.hpp"
#include "interlace/sim/bitstream.hpp"
#include "interlace/sim/simulate.hpp"
#include "interlace/util/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <set>

using namespace interlace;
using ir::NodeId;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = INTERLACE_SOURCE_DIR;
const std::vector<std::string> kBenchmarks{"pipeline", "tree", "stencil", "fanout", "fft"};

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string &what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::vector<dse::Benchmark> benchmarks() {
    std::vector<dse::Benchmark> out;
    for (const auto &b : kBenchmarks)
        out.push_back({b, pnr::parse_app(text::read_file(kRoot / "benchmarks" / (b + ".app")))});
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// 1. Structural verification over a grid of small fabrics.
Outcome structural() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    int specs = 0;
    for (int tracks = 2; tracks <= 6; ++tracks)
        for (auto topo : {arch::Topology::Wilton, arch::Topology::Disjoint})
            for (double reg : {0.0, 1.0}) {
                arch::ArchSpec spec;
                spec.width = spec.height = 3;
                spec.layers[0].num_tracks = tracks;
                spec.layers[0].topology = topo;
                spec.layers[0].reg_density = reg;
                auto g = arch::create_uniform_interconnect(spec);
                auto r = rtl::verify_structure(g, rtl::lower_static(g));
                o.require(r.pass(), fmt::format("tracks {} {} reg {}: {} findings", tracks,
                                                arch::topology_name(topo), reg,
                                                r.findings.size()));
                ++specs;
            }
    const double t = seconds_since(start);
    o.require(t < 10, fmt::format("took {:.1f}s", t));
    o.note(fmt::format("{} specs in {:.2f}s", specs, t));
    return o;
}

// 2. Exhaustive per-edge sweep plus a localized config-map fault.
Outcome sweep() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    arch::ArchSpec spec;
    spec.width = spec.height = 4;
    spec.layers[0].num_tracks = 4;
    auto g = arch::create_uniform_interconnect(spec);
    auto n = rtl::lower_static(g);
    auto hardware = rtl::extract_config_map(n);
    auto clean = sim::exhaustive_sweep(g, n.config, hardware);
    o.require(clean.cases == g.edges().size(), "case count differs from edge count");
    o.require(clean.pass(), fmt::format("{} edges failed", clean.failures.size()));

    // Swap where two equal-width selects live in the sidecar. Writes of a
    // nonzero index for either mux land in the other one, so exactly the
    // edges into those muxes with a nonzero fan-in index must fail.
    auto sidecar = n.config;
    sim::FieldIndex index(g, sidecar);
    std::optional<size_t> a, b;
    for (size_t i = 0; i < sidecar.size() && !b; ++i) {
        const auto &f = sidecar[i];
        if (f.meaning != rtl::FieldMeaning::MuxSelect || !index.node_of(f.target_inst))
            continue;
        if (!a)
            a = i;
        else if (f.bit_width == sidecar[*a].bit_width && f.address() != sidecar[*a].address())
            b = i;
    }
    if (!a || !b) {
        o.require(false, "no pair of select fields to swap");
        return o;
    }
    const NodeId ma = *index.node_of(sidecar[*a].target_inst);
    const NodeId mb = *index.node_of(sidecar[*b].target_inst);
    std::swap(sidecar[*a].x, sidecar[*b].x);
    std::swap(sidecar[*a].y, sidecar[*b].y);
    std::swap(sidecar[*a].feature, sidecar[*b].feature);
    std::swap(sidecar[*a].reg, sidecar[*b].reg);
    std::swap(sidecar[*a].bit_offset, sidecar[*b].bit_offset);
    std::set<std::pair<uint32_t, uint32_t>> expected, got;
    for (auto m : {ma, mb}) {
        auto fi = g.fan_in(m);
        for (size_t k = 1; k < fi.size(); ++k)
            expected.insert({fi[k].value, m.value});
    }
    auto faulty = sim::exhaustive_sweep(g, sidecar, hardware);
    for (const auto &f : faulty.failures)
        got.insert({f.src.value, f.dst.value});
    o.require(!faulty.pass(), "fault not detected");
    o.require(got == expected, fmt::format("fault flagged {} edges, expected {}", got.size(),
                                           expected.size()));
    const double t = seconds_since(start);
    o.require(t < 60, fmt::format("took {:.1f}s", t));
    o.note(fmt::format("{} edges pass; fault localized to {} edges at {} and {}; {:.2f}s",
                       clean.cases, got.size(), ir::node_name(g.node(ma)),
                       ir::node_name(g.node(mb)), t));
    return o;
}

// 3. Optimized ready join against the reference on every input combination.
Outcome ready_join() {
    Outcome o;
    long cases = 0, mismatches = 0;
    for (int dirs = 2; dirs <= 4; ++dirs) {
        int states = 1;
        for (int i = 0; i < dirs; ++i)
            states *= 4; // each direction selects fan-in 0..2 or nothing
        for (int s = 0; s < states; ++s)
            for (int r = 0; r < (1 << dirs); ++r) {
                std::vector<rtl::JoinInput> in(static_cast<size_t>(dirs));
                int code = s;
                for (int d = 0; d < dirs; ++d, code /= 4) {
                    in[static_cast<size_t>(d)].sel_onehot =
                        code % 4 == 3 ? 0u : 1u << (code % 4);
                    in[static_cast<size_t>(d)].ready = (r >> d) & 1;
                }
                for (int src = 0; src < 3; ++src) {
                    ++cases;
                    mismatches += rtl::ready_join(in, src) != rtl::ready_join_reference(in, src);
                }
            }
    }
    o.require(mismatches == 0, fmt::format("{} mismatches", mismatches));
    o.note(fmt::format("{} cases, {} mismatches", cases, mismatches));
    return o;
}

// 4. Wilton routes at least as often as Disjoint; a crafted case separates them.
Outcome routability() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    std::map<arch::Topology, int> ok;
    std::map<arch::Topology, ir::RoutingGraph> fabrics;
    for (auto topo : {arch::Topology::Wilton, arch::Topology::Disjoint}) {
        arch::ArchSpec spec;
        spec.layers[0].topology = topo;
        fabrics.emplace(topo, arch::create_uniform_interconnect(spec));
    }
    for (uint64_t seed = 1; seed <= 30; ++seed) {
        const auto app = dse::synthetic_app(seed);
        for (auto &[topo, g] : fabrics) {
            dse::PnrOptions opt;
            opt.seed = seed;
            try {
                dse::run_pnr(g, app, opt);
                ++ok[topo];
            } catch (const Error &) {
            }
        }
    }
    const int w = ok[arch::Topology::Wilton], d = ok[arch::Topology::Disjoint];
    o.require(w >= d, fmt::format("wilton {} < disjoint {}", w, d));

    auto crafted = pnr::parse_app(
        text::read_file(kRoot / "benchmarks" / "crafted" / "track_turn.app"));
    std::map<arch::Topology, bool> routed;
    for (auto topo : {arch::Topology::Wilton, arch::Topology::Disjoint}) {
        auto spec = arch::parse_arch_spec(text::read_file(
            kRoot / "specs" /
            fmt::format("track_turn_{}.spec", arch::topology_name(topo))));
        auto g = arch::create_uniform_interconnect(spec);
        try {
            dse::run_pnr(g, crafted, {});
            routed[topo] = true;
        } catch (const Error &) {
            routed[topo] = false;
        }
    }
    o.require(routed[arch::Topology::Wilton], "crafted case fails on wilton");
    o.require(!routed[arch::Topology::Disjoint], "crafted case routes on disjoint");
    const double t = seconds_since(start);
    o.require(t < 300, fmt::format("took {:.1f}s", t));
    o.note(fmt::format("synthetic successes wilton {}/30 disjoint {}/30; crafted case "
                       "wilton {} disjoint {}; {:.1f}s",
                       w, d, routed[arch::Topology::Wilton] ? "routes" : "fails",
                       routed[arch::Topology::Disjoint] ? "routes" : "fails", t));
    return o;
}

dse::SweepSpec base_sweep() {
    dse::SweepSpec s;
    s.benchmarks = benchmarks();
    s.seeds = {1, 2, 3, 4, 5};
    return s;
}

// 5. Track-count trend.
Outcome tracks() {
    Outcome o;
    auto s = base_sweep();
    s.tracks = {4, 6, 8};
    auto points = dse::run_dse(s);
    auto rows = dse::summarize(points);
    std::vector<std::string> medians;
    for (size_t i = 0; i < rows.size(); ++i) {
        o.require(rows[i].area.has_value() && rows[i].median_critical_path.has_value(),
                  fmt::format("tracks {} has no successful run", rows[i].knobs.tracks));
        if (!rows[i].area || !rows[i].median_critical_path)
            return o;
        medians.push_back(text::format_number(*rows[i].median_critical_path));
        if (i == 0)
            continue;
        o.require(rows[i].area->sb_area > rows[i - 1].area->sb_area &&
                      rows[i].area->cb_area > rows[i - 1].area->cb_area,
                  fmt::format("area not increasing at {} tracks", rows[i].knobs.tracks));
        o.require(*rows[i].median_critical_path <= *rows[i - 1].median_critical_path,
                  fmt::format("median critical path rises at {} tracks", rows[i].knobs.tracks));
    }
    // Total over (benchmark, seed) pairs that route at both 4 and 8 tracks.
    std::map<std::pair<std::string, uint64_t>, std::map<int, double>> cp;
    for (const auto &p : points)
        if (p.success)
            cp[{p.benchmark, p.seed}][p.knobs.tracks] = *p.critical_path;
    double at4 = 0, at8 = 0;
    for (const auto &[k, v] : cp)
        if (v.count(4) && v.count(8)) {
            at4 += v.at(4);
            at8 += v.at(8);
        }
    const double gain = at4 > 0 ? (at4 - at8) / at4 : 0;
    o.require(gain > 0 && gain < 0.5,
              fmt::format("improvement {:.1f}% outside (0%, 50%)", 100 * gain));
    o.note(fmt::format("sb area {}/{}/{}; median critical path {}; 4->8 improvement {:.1f}%",
                       rows[0].area->sb_area, rows[1].area->sb_area, rows[2].area->sb_area,
                       fmt::join(medians, "/"), 100 * gain));
    return o;
}

// 6. Port-connection trend for core outputs and inputs.
Outcome ports() {
    Outcome o;
    for (bool outputs : {true, false}) {
        auto s = base_sweep();
        if (outputs)
            s.sb_out_sides = {4, 3, 2};
        else
            s.cb_sides = {4, 3, 2};
        auto rows = dse::summarize(dse::run_dse(s));
        // Summaries come sorted by knobs: 2, 3, 4 sides.
        std::reverse(rows.begin(), rows.end());
        std::vector<std::string> trace;
        for (size_t i = 0; i < rows.size(); ++i) {
            const int sides = outputs ? rows[i].knobs.sb_out_sides : rows[i].knobs.cb_sides;
            const auto area = dse::arch_area(
                dse::apply_knobs(s.base, rows[i].knobs), rows[i].knobs.fifo);
            const long long a = outputs ? area.sb_area : area.cb_area;
            trace.push_back(fmt::format(
                "{}:{}/{}/{}", sides, a,
                rows[i].median_critical_path ? text::format_number(*rows[i].median_critical_path)
                                             : "-",
                rows[i].successes));
            if (i == 0)
                continue;
            const auto prev = dse::arch_area(dse::apply_knobs(s.base, rows[i - 1].knobs),
                                             rows[i - 1].knobs.fifo);
            const long long pa = outputs ? prev.sb_area : prev.cb_area;
            o.require(a < pa, fmt::format("{} area not decreasing at {} sides",
                                          outputs ? "sb" : "cb", sides));
            if (rows[i].median_critical_path && rows[i - 1].median_critical_path)
                o.require(*rows[i].median_critical_path >=
                              *rows[i - 1].median_critical_path - 1.0,
                          fmt::format("median critical path drops beyond noise at {} sides",
                                      sides));
        }
        o.note(fmt::format("{} sides:area/median/successes {}", outputs ? "sb_out" : "cb",
                           fmt::join(trace, " ")));
    }
    return o;
}

// 7. Storage census ordering of the FIFO lowerings.
Outcome fifo() {
    Outcome o;
    arch::ArchSpec spec;
    spec.layers[0].reg_density = 1.0;
    const auto none = dse::arch_area(spec, dse::FifoKind::None).storage_bits;
    const auto split = dse::arch_area(spec, dse::FifoKind::Split).storage_bits;
    const auto full2 = dse::arch_area(spec, dse::FifoKind::Full2).storage_bits;
    o.require(none < split && split < full2, "storage ordering broken");
    o.require(split - none < full2 - none, "split overhead not below full2 overhead");
    o.note(fmt::format("storage bits static {} split {} (+{:.1f}%) full2 {} (+{:.1f}%)", none,
                       split, 100.0 * (split - none) / none, full2,
                       100.0 * (full2 - none) / none));
    return o;
}

// 8. A* against Dijkstra, and negotiated congestion on two nets.
Outcome router() {
    Outcome o;
    auto g = arch::create_uniform_interconnect(arch::ArchSpec{});
    pnr::NodeCost cost = [](NodeId n) { return (1 + (n.value * 2654435761u >> 7) % 8) / 4.0; };
    double per_hop = std::numeric_limits<double>::infinity();
    for (const auto &e : g.edges()) {
        const auto &a = g.node(e.src), &b = g.node(e.dst);
        if (a.x != b.x || a.y != b.y)
            per_hop = std::min(per_hop, cost(e.dst));
    }
    std::mt19937 rng(8);
    std::uniform_int_distribution<uint32_t> pick(0, static_cast<uint32_t>(g.num_nodes() - 1));
    int queries = 0, mismatches = 0;
    while (queries < 500) {
        NodeId s{pick(rng)}, t{pick(rng)};
        double ref;
        try {
            ref = pnr::dijkstra(g, {s}, t, cost).cost;
        } catch (const Error &) {
            continue;
        }
        ++queries;
        if (pnr::astar(g, {s}, t, cost, pnr::manhattan_heuristic(g, t, per_hop)).cost != ref)
            ++mismatches;
    }
    o.require(mismatches == 0, fmt::format("{} of 500 queries differ", mismatches));

    // Both nets want node m; b also has a detour of equal delay.
    ir::RoutingGraph c(3, 2);
    c.add_layer(16, 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x)
            c.set_tile(x, y, {"pe", 1.0, {"in0"}, {"out0"}});
    auto a = c.add_node(ir::IrNode::port(0, 0, "out0", 16));
    auto b = c.add_node(ir::IrNode::port(0, 1, "out0", 16));
    auto sa = c.add_node(ir::IrNode::port(2, 0, "in0", 16));
    auto sb = c.add_node(ir::IrNode::port(2, 1, "in0", 16));
    auto m = c.add_node(ir::IrNode::switch_box(1, 0, ir::Side::East, 0, ir::Io::Out, 16, 1.0));
    auto d1 = c.add_node(ir::IrNode::switch_box(1, 1, ir::Side::East, 0, ir::Io::In, 16, 1.0));
    auto d2 = c.add_node(ir::IrNode::switch_box(1, 1, ir::Side::East, 1, ir::Io::Out, 16, 0.0));
    for (auto [x, y] : std::vector<std::pair<NodeId, NodeId>>{
             {a, m}, {b, m}, {m, sa}, {m, sb}, {b, d1}, {d1, d2}, {d2, sb}})
        c.add_edge(x, y);
    auto p = pnr::pack(pnr::parse_app("inst a pe\ninst b pe\ninst c pe\ninst d pe\n"
                                      "net a.out0 -> c.in0\nnet b.out0 -> d.in0\n"));
    pnr::Placement pl;
    pl.loc = {{"a", {0, 0}}, {"b", {0, 1}}, {"c", {2, 0}}, {"d", {2, 1}}};
    try {
        auto r = pnr::route(c, p, pl);
        o.require(r.iterations <= 5 && r.overuse.back() == 0,
                  fmt::format("congestion case took {} iterations", r.iterations));
        o.note(fmt::format("500 queries exact; congestion resolved in {} iterations",
                           r.iterations));
    } catch (const Error &e) {
        o.require(false, fmt::format("congestion case failed: {}", e.what()));
    }
    return o;
}

// 9. Placement numerics.
Outcome placement() {
    Outcome o;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> coord(0, 8);
    const double h = 1e-5;
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<pnr::Point> pins(2 + rng() % 6);
        for (auto &q : pins)
            q = {coord(rng), coord(rng)};
        const double tau = std::vector<double>{2.0, 1.0, 0.5, 0.25}[rng() % 4];
        auto s = pnr::smooth_hpwl(pins, tau);
        for (size_t i = 0; i < pins.size(); ++i)
            for (int axis = 0; axis < 2; ++axis) {
                auto plus = pins, minus = pins;
                plus[i][static_cast<size_t>(axis)] += h;
                minus[i][static_cast<size_t>(axis)] -= h;
                const double fd = (pnr::smooth_hpwl(plus, tau).value -
                                   pnr::smooth_hpwl(minus, tau).value) /
                                  (2 * h);
                worst = std::max(worst, std::abs(s.grad[i][static_cast<size_t>(axis)] - fd) /
                                            std::max(1.0, std::abs(fd)));
            }
    }
    o.require(worst <= 1e-5, fmt::format("gradient error {:.2e}", worst));

    auto g = arch::create_uniform_interconnect(arch::ArchSpec{});
    auto sites = pnr::SiteMap::from_graph(g);
    auto packed = pnr::pack(
        pnr::parse_app(text::read_file(kRoot / "benchmarks" / "stencil.app")));
    auto anchors = pnr::assign_io(packed, sites);
    auto gp = pnr::global_place(packed, sites, anchors, {}, 3);
    bool monotone = true;
    for (const auto &trace : gp.stage_traces)
        for (size_t i = 1; i < trace.size(); ++i)
            monotone = monotone && trace[i] <= trace[i - 1];
    o.require(monotone, "CG objective increased");

    auto legal = pnr::legalize(gp, packed, sites, anchors);
    pnr::SaParams cold;
    cold.t0 = 0.0;
    cold.seed = 4;
    auto r = pnr::detailed_place(legal, packed, sites, cold);
    o.require(r.worsening_accepted == 0, "SA at T=0 accepted a worsening move");

    pnr::SiteMap row(5, 1, std::vector<std::string>(5, "pe"));
    auto three = pnr::pack(pnr::parse_app(
        "inst a pe\ninst b pe\ninst c pe\nnet a.out0 -> b.in0\nnet b.out0 -> c.in0\n"));
    double best = std::numeric_limits<double>::infinity();
    for (int xa = 0; xa < 5; ++xa)
        for (int xb = 0; xb < 5; ++xb)
            for (int xc = 0; xc < 5; ++xc) {
                if (xa == xb || xb == xc || xa == xc)
                    continue;
                pnr::Placement q;
                q.loc = {{"a", {xa, 0}}, {"b", {xb, 0}}, {"c", {xc, 0}}};
                best = std::min(best, pnr::total_eq2_cost(three, q, 1, 1));
            }
    pnr::Placement start;
    start.loc = {{"a", {0, 0}}, {"b", {4, 0}}, {"c", {2, 0}}};
    auto annealed = pnr::detailed_place(start, three, row, {});
    o.require(annealed.final_cost == best, fmt::format("row example cost {} vs optimum {}",
                                                       annealed.final_cost, best));
    o.note(fmt::format("max gradient error {:.1e}; row optimum {}", worst, best));
    return o;
}

// 10. Pass-through cost examples.
Outcome eq2() {
    Outcome o;
    o.require(pnr::eq2_cost(7, 1, 3, 2) == 16, "eq2_cost(7, 1, 3, 2) != 16");
    for (double hp : {0.0, 3.0, 11.0})
        o.require(pnr::eq2_cost(hp, 0, 5, 1) == hp, "gamma 0, alpha 1 is not HPWL");
    o.require(pnr::eq2_cost(2, 1, 5, 2) == 0, "no clamp at 0");
    o.require(pnr::eq2_cost(2, 1, 5, 1) == 0, "no clamp at 0 for alpha 1");
    return o;
}

// 11. Bitstream round trip and repeatability on every benchmark.
Outcome bitstream() {
    Outcome o;
    auto g = arch::create_uniform_interconnect(arch::ArchSpec{});
    auto n = rtl::lower_static(g);
    size_t selects = 0;
    for (const auto &b : benchmarks()) {
        std::string first;
        for (int rep = 0; rep < 2; ++rep) {
            dse::PnrOptions opt;
            opt.seed = 7;
            auto r = dse::run_pnr(g, b.app, opt);
            auto bits = sim::generate_bitstream(g, n.config, r.route.routes, r.packed,
                                                r.placement);
            auto fabric = sim::configure(g, n.config, bits);
            for (const auto &[node, sel] : sim::tree_selections(g, r.route.routes)) {
                ++selects;
                if (fabric.select.at(node) != sel) {
                    o.require(false, fmt::format("{}: select mismatch at {}", b.name,
                                                 ir::node_name(g.node(node))));
                    break;
                }
            }
            const auto text = sim::format_bitstream(bits);
            if (rep == 0)
                first = text;
            else
                o.require(text == first, fmt::format("{}: bitstream differs on rerun", b.name));
        }
    }
    o.note(fmt::format("{} benchmarks, {} selects checked", kBenchmarks.size(), selects));
    return o;
}

// 12. Best-of-alpha-sweep never loses to alpha = 1.
Outcome alpha() {
    Outcome o;
    auto g = arch::create_uniform_interconnect(arch::ArchSpec{});
    std::vector<double> alphas;
    for (int a = 1; a <= 20; ++a)
        alphas.push_back(a);
    std::vector<std::string> trace;
    for (const auto &b : benchmarks()) {
        dse::PnrOptions one;
        one.seed = 2;
        auto base = dse::run_pnr(g, b.app, one);
        auto sweep = one;
        sweep.alphas = alphas;
        auto best = dse::run_pnr(g, b.app, sweep);
        const double cp1 = base.route.timing.critical_path;
        const double cpb = best.route.timing.critical_path;
        o.require(cpb <= cp1, fmt::format("{}: sweep {} > alpha=1 {}", b.name, cpb, cp1));
        trace.push_back(fmt::format("{} {}->{}", b.name, text::format_number(cp1),
                                    text::format_number(cpb)));
    }
    o.note(fmt::format("{}", fmt::join(trace, ", ")));
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"structural verification", structural},
        {"exhaustive connection sweep", sweep},
        {"ready-join equivalence", ready_join},
        {"routability gap", routability},
        {"track-count trend", tracks},
        {"port-connection trend", ports},
        {"FIFO storage ordering", fifo},
        {"router oracle", router},
        {"placement numerics", placement},
        {"pass-through cost", eq2},
        {"bitstream round trip", bitstream},
        {"alpha sweep", alpha},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o.pass = false;
            o.detail = fmt::format("exception: {}", e.what());
        }
        failed += o.pass ? 0 : 1;
        fmt::print("criterion {:2} {:<28} {}  {}\n", i + 1, criteria[i].first,
                   o.pass ? "PASS" : "FAIL", o.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<size_t>(failed),
               criteria.size());
    return failed ? 1 : 0;
}
