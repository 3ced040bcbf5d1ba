#include "interlace/arch/spec.hpp"
#include "interlace/dse/dse.hpp"
#include "interlace/dse/pipeline.hpp"
#include "interlace/error.hpp"
#include "interlace/ir/graph.hpp"
#include "interlace/pnr/app.hpp"
#include "interlace/pnr/place.hpp"
#include "interlace/pnr/route.hpp"
#include "interlace/rtl/netlist.hpp"
#include "interlace/rtl/verify.hpp"
#include "interlace/rtl/verilog.hpp"
#include "interlace/sim/bitstream.hpp"
#include "interlace/sim/simulate.hpp"
#include "interlace/util/text.hpp"

#include "CLI11.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>

using namespace interlace;
namespace fs = std::filesystem;

namespace {

// A file-level failure: the path is prepended to parse locations.
struct FileError : std::runtime_error {
    FileError(const std::string &what, int code) : std::runtime_error(what), code(code) {}
    int code;
};

template <typename F> auto load(const std::string &path, F parse) {
    try {
        return parse(text::read_file(path));
    } catch (const Error &e) {
        throw FileError(fmt::format("{}:{}", path, e.what()), dse::exit_code(e.code()));
    }
}

void emit(const fs::path &dir, const std::string &name, std::string_view content) {
    fs::create_directories(dir);
    text::write_file(dir / name, content);
    spdlog::info("wrote {}", (dir / name).string());
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("interlace");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char *env = std::getenv("INTERLACE_LOG"))
        spdlog::set_level(spdlog::level::from_str(env));
}

struct ArchOverrides {
    std::optional<int> width, height, tracks, sb_out_sides, cb_sides;
    std::optional<std::string> topology;
    std::optional<double> reg_density;

    void add(CLI::App *cmd) {
        cmd->add_option("--width", width, "Array width");
        cmd->add_option("--height", height, "Array height");
        cmd->add_option("--tracks", tracks, "Tracks per layer");
        cmd->add_option("--topology", topology, "wilton or disjoint")
            ->check(CLI::IsMember({"wilton", "disjoint"}));
        cmd->add_option("--reg-density", reg_density, "Registered track fraction")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--sb-out-sides", sb_out_sides, "Sides a core output drives")
            ->check(CLI::Range(1, 4));
        cmd->add_option("--cb-sides", cb_sides, "Sides a core input reads")
            ->check(CLI::Range(1, 4));
    }

    void apply(arch::ArchSpec &s) const {
        if (width)
            s.width = *width;
        if (height)
            s.height = *height;
        for (auto &l : s.layers) {
            if (tracks)
                l.num_tracks = *tracks;
            if (topology)
                l.topology = *topology == "wilton" ? arch::Topology::Wilton
                                                   : arch::Topology::Disjoint;
            if (reg_density)
                l.reg_density = *reg_density;
        }
        if (sb_out_sides)
            s.policy.sb_out_sides = arch::sides_after_removal(4 - *sb_out_sides);
        if (cb_sides)
            s.policy.cb_sides = arch::sides_after_removal(4 - *cb_sides);
    }
};

dse::FifoKind fifo_of(const std::string &s) { return *dse::parse_fifo_kind(s); }

int cmd_gen(const std::string &spec_path, const ArchOverrides &ov, const std::string &fifo,
            const fs::path &out) {
    auto spec = load(spec_path, [](const std::string &t) { return arch::parse_arch_spec(t); });
    ov.apply(spec);
    arch::check_spec(spec);
    auto r = dse::generate(spec, fifo_of(fifo));
    emit(out, "graph.txt", ir::serialize_graph(r.graph));
    emit(out, "fabric.v", rtl::emit_rtl(r.netlist));
    emit(out, "config.map", rtl::format_config_map(r.netlist.config));
    std::string report = rtl::format_report(r.structure);
    if (r.valid_mirror)
        report += rtl::format_report(*r.valid_mirror);
    emit(out, "verify.txt", report);
    std::cout << report;
    fmt::print("nodes {} edges {} config_fields {}\n", r.graph.num_nodes(),
               r.graph.edges().size(), r.netlist.config.size());
    return r.pass() ? dse::kExitOk : dse::kExitStructure;
}

int cmd_pnr(const std::string &graph_path, const std::string &app_path, uint64_t seed,
            const std::vector<double> &alphas, int max_iterations, const fs::path &out) {
    auto g = load(graph_path, [](const std::string &t) { return ir::deserialize_graph(t); });
    auto app = load(app_path, [](const std::string &t) { return pnr::parse_app(t); });
    dse::PnrOptions o;
    o.seed = seed;
    o.alphas = alphas;
    o.route.max_iterations = max_iterations;
    auto r = dse::run_pnr(g, app, o);
    emit(out, "placement.txt", pnr::format_placement(r.placement));
    emit(out, "routes.txt", pnr::format_routes(r.route.routes));
    const auto timing = dse::format_timing_report(g, r);
    emit(out, "timing.txt", timing);
    fmt::print("critical_path {}\nroute_iterations {}\n",
               text::format_number(r.route.timing.critical_path), r.route.iterations);
    return dse::kExitOk;
}

int cmd_bitstream(const std::string &graph_path, const std::string &map_path,
                  const std::string &app_path, const std::string &placement_path,
                  const std::string &routes_path, bool defaults, const fs::path &out) {
    auto g = load(graph_path, [](const std::string &t) { return ir::deserialize_graph(t); });
    auto map = load(map_path, [](const std::string &t) { return rtl::parse_config_map(t); });
    auto app = load(app_path, [](const std::string &t) { return pnr::parse_app(t); });
    auto pl = load(placement_path, [](const std::string &t) { return pnr::parse_placement(t); });
    auto routes = load(routes_path, [](const std::string &t) { return pnr::parse_routes(t); });
    auto packed = pnr::pack(app);
    sim::BitstreamOptions o;
    o.include_defaults = defaults;
    auto b = sim::generate_bitstream(g, map, routes, packed, pl, o);
    emit(out, "bitstream.txt", sim::format_bitstream(b));
    fmt::print("words {}\n", b.size());
    return dse::kExitOk;
}

int cmd_sim(const std::string &graph_path, const std::string &map_path,
            const std::string &bits_path, const std::string &app_path,
            const std::string &placement_path, const std::string &routes_path,
            const fs::path &out) {
    auto g = load(graph_path, [](const std::string &t) { return ir::deserialize_graph(t); });
    auto map = load(map_path, [](const std::string &t) { return rtl::parse_config_map(t); });
    auto bits = load(bits_path, [](const std::string &t) { return sim::parse_bitstream(t); });
    auto app = load(app_path, [](const std::string &t) { return pnr::parse_app(t); });
    auto pl = load(placement_path, [](const std::string &t) { return pnr::parse_placement(t); });
    auto fabric = sim::configure(g, map, bits);
    auto packed = pnr::pack(app);
    std::map<ir::NodeId, uint64_t> stim;
    auto terms = pnr::net_terminals(g, packed, pl);
    for (size_t i = 0; i < terms.size(); ++i)
        stim[terms[i].source] = i + 1;
    auto arrivals = sim::functional_sim(fabric, stim);
    std::string report;
    int bad = 0;
    for (size_t i = 0; i < terms.size(); ++i)
        for (size_t k = 0; k < terms[i].sinks.size(); ++k) {
            auto it = arrivals.find(terms[i].sinks[k]);
            const bool ok = it != arrivals.end() && it->second.token == i + 1;
            bad += ok ? 0 : 1;
            report += fmt::format("{} {} -> {}", ok ? "ok" : "FAIL", terms[i].net,
                                  pnr::to_string(terms[i].sink_pins[k]));
            if (ok)
                report += fmt::format(" ticks {}", it->second.tick);
            report += '\n';
        }
    // The routes file, when given, must also be what the bitstream encodes.
    if (!routes_path.empty()) {
        auto routes =
            load(routes_path, [](const std::string &t) { return pnr::parse_routes(t); });
        for (const auto &[node, sel] : sim::tree_selections(g, routes))
            if (fabric.select.at(node) != sel) {
                ++bad;
                report += fmt::format("FAIL select {} is {}, route needs {}\n",
                                      ir::node_name(g.node(node)), fabric.select.at(node), sel);
            }
    }
    report += fmt::format("sim: {} failures\n", bad);
    emit(out, "sim.txt", report);
    std::cout << report;
    return bad ? dse::kExitStructure : dse::kExitOk;
}

int cmd_verify(const std::string &graph_path, const std::string &rtl_path,
               const std::string &map_path, bool sweep, const fs::path &out) {
    auto g = load(graph_path, [](const std::string &t) { return ir::deserialize_graph(t); });
    auto n = load(rtl_path, [](const std::string &t) { return rtl::parse_rtl(t); });
    auto structure = rtl::verify_structure(g, n);
    std::string report = rtl::format_report(structure);
    bool pass = structure.pass();
    if (sweep) {
        auto sidecar =
            map_path.empty()
                ? rtl::extract_config_map(n)
                : load(map_path, [](const std::string &t) { return rtl::parse_config_map(t); });
        auto r = sim::exhaustive_sweep(g, sidecar, rtl::extract_config_map(n));
        report += sim::format_sweep_report(g, r);
        pass = pass && r.pass();
    }
    emit(out, "verify.txt", report);
    std::cout << report;
    return pass ? dse::kExitOk : dse::kExitStructure;
}

int cmd_dse(const std::string &sweep_path, int jobs, bool no_time, const fs::path &out) {
    auto sweep = load(sweep_path, [&](const std::string &t) {
        return dse::parse_sweep_spec(t, fs::path(sweep_path).parent_path().string());
    });
    dse::DseOptions o;
    o.jobs = jobs;
    o.record_time = !no_time;
    o.on_point = [](const dse::DsePoint &p) {
        spdlog::info("{} tracks={} sb={} cb={} fifo={} seed={}: {}", p.benchmark, p.knobs.tracks,
                     p.knobs.sb_out_sides, p.knobs.cb_sides, dse::fifo_kind_name(p.knobs.fifo),
                     p.seed, p.success ? "ok" : p.failure);
    };
    auto points = dse::run_dse(sweep, o);
    emit(out, "dse.csv", dse::format_points_csv(points));
    const auto summary = dse::format_summary_csv(dse::summarize(points));
    emit(out, "summary.csv", summary);
    std::cout << summary;
    return dse::kExitOk;
}

int cmd_report(const std::string &csv_path) {
    auto points = load(csv_path, [](const std::string &t) { return dse::parse_points_csv(t); });
    std::cout << dse::format_summary_csv(dse::summarize(points));
    return dse::kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    setup_logging();
    CLI::App app{"Interconnect generator, place-and-route and bitstream tool"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_dir = ".";
    app.add_option("--out-dir", out_dir, "Directory for written artifacts");

    auto *gen = app.add_subcommand("gen", "Generate IR graph, RTL and config map from a spec");
    std::string spec_path, fifo = "none";
    ArchOverrides ov;
    gen->add_option("spec", spec_path, "Architecture spec file")->required();
    gen->add_option("--fifo", fifo, "none (static), full2 or split (ready-valid)")
        ->check(CLI::IsMember({"none", "full2", "split"}));
    ov.add(gen);

    auto *pnr = app.add_subcommand("pnr", "Pack, place and route an application");
    std::string graph_path, app_path;
    uint64_t seed = 1;
    std::vector<double> alphas{1.0};
    int max_iterations = 50;
    pnr->add_option("graph", graph_path, "IR graph file")->required();
    pnr->add_option("app", app_path, "Application netlist")->required();
    pnr->add_option("--seed", seed, "Placement seed");
    pnr->add_option("--alphas", alphas, "Pass-through weights to sweep")->delimiter(',');
    pnr->add_option("--max-iterations", max_iterations, "Router iteration limit");

    auto *bits = app.add_subcommand("bitstream", "Generate a configuration bitstream");
    std::string map_path, placement_path, routes_path;
    bool defaults = false;
    bits->add_option("graph", graph_path)->required();
    bits->add_option("map", map_path, "Config map")->required();
    bits->add_option("app", app_path)->required();
    bits->add_option("placement", placement_path)->required();
    bits->add_option("routes", routes_path)->required();
    bits->add_flag("--defaults", defaults, "Emit every configured word");

    auto *simc = app.add_subcommand("sim", "Simulate a bitstream against a placed design");
    std::string bits_path;
    simc->add_option("graph", graph_path)->required();
    simc->add_option("map", map_path)->required();
    simc->add_option("bitstream", bits_path)->required();
    simc->add_option("app", app_path)->required();
    simc->add_option("placement", placement_path)->required();
    simc->add_option("--routes", routes_path, "Also check selects against these routes");

    auto *ver = app.add_subcommand("verify", "Check RTL against the IR; optional sweep");
    std::string rtl_path;
    bool sweep = false;
    ver->add_option("graph", graph_path)->required();
    ver->add_option("rtl", rtl_path)->required();
    ver->add_option("--map", map_path, "Sidecar config map for the sweep");
    ver->add_flag("--sweep", sweep, "Run the exhaustive per-edge configuration sweep");

    auto *dsec = app.add_subcommand("dse", "Run a design-space sweep and write CSV");
    std::string sweep_path;
    int jobs = 1;
    bool no_time = false;
    dsec->add_option("sweep", sweep_path, "Sweep spec")->required();
    dsec->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    dsec->add_flag("--no-time", no_time, "Leave wall-time columns blank");

    auto *rep = app.add_subcommand("report", "Summarize a DSE points CSV");
    std::string csv_path;
    rep->add_option("csv", csv_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : dse::kExitUsage;
    }

    try {
        const fs::path out(out_dir);
        if (*gen)
            return cmd_gen(spec_path, ov, fifo, out);
        if (*pnr)
            return cmd_pnr(graph_path, app_path, seed, alphas, max_iterations, out);
        if (*bits)
            return cmd_bitstream(graph_path, map_path, app_path, placement_path, routes_path,
                                 defaults, out);
        if (*simc)
            return cmd_sim(graph_path, map_path, bits_path, app_path, placement_path,
                           routes_path, out);
        if (*ver)
            return cmd_verify(graph_path, rtl_path, map_path, sweep, out);
        if (*dsec)
            return cmd_dse(sweep_path, jobs, no_time, out);
        if (*rep)
            return cmd_report(csv_path);
    } catch (const FileError &e) {
        spdlog::error("{}", e.what());
        return e.code;
    } catch (const RoutingFailed &e) {
        spdlog::error("routing failed after {} iterations ({} overused nodes)", e.iterations(),
                      e.remaining_overuse());
        return dse::kExitRouting;
    } catch (const Error &e) {
        spdlog::error("{}: {}", to_string(e.code()), e.what());
        return dse::exit_code(e.code());
    }
    return dse::kExitUsage;
}
