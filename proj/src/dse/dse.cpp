#include "interlace/dse/dse.hpp"

#include "interlace/arch/builder.hpp"
#include "interlace/util/text.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include <fmt/format.h>

namespace interlace::dse {

arch::ArchSpec apply_knobs(const arch::ArchSpec &base, const Knobs &k) {
    auto spec = base;
    for (auto &layer : spec.layers) {
        layer.topology = k.topology;
        layer.num_tracks = k.tracks;
        layer.reg_density = k.reg_density;
    }
    spec.policy.sb_out_sides = arch::sides_after_removal(4 - k.sb_out_sides);
    spec.policy.cb_sides = arch::sides_after_removal(4 - k.cb_sides);
    return spec;
}

ArchArea arch_area(const arch::ArchSpec &spec, FifoKind fifo) {
    auto g = arch::create_uniform_interconnect(spec);
    auto m = rtl::area_proxy(lower(g, fifo));
    return {m.sb.gate_estimate, m.cb.gate_estimate, m.mux_input_count,
            m.config_bits,      m.storage_bits,     m.gate_count_estimate};
}

std::vector<Knobs> SweepSpec::grid() const {
    std::vector<Knobs> out;
    for (auto topo : topologies)
        for (int t : tracks)
            for (int sb : sb_out_sides)
                for (int cb : cb_sides)
                    for (auto f : fifos)
                        for (double r : reg_densities)
                            out.push_back({topo, t, sb, cb, f, r});
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SweepSpec parse_sweep_spec(std::string_view src, const std::string &base_dir) {
    SweepSpec s;
    std::optional<int> width, height;
    int line_no = 0;
    size_t pos = 0;
    const std::filesystem::path dir(base_dir);
    while (pos < src.size()) {
        auto nl = src.find('\n', pos);
        auto line = src.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                 : nl - pos);
        pos = nl == std::string_view::npos ? src.size() : nl + 1;
        ++line_no;
        for (const auto &tok : text::tokenize(line)) {
            auto kv = text::split_key_value(tok.text);
            if (!kv)
                throw ParseError(fmt::format("expected key=value, got '{}'", tok.text), line_no,
                                 tok.column);
            auto [key, value] = *kv;
            const int col = tok.column + static_cast<int>(key.size()) + 1;
            auto items = text::split(value, ',');
            if (items.empty() || std::any_of(items.begin(), items.end(),
                                             [](auto v) { return v.empty(); }))
                throw ParseError(fmt::format("empty list for '{}'", key), line_no, col);
            auto ints = [&] {
                std::vector<int> v;
                for (auto i : items)
                    v.push_back(static_cast<int>(text::parse_int(i, line_no, col)));
                return v;
            };
            auto doubles = [&] {
                std::vector<double> v;
                for (auto i : items)
                    v.push_back(text::parse_double(i, line_no, col));
                return v;
            };
            if (key == "spec") {
                s.base = arch::parse_arch_spec(text::read_file(dir / std::string(value)));
            } else if (key == "width") {
                width = static_cast<int>(text::parse_int(value, line_no, col));
            } else if (key == "height") {
                height = static_cast<int>(text::parse_int(value, line_no, col));
            } else if (key == "topology") {
                s.topologies.clear();
                for (auto i : items) {
                    if (i == "wilton")
                        s.topologies.push_back(arch::Topology::Wilton);
                    else if (i == "disjoint")
                        s.topologies.push_back(arch::Topology::Disjoint);
                    else
                        throw ParseError(fmt::format("unknown topology '{}'", i), line_no, col);
                }
            } else if (key == "tracks") {
                s.tracks = ints();
            } else if (key == "sb_out_sides") {
                s.sb_out_sides = ints();
            } else if (key == "cb_sides") {
                s.cb_sides = ints();
            } else if (key == "fifo") {
                s.fifos.clear();
                for (auto i : items) {
                    auto f = parse_fifo_kind(i);
                    if (!f)
                        throw ParseError(fmt::format("unknown fifo mode '{}'", i), line_no, col);
                    s.fifos.push_back(*f);
                }
            } else if (key == "reg_density") {
                s.reg_densities = doubles();
            } else if (key == "seeds") {
                s.seeds.clear();
                for (auto i : items)
                    s.seeds.push_back(static_cast<uint64_t>(text::parse_int(i, line_no, col)));
            } else if (key == "alphas") {
                s.alphas = doubles();
            } else if (key == "benchmarks") {
                for (auto i : items) {
                    const auto path = dir / std::string(i);
                    s.benchmarks.push_back(
                        {path.stem().string(), pnr::parse_app(text::read_file(path))});
                }
            } else {
                throw ParseError(fmt::format("unknown key '{}'", key), line_no, tok.column);
            }
        }
    }
    if (width)
        s.base.width = *width;
    if (height)
        s.base.height = *height;
    for (int v : s.sb_out_sides)
        if (v < 1 || v > 4)
            throw Error(Errc::InvalidSpec, "sb_out_sides must be in 1..4");
    for (int v : s.cb_sides)
        if (v < 1 || v > 4)
            throw Error(Errc::InvalidSpec, "cb_sides must be in 1..4");
    if (s.benchmarks.empty())
        throw Error(Errc::InvalidSpec, "sweep lists no benchmarks");
    return s;
}

std::vector<DsePoint> run_dse(const SweepSpec &sweep, const DseOptions &options) {
    const auto grid = sweep.grid();
    if (grid.empty() || sweep.seeds.empty() || sweep.benchmarks.empty())
        throw Error(Errc::InvalidSpec, "sweep grid is empty");

    struct Job {
        size_t cell;
        size_t bench;
        uint64_t seed;
    };
    std::vector<Job> jobs;
    for (size_t c = 0; c < grid.size(); ++c)
        for (size_t b = 0; b < sweep.benchmarks.size(); ++b)
            for (auto seed : sweep.seeds)
                jobs.push_back({c, b, seed});

    // Per-cell fabric and area, built once and shared read-only.
    struct Cell {
        ir::RoutingGraph graph;
        std::optional<ArchArea> area;
        std::string failure;
    };
    std::vector<std::optional<Cell>> cells(grid.size());
    std::vector<DsePoint> points(jobs.size());
    std::mutex lock;

    auto pool = [&](size_t count, const std::function<void(size_t)> &work) {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (size_t i = next++; i < count; i = next++)
                work(i);
        };
        const int n = std::max(1, std::min<int>(options.jobs, static_cast<int>(count)));
        std::vector<std::thread> threads;
        for (int t = 1; t < n; ++t)
            threads.emplace_back(worker);
        worker();
        for (auto &t : threads)
            t.join();
    };

    pool(grid.size(), [&](size_t c) {
        const auto spec = apply_knobs(sweep.base, grid[c]);
        try {
            auto g = arch::create_uniform_interconnect(spec);
            auto m = rtl::area_proxy(lower(g, grid[c].fifo));
            cells[c] = Cell{std::move(g),
                            ArchArea{m.sb.gate_estimate, m.cb.gate_estimate, m.mux_input_count,
                                     m.config_bits, m.storage_bits, m.gate_count_estimate},
                            ""};
        } catch (const Error &e) {
            cells[c] = Cell{ir::RoutingGraph(1, 1), std::nullopt, std::string(to_string(e.code()))};
        }
    });

    // Barrier above: every fabric exists before any PnR job starts.
    pool(jobs.size(), [&](size_t j) {
        const auto &job = jobs[j];
        const auto &cell = *cells[job.cell];
        DsePoint p;
        p.knobs = grid[job.cell];
        p.benchmark = sweep.benchmarks[job.bench].name;
        p.seed = job.seed;
        if (!cell.failure.empty()) {
            p.failure = cell.failure;
        } else {
            PnrOptions o;
            o.seed = job.seed;
            o.alphas = sweep.alphas;
            const auto start = std::chrono::steady_clock::now();
            try {
                auto r = run_pnr(cell.graph, sweep.benchmarks[job.bench].app, o);
                const auto end = std::chrono::steady_clock::now();
                p.success = true;
                p.critical_path = r.route.timing.critical_path;
                p.route_iterations = r.route.iterations;
                long long wl = 0;
                for (const auto &[net, tree] : r.route.routes)
                    wl += pnr::routed_wirelength(cell.graph, tree);
                p.wirelength = wl;
                p.area = cell.area;
                if (options.record_time)
                    p.pnr_ms =
                        std::chrono::duration<double, std::milli>(end - start).count();
            } catch (const Error &e) {
                p.failure = std::string(to_string(e.code()));
            }
        }
        std::lock_guard guard(lock);
        points[j] = p;
        if (options.on_point)
            options.on_point(points[j]);
    });

    std::sort(points.begin(), points.end(),
              [](const DsePoint &a, const DsePoint &b) { return a.key() < b.key(); });
    return points;
}

namespace {

constexpr std::string_view kPointHeader =
    "schema_version,topology,tracks,sb_out_sides,cb_sides,fifo,reg_density,benchmark,seed,"
    "success,failure,critical_path,route_iterations,wirelength,sb_area,cb_area,mux_inputs,"
    "config_bits,storage_bits,gate_estimate,pnr_ms";

constexpr std::string_view kSummaryHeader =
    "schema_version,topology,tracks,sb_out_sides,cb_sides,fifo,reg_density,runs,successes,"
    "success_rate,median_critical_path,sb_area,cb_area,mux_inputs,config_bits,storage_bits,"
    "gate_estimate,median_pnr_ms";

template <typename T> std::string opt(const std::optional<T> &v) {
    if (!v)
        return "";
    if constexpr (std::is_floating_point_v<T>)
        return text::format_number(*v);
    else
        return fmt::format("{}", *v);
}

std::string knob_columns(const Knobs &k) {
    return fmt::format("{},{},{},{},{},{}", arch::topology_name(k.topology), k.tracks,
                       k.sb_out_sides, k.cb_sides, fifo_kind_name(k.fifo),
                       text::format_number(k.reg_density));
}

std::string area_columns(const std::optional<ArchArea> &a) {
    if (!a)
        return ",,,,,";
    return fmt::format("{},{},{},{},{},{}", a->sb_area, a->cb_area, a->mux_inputs,
                       a->config_bits, a->storage_bits, a->gate_estimate);
}

} // namespace

std::string format_points_csv(const std::vector<DsePoint> &points) {
    std::string out(kPointHeader);
    out += '\n';
    for (const auto &p : points)
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", kSchemaVersion,
                           knob_columns(p.knobs), p.benchmark, p.seed, p.success ? 1 : 0,
                           p.failure, opt(p.critical_path), opt(p.route_iterations),
                           opt(p.wirelength), area_columns(p.area), opt(p.pnr_ms));
    return out;
}

std::vector<DsePoint> parse_points_csv(std::string_view src) {
    std::vector<DsePoint> out;
    int line_no = 0;
    size_t pos = 0;
    while (pos < src.size()) {
        auto nl = src.find('\n', pos);
        auto line = src.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                 : nl - pos);
        pos = nl == std::string_view::npos ? src.size() : nl + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != kPointHeader)
                throw ParseError("unexpected CSV header", 1, 1);
            continue;
        }
        if (line.empty())
            continue;
        auto f = text::split(line, ',');
        if (f.size() != 21)
            throw ParseError(fmt::format("expected 21 columns, got {}", f.size()), line_no, 1);
        int col = 0;
        auto next = [&] { return f[static_cast<size_t>(col++)]; };
        auto integer = [&](std::string_view s) { return text::parse_int(s, line_no, col); };
        auto real = [&](std::string_view s) { return text::parse_double(s, line_no, col); };
        if (integer(next()) != kSchemaVersion)
            throw ParseError("unsupported schema version", line_no, 1);
        DsePoint p;
        auto topo = next();
        if (topo == "wilton")
            p.knobs.topology = arch::Topology::Wilton;
        else if (topo == "disjoint")
            p.knobs.topology = arch::Topology::Disjoint;
        else
            throw ParseError(fmt::format("unknown topology '{}'", topo), line_no, col);
        p.knobs.tracks = static_cast<int>(integer(next()));
        p.knobs.sb_out_sides = static_cast<int>(integer(next()));
        p.knobs.cb_sides = static_cast<int>(integer(next()));
        auto fifo = parse_fifo_kind(next());
        if (!fifo)
            throw ParseError("unknown fifo mode", line_no, col);
        p.knobs.fifo = *fifo;
        p.knobs.reg_density = real(next());
        p.benchmark = std::string(next());
        p.seed = static_cast<uint64_t>(integer(next()));
        p.success = integer(next()) != 0;
        p.failure = std::string(next());
        auto od = [&](std::string_view s) -> std::optional<double> {
            if (s.empty())
                return std::nullopt;
            return real(s);
        };
        auto oi = [&](std::string_view s) -> std::optional<long long> {
            if (s.empty())
                return std::nullopt;
            return integer(s);
        };
        p.critical_path = od(next());
        if (auto v = oi(next()))
            p.route_iterations = static_cast<int>(*v);
        p.wirelength = oi(next());
        std::array<std::optional<long long>, 6> a;
        for (auto &v : a)
            v = oi(next());
        if (a[0])
            p.area = ArchArea{*a[0], a[1].value_or(0), a[2].value_or(0),
                              a[3].value_or(0), a[4].value_or(0), a[5].value_or(0)};
        p.pnr_ms = od(next());
        out.push_back(p);
    }
    return out;
}

double median(std::vector<double> v) {
    if (v.empty())
        throw Error(Errc::InvalidSpec, "median of an empty set");
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

std::vector<DseSummary> summarize(const std::vector<DsePoint> &points) {
    std::map<Knobs, std::vector<const DsePoint *>> by_knobs;
    for (const auto &p : points)
        by_knobs[p.knobs].push_back(&p);
    std::vector<DseSummary> out;
    for (const auto &[k, ps] : by_knobs) {
        DseSummary s;
        s.knobs = k;
        std::vector<double> cp, ms;
        for (const auto *p : ps) {
            ++s.runs;
            if (!p->success)
                continue;
            ++s.successes;
            if (p->critical_path)
                cp.push_back(*p->critical_path);
            if (p->pnr_ms)
                ms.push_back(*p->pnr_ms);
            if (!s.area && p->area)
                s.area = p->area;
        }
        if (!cp.empty())
            s.median_critical_path = median(cp);
        if (!ms.empty())
            s.median_pnr_ms = median(ms);
        out.push_back(s);
    }
    return out;
}

std::string format_summary_csv(const std::vector<DseSummary> &rows) {
    std::string out(kSummaryHeader);
    out += '\n';
    for (const auto &s : rows)
        out += fmt::format("{},{},{},{},{},{},{},{}\n", kSchemaVersion, knob_columns(s.knobs),
                           s.runs, s.successes, text::format_number(s.success_rate()),
                           opt(s.median_critical_path), area_columns(s.area),
                           opt(s.median_pnr_ms));
    return out;
}

pnr::AppGraph synthetic_app(uint64_t seed, const SyntheticParams &params) {
    std::mt19937_64 rng(seed);
    auto pick = [&](size_t n) { return static_cast<size_t>(rng() % n); };
    pnr::AppGraph a;
    std::vector<pnr::PortRef> outs;
    for (int i = 0; i < params.inputs; ++i) {
        a.instances.push_back({fmt::format("i{:02}", i), pnr::InstKind::Io, {}});
        outs.push_back({a.instances.back().name, "out0"});
    }
    std::vector<pnr::AppInstance> cores;
    for (int i = 0; i < params.pes; ++i)
        cores.push_back({fmt::format("p{:02}", i), pnr::InstKind::Pe, {}});
    for (int i = 0; i < params.mems; ++i)
        cores.push_back({fmt::format("m{:02}", i), pnr::InstKind::Mem, {}});
    std::shuffle(cores.begin(), cores.end(), rng);
    std::map<pnr::PortRef, std::vector<pnr::PortRef>> fan;
    for (const auto &c : cores) {
        a.instances.push_back(c);
        if (!outs.empty())
            for (const auto &port : pnr::input_ports(c.kind))
                fan[outs[pick(outs.size())]].push_back({c.name, port});
        for (const auto &port : pnr::output_ports(c.kind))
            outs.push_back({c.name, port});
    }
    for (int i = 0; i < params.outputs && i < static_cast<int>(outs.size()); ++i) {
        a.instances.push_back({fmt::format("o{:02}", i), pnr::InstKind::Io, {}});
        fan[outs[outs.size() - 1 - static_cast<size_t>(i)]].push_back(
            {a.instances.back().name, "in0"});
    }
    for (auto &[src, sinks] : fan)
        a.nets.push_back({src, sinks});
    pnr::check_app(a);
    return a;
}

} // namespace interlace::dse
