#pragma once

#include "interlace/arch/spec.hpp"
#include "interlace/dse/pipeline.hpp"
#include "interlace/rtl/area.hpp"

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace interlace::dse {

// Bumped whenever a CSV column is added, removed or reinterpreted.
inline constexpr int kSchemaVersion = 1;

struct Knobs {
    arch::Topology topology = arch::Topology::Wilton;
    int tracks = 5;
    int sb_out_sides = 4;
    int cb_sides = 4;
    FifoKind fifo = FifoKind::None;
    double reg_density = 0.0;
    friend auto operator<=>(const Knobs &, const Knobs &) = default;
};

// Base spec with the knobs applied. Side counts keep East, then South, out
// first as they shrink.
arch::ArchSpec apply_knobs(const arch::ArchSpec &base, const Knobs &k);

// Area proxy of the fabric a knob tuple describes.
struct ArchArea {
    long long sb_area = 0;  // switch-box gate estimate
    long long cb_area = 0;  // connection-box gate estimate
    long long mux_inputs = 0;
    long long config_bits = 0;
    long long storage_bits = 0;
    long long gate_estimate = 0;
    friend bool operator==(const ArchArea &, const ArchArea &) = default;
};

ArchArea arch_area(const arch::ArchSpec &spec, FifoKind fifo);

struct Benchmark {
    std::string name;
    pnr::AppGraph app;
};

struct SweepSpec {
    arch::ArchSpec base;
    std::vector<arch::Topology> topologies{arch::Topology::Wilton};
    std::vector<int> tracks{5};
    std::vector<int> sb_out_sides{4};
    std::vector<int> cb_sides{4};
    std::vector<FifoKind> fifos{FifoKind::None};
    std::vector<double> reg_densities{0.0};
    std::vector<uint64_t> seeds{1};
    std::vector<double> alphas{1.0};
    std::vector<Benchmark> benchmarks;

    std::vector<Knobs> grid() const; // sorted
};

// Key = value lines; list values are comma separated. `spec` and
// `benchmarks` paths are relative to `base_dir`. Throws ParseError.
SweepSpec parse_sweep_spec(std::string_view text, const std::string &base_dir);

struct DsePoint {
    Knobs knobs;
    std::string benchmark;
    uint64_t seed = 1;
    bool success = false;
    std::string failure; // error code name on failure
    // Metrics, present only for successful runs.
    std::optional<double> critical_path;
    std::optional<int> route_iterations;
    std::optional<long long> wirelength;
    std::optional<ArchArea> area;
    std::optional<double> pnr_ms;

    auto key() const { return std::tie(knobs, benchmark, seed); }
    friend bool operator==(const DsePoint &, const DsePoint &) = default;
};

struct DseOptions {
    int jobs = 1;
    bool record_time = true; // false leaves pnr_ms blank for byte-stable output
    std::function<void(const DsePoint &)> on_point; // called under a lock
};

// One point per grid cell x benchmark x seed, sorted by knob tuple, then
// benchmark, then seed. Failures become success=0 rows.
std::vector<DsePoint> run_dse(const SweepSpec &sweep, const DseOptions &options = {});

std::string format_points_csv(const std::vector<DsePoint> &points);
std::vector<DsePoint> parse_points_csv(std::string_view text);

struct DseSummary {
    Knobs knobs;
    int runs = 0;
    int successes = 0;
    std::optional<double> median_critical_path; // over successful runs
    std::optional<ArchArea> area;
    std::optional<double> median_pnr_ms;
    double success_rate() const { return runs ? static_cast<double>(successes) / runs : 0.0; }
    friend bool operator==(const DseSummary &, const DseSummary &) = default;
};

std::vector<DseSummary> summarize(const std::vector<DsePoint> &points);
std::string format_summary_csv(const std::vector<DseSummary> &rows);

double median(std::vector<double> v);

// Seeded random dataflow netlist. Instances are created in a shuffled order
// and every input reads a random earlier output, so the graph is acyclic;
// the last outputs drive the output IOs.
struct SyntheticParams {
    int pes = 22;
    int mems = 10;
    int inputs = 14;
    int outputs = 10;
};

pnr::AppGraph synthetic_app(uint64_t seed, const SyntheticParams &params = {});

} // namespace interlace::dse
