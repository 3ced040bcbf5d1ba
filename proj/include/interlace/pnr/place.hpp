#pragma once

#include "interlace/ir/graph.hpp"
#include "interlace/pnr/app.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace interlace::pnr {

using Cell = std::pair<int, int>; // (x, y)

// Which core each tile offers ("pe", "mem", "io"; empty for none).
class SiteMap {
public:
    SiteMap() = default;
    SiteMap(int width, int height, std::vector<std::string> cores);
    static SiteMap from_graph(const ir::RoutingGraph &g);

    int width() const { return width_; }
    int height() const { return height_; }
    const std::string &core(int x, int y) const;
    bool in_bounds(int x, int y) const;

    std::vector<Cell> sites(const std::string &core) const; // raster order
    std::vector<int> columns_with(const std::string &core) const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::string> cores_; // row-major
};

// Core type an instance of `kind` occupies. A register left on the fabric
// after packing sits on a PE as a registered pass-through.
std::string site_type(InstKind k);

struct Placement {
    std::map<std::string, Cell> loc;
    bool legal = false;

    const Cell &at(const std::string &inst) const; // throws UnplacedPin
};

bool is_legal(const Placement &p, const PackedGraph &g, const SiteMap &sites);

// Pin cells of a net: source first, then sinks.
std::vector<Cell> net_cells(const AppNet &net, const Placement &p);

long long hpwl(const std::vector<Cell> &pins);
long long hpwl(const AppNet &net, const Placement &p);

using Point = std::array<double, 2>;

// L2 combination of log-sum-exp smoothed spans with temperature tau. Each
// span is corrected by -2 tau ln n so that coincident pins give 0; delta
// keeps the square root differentiable at zero.
struct SmoothHpwl {
    double value = 0;
    std::vector<Point> grad; // d value / d pin
};

inline constexpr double kSmoothDelta = 1e-4;

SmoothHpwl smooth_hpwl(const std::vector<Point> &pins, double tau);

struct CgParams {
    int max_iters = 200;            // per smoothing stage
    double grad_tol = 1e-6;
    std::vector<double> taus{2.0, 1.0, 0.5, 0.25};
    double mem_weight = 1.0;         // MEM column potential
    double center_weight = 1e-3;     // pull used when nothing is anchored
};

struct GlobalPlacement {
    std::map<std::string, Point> pos;
    // Objective after every accepted CG step, one sequence per tau stage.
    std::vector<std::vector<double>> stage_traces;
    bool anchored = true;
};

// IO instances go to boundary IO sites: an explicit x=/y= attribute wins,
// otherwise they are spread evenly around the perimeter ring.
Placement assign_io(const PackedGraph &g, const SiteMap &sites);

GlobalPlacement global_place(const PackedGraph &g, const SiteMap &sites,
                             const Placement &anchors, const CgParams &params = {},
                             uint64_t seed = 1);

// Snaps each instance (name order) to the free compatible site nearest its
// continuous position; ties go to smaller y, then smaller x. Anchored
// instances keep their site. Throws InsufficientCapacity.
Placement legalize(const GlobalPlacement &gp, const PackedGraph &g, const SiteMap &sites,
                   const Placement &anchors = {});

// (max(hpwl - gamma * overlap, 0))^alpha
double eq2_cost(double hpwl, double gamma, double overlap, double alpha);

// Overlap counts cells inside the net's bounding box that hold a placed
// instance, excluding the net's own pin cells.
long long eq2_overlap(const AppNet &net, const Placement &p,
                      const std::map<Cell, std::string> &occupied);
double eq2_net_cost(const AppNet &net, const Placement &p,
                    const std::map<Cell, std::string> &occupied, double gamma, double alpha);
double total_eq2_cost(const PackedGraph &g, const Placement &p, double gamma, double alpha);

struct SaParams {
    double gamma = 1.0;
    double alpha = 1.0;
    uint64_t seed = 1;
    std::optional<double> t0;       // unset: calibrate to ~80% initial acceptance
    double decay = 0.95;
    int moves_per_instance = 10;    // moves per sweep = this * #movable
    double stop_acceptance = 0.01;
    double min_temperature = 1e-6;
    int max_sweeps = 150;
    bool record_trace = false;
};

struct SaResult {
    Placement placement;
    double initial_cost = 0;
    double final_cost = 0;
    double t0 = 0;
    long long accepted = 0;
    long long worsening_accepted = 0;
    int sweeps = 0;
    std::vector<double> trace; // cost after each accepted move
};

SaResult detailed_place(const Placement &legal, const PackedGraph &g, const SiteMap &sites,
                        const SaParams &params);

struct PlaceParams {
    CgParams cg;
    SaParams sa;
};

// assign_io + global_place + legalize + detailed_place.
SaResult place(const PackedGraph &g, const SiteMap &sites, const PlaceParams &params);

// Returns the post-route critical path, or nullopt when routing failed.
using RouteEval = std::function<std::optional<double>(const Placement &)>;

struct SweepPoint {
    double alpha;
    std::optional<double> critical_path;
};

struct SweepResult {
    Placement placement;
    double alpha = 1;
    double critical_path = 0;
    std::vector<SweepPoint> points;
};

// detailed_place + route for each alpha; keeps the smallest critical path
// (first alpha on ties). Throws AllFailed when no alpha routes.
SweepResult alpha_sweep(const Placement &legal, const PackedGraph &g, const SiteMap &sites,
                        const RouteEval &route, const std::vector<double> &alphas,
                        const SaParams &base);

std::string format_placement(const Placement &p);
Placement parse_placement(std::string_view text);

} // namespace interlace::pnr
