#include "interlace/pnr/place.hpp"

#include "interlace/error.hpp"
#include "interlace/util/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <fmt/format.h>

namespace interlace::pnr {

SiteMap::SiteMap(int width, int height, std::vector<std::string> cores)
    : width_(width), height_(height), cores_(std::move(cores)) {
    if (static_cast<int>(cores_.size()) != width * height)
        throw Error(Errc::InvalidSpec, "site map size does not match its dimensions");
}

SiteMap SiteMap::from_graph(const ir::RoutingGraph &g) {
    std::vector<std::string> cores(static_cast<size_t>(g.width() * g.height()));
    for (const auto &[xy, info] : g.tiles())
        cores[static_cast<size_t>(xy.second * g.width() + xy.first)] = info.core;
    return SiteMap(g.width(), g.height(), std::move(cores));
}

const std::string &SiteMap::core(int x, int y) const {
    static const std::string none;
    if (!in_bounds(x, y))
        return none;
    return cores_[static_cast<size_t>(y * width_ + x)];
}

bool SiteMap::in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
}

std::vector<Cell> SiteMap::sites(const std::string &c) const {
    std::vector<Cell> out;
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (core(x, y) == c)
                out.push_back({x, y});
    return out;
}

std::vector<int> SiteMap::columns_with(const std::string &c) const {
    std::set<int> cols;
    for (const auto &[x, y] : sites(c))
        cols.insert(x);
    return {cols.begin(), cols.end()};
}

std::string site_type(InstKind k) {
    switch (k) {
    case InstKind::Mem: return "mem";
    case InstKind::Io: return "io";
    default: return "pe";
    }
}

const Cell &Placement::at(const std::string &inst) const {
    auto it = loc.find(inst);
    if (it == loc.end())
        throw Error(Errc::UnplacedPin, fmt::format("instance '{}' is not placed", inst));
    return it->second;
}

bool is_legal(const Placement &p, const PackedGraph &g, const SiteMap &sites) {
    std::set<Cell> used;
    for (const auto &inst : g.app.instances) {
        auto it = p.loc.find(inst.name);
        if (it == p.loc.end())
            return false;
        auto [x, y] = it->second;
        if (!sites.in_bounds(x, y) || sites.core(x, y) != site_type(inst.kind))
            return false;
        if (!used.insert(it->second).second)
            return false;
    }
    return true;
}

std::vector<Cell> net_cells(const AppNet &net, const Placement &p) {
    std::vector<Cell> out{p.at(net.source.inst)};
    for (const auto &s : net.sinks)
        out.push_back(p.at(s.inst));
    return out;
}

long long hpwl(const std::vector<Cell> &pins) {
    if (pins.empty())
        return 0;
    int x0 = pins[0].first, x1 = x0, y0 = pins[0].second, y1 = y0;
    for (const auto &[x, y] : pins) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    return (x1 - x0) + (y1 - y0);
}

long long hpwl(const AppNet &net, const Placement &p) { return hpwl(net_cells(net, p)); }

namespace {

// Smoothed span along one axis and its gradient.
double smooth_span(const std::vector<double> &v, double tau, std::vector<double> &grad) {
    const size_t n = v.size();
    grad.assign(n, 0.0);
    if (n < 2)
        return 0.0;
    const double hi = *std::max_element(v.begin(), v.end());
    const double lo = *std::min_element(v.begin(), v.end());
    double sp = 0, sn = 0;
    std::vector<double> ep(n), en(n);
    for (size_t i = 0; i < n; ++i) {
        ep[i] = std::exp((v[i] - hi) / tau);
        en[i] = std::exp((lo - v[i]) / tau);
        sp += ep[i];
        sn += en[i];
    }
    const double lse_max = hi + tau * std::log(sp);
    const double lse_min = -lo + tau * std::log(sn);
    for (size_t i = 0; i < n; ++i)
        grad[i] = ep[i] / sp - en[i] / sn;
    return lse_max + lse_min - 2.0 * tau * std::log(static_cast<double>(n));
}

} // namespace

SmoothHpwl smooth_hpwl(const std::vector<Point> &pins, double tau) {
    SmoothHpwl out;
    out.grad.assign(pins.size(), Point{0, 0});
    if (pins.size() < 2)
        return out;
    std::vector<double> xs, ys, gx, gy;
    for (const auto &p : pins) {
        xs.push_back(p[0]);
        ys.push_back(p[1]);
    }
    const double sx = smooth_span(xs, tau, gx);
    const double sy = smooth_span(ys, tau, gy);
    const double r = std::sqrt(sx * sx + sy * sy + kSmoothDelta * kSmoothDelta);
    out.value = r - kSmoothDelta;
    for (size_t i = 0; i < pins.size(); ++i)
        out.grad[i] = {sx / r * gx[i], sy / r * gy[i]};
    return out;
}

Placement assign_io(const PackedGraph &g, const SiteMap &sites) {
    Placement p;
    std::set<Cell> taken;
    std::vector<const AppInstance *> floating;
    for (const auto &inst : g.app.instances) {
        if (inst.kind != InstKind::Io)
            continue;
        auto xi = inst.attrs.find("x"), yi = inst.attrs.find("y");
        if (xi != inst.attrs.end() && yi != inst.attrs.end()) {
            Cell c{static_cast<int>(text::parse_int(xi->second, 0, 0)),
                   static_cast<int>(text::parse_int(yi->second, 0, 0))};
            if (sites.core(c.first, c.second) != "io")
                throw Error(Errc::InsufficientCapacity,
                            fmt::format("{} pinned to ({}, {}), which is not an IO site",
                                        inst.name, c.first, c.second));
            if (!taken.insert(c).second)
                throw Error(Errc::InsufficientCapacity,
                            fmt::format("{} pinned to an occupied IO site", inst.name));
            p.loc[inst.name] = c;
        } else {
            floating.push_back(&inst);
        }
    }
    // Perimeter ring, clockwise from the top-left corner.
    std::vector<Cell> ring;
    const int W = sites.width(), H = sites.height();
    auto push = [&](int x, int y) {
        Cell c{x, y};
        if (sites.core(x, y) == "io" && !taken.count(c) &&
            std::find(ring.begin(), ring.end(), c) == ring.end())
            ring.push_back(c);
    };
    for (int x = 0; x < W; ++x) push(x, 0);
    for (int y = 1; y < H; ++y) push(W - 1, y);
    for (int x = W - 2; x >= 0; --x) push(x, H - 1);
    for (int y = H - 2; y >= 1; --y) push(0, y);
    for (const auto &c : sites.sites("io")) // interior IO sites, if any
        push(c.first, c.second);
    if (floating.size() > ring.size())
        throw Error(Errc::InsufficientCapacity,
                    fmt::format("{} IO instances but {} free IO sites", floating.size(),
                                ring.size()));
    std::sort(floating.begin(), floating.end(),
              [](const AppInstance *a, const AppInstance *b) { return a->name < b->name; });
    for (size_t i = 0; i < floating.size(); ++i)
        p.loc[floating[i]->name] = ring[i * ring.size() / floating.size()];
    return p;
}

namespace {

struct Objective {
    const PackedGraph &g;
    const SiteMap &sites;
    const Placement &anchors;
    const CgParams &params;
    std::vector<std::string> movable;
    std::map<std::string, int> index;
    std::vector<int> mem_cols;
    bool anchored = true;
    double tau = 1.0;

    Point pin(const std::string &inst, const std::vector<double> &x) const {
        auto it = index.find(inst);
        if (it != index.end())
            return {x[2 * it->second], x[2 * it->second + 1]};
        const auto &c = anchors.at(inst);
        return {static_cast<double>(c.first), static_cast<double>(c.second)};
    }

    double operator()(const std::vector<double> &x, std::vector<double> *grad) const {
        if (grad)
            grad->assign(x.size(), 0.0);
        double f = 0;
        std::vector<Point> pts;
        std::vector<std::string> names;
        for (const auto &net : g.app.nets) {
            pts.clear();
            names.clear();
            names.push_back(net.source.inst);
            for (const auto &s : net.sinks)
                names.push_back(s.inst);
            for (const auto &n : names)
                pts.push_back(pin(n, x));
            auto s = smooth_hpwl(pts, tau);
            f += s.value;
            if (grad)
                for (size_t i = 0; i < names.size(); ++i)
                    if (auto it = index.find(names[i]); it != index.end()) {
                        (*grad)[2 * it->second] += s.grad[i][0];
                        (*grad)[2 * it->second + 1] += s.grad[i][1];
                    }
        }
        for (size_t i = 0; i < movable.size(); ++i) {
            const auto *inst = g.app.find(movable[i]);
            if (inst->kind == InstKind::Mem && !mem_cols.empty()) {
                const double px = x[2 * i];
                double best = mem_cols[0];
                for (int c : mem_cols)
                    if (std::abs(px - c) < std::abs(px - best))
                        best = c;
                f += params.mem_weight * (px - best) * (px - best);
                if (grad)
                    (*grad)[2 * i] += 2 * params.mem_weight * (px - best);
            }
            if (!anchored) {
                const double cx = (sites.width() - 1) / 2.0, cy = (sites.height() - 1) / 2.0;
                const double dx = x[2 * i] - cx, dy = x[2 * i + 1] - cy;
                f += params.center_weight * (dx * dx + dy * dy);
                if (grad) {
                    (*grad)[2 * i] += 2 * params.center_weight * dx;
                    (*grad)[2 * i + 1] += 2 * params.center_weight * dy;
                }
            }
        }
        return f;
    }
};

double dot(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

// Polak-Ribiere+ with periodic restarts and Armijo backtracking.
std::vector<double> conjugate_gradient(const Objective &obj, std::vector<double> x,
                                       int max_iters, double tol, std::vector<double> &trace) {
    const size_t n = x.size();
    if (n == 0)
        return x;
    std::vector<double> g, g_new, d(n), trial(n);
    double f = obj(x, &g);
    trace.push_back(f);
    for (size_t i = 0; i < n; ++i)
        d[i] = -g[i];
    double step = 1.0;
    for (int it = 0; it < max_iters; ++it) {
        double gmax = 0;
        for (double v : g)
            gmax = std::max(gmax, std::abs(v));
        if (gmax < tol)
            break;
        double slope = dot(g, d);
        if (slope >= 0) {
            for (size_t i = 0; i < n; ++i)
                d[i] = -g[i];
            slope = -dot(g, g);
        }
        step = std::min(step * 2.0, 4.0);
        double f_trial = 0;
        while (true) {
            for (size_t i = 0; i < n; ++i)
                trial[i] = x[i] + step * d[i];
            f_trial = obj(trial, nullptr);
            if (f_trial <= f + 1e-4 * step * slope)
                break;
            step *= 0.5;
            if (step < 1e-14)
                return x;
        }
        x = trial;
        f = obj(x, &g_new);
        trace.push_back(f);
        double beta = 0;
        if ((it + 1) % static_cast<int>(n) != 0) {
            double num = 0;
            for (size_t i = 0; i < n; ++i)
                num += g_new[i] * (g_new[i] - g[i]);
            beta = std::max(0.0, num / std::max(dot(g, g), 1e-300));
        }
        for (size_t i = 0; i < n; ++i)
            d[i] = -g_new[i] + beta * d[i];
        g.swap(g_new);
    }
    return x;
}

} // namespace

GlobalPlacement global_place(const PackedGraph &g, const SiteMap &sites,
                             const Placement &anchors, const CgParams &params, uint64_t seed) {
    Objective obj{g, sites, anchors, params, {}, {}, sites.columns_with("mem"), true, 1.0};
    for (const auto &inst : g.app.instances)
        if (!anchors.loc.count(inst.name)) {
            obj.index[inst.name] = static_cast<int>(obj.movable.size());
            obj.movable.push_back(inst.name);
        }
    GlobalPlacement out;
    out.anchored = !anchors.loc.empty();
    obj.anchored = out.anchored;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    std::vector<double> x(2 * obj.movable.size());
    const double cx = (sites.width() - 1) / 2.0, cy = (sites.height() - 1) / 2.0;
    for (size_t i = 0; i < obj.movable.size(); ++i) {
        x[2 * i] = cx + jitter(rng);
        x[2 * i + 1] = cy + jitter(rng);
    }
    for (double tau : params.taus) {
        obj.tau = tau;
        out.stage_traces.emplace_back();
        x = conjugate_gradient(obj, x, params.max_iters, params.grad_tol,
                               out.stage_traces.back());
    }
    for (const auto &[name, c] : anchors.loc)
        out.pos[name] = {static_cast<double>(c.first), static_cast<double>(c.second)};
    for (size_t i = 0; i < obj.movable.size(); ++i)
        out.pos[obj.movable[i]] = {x[2 * i], x[2 * i + 1]};
    return out;
}

Placement legalize(const GlobalPlacement &gp, const PackedGraph &g, const SiteMap &sites,
                   const Placement &anchors) {
    Placement p;
    std::set<Cell> used;
    for (const auto &[name, c] : anchors.loc) {
        p.loc[name] = c;
        used.insert(c);
    }
    std::vector<const AppInstance *> order;
    for (const auto &inst : g.app.instances)
        if (!anchors.loc.count(inst.name))
            order.push_back(&inst);
    std::sort(order.begin(), order.end(),
              [](const AppInstance *a, const AppInstance *b) { return a->name < b->name; });

    std::map<std::string, std::vector<Cell>> by_type;
    std::map<std::string, int> demand;
    for (const auto *inst : order)
        ++demand[site_type(inst->kind)];
    for (const auto &[type, count] : demand) {
        by_type[type] = sites.sites(type);
        long free = std::count_if(by_type[type].begin(), by_type[type].end(),
                                  [&](const Cell &c) { return !used.count(c); });
        if (count > free)
            throw Error(Errc::InsufficientCapacity,
                        fmt::format("{} {} instances but {} free {} sites", count, type,
                                    free, type));
    }
    for (const auto *inst : order) {
        auto it = gp.pos.find(inst->name);
        Point at = it != gp.pos.end()
                       ? it->second
                       : Point{(sites.width() - 1) / 2.0, (sites.height() - 1) / 2.0};
        const Cell *best = nullptr;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto &c : by_type[site_type(inst->kind)]) {
            if (used.count(c))
                continue;
            const double dx = c.first - at[0], dy = c.second - at[1];
            const double d = dx * dx + dy * dy;
            // Sites are in raster order, so a strict comparison keeps the
            // smaller (y, x) on ties.
            if (d < best_d - 1e-12) {
                best_d = d;
                best = &c;
            }
        }
        p.loc[inst->name] = *best;
        used.insert(*best);
    }
    p.legal = is_legal(p, g, sites);
    return p;
}

double eq2_cost(double hpwl_value, double gamma, double overlap, double alpha) {
    const double base = std::max(hpwl_value - gamma * overlap, 0.0);
    return std::pow(base, alpha);
}

long long eq2_overlap(const AppNet &net, const Placement &p,
                      const std::map<Cell, std::string> &occupied) {
    auto pins = net_cells(net, p);
    int x0 = pins[0].first, x1 = x0, y0 = pins[0].second, y1 = y0;
    for (const auto &[x, y] : pins) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    long long count = 0;
    for (const auto &[cell, inst] : occupied) {
        auto [x, y] = cell;
        if (x < x0 || x > x1 || y < y0 || y > y1)
            continue;
        if (std::find(pins.begin(), pins.end(), cell) == pins.end())
            ++count;
    }
    return count;
}

double eq2_net_cost(const AppNet &net, const Placement &p,
                    const std::map<Cell, std::string> &occupied, double gamma, double alpha) {
    return eq2_cost(static_cast<double>(hpwl(net, p)), gamma,
                    static_cast<double>(eq2_overlap(net, p, occupied)), alpha);
}

double total_eq2_cost(const PackedGraph &g, const Placement &p, double gamma, double alpha) {
    std::map<Cell, std::string> occupied;
    for (const auto &[name, c] : p.loc)
        occupied[c] = name;
    double total = 0;
    for (const auto &net : g.app.nets)
        total += eq2_net_cost(net, p, occupied, gamma, alpha);
    return total;
}

namespace {

class Annealer {
public:
    Annealer(const Placement &start, const PackedGraph &g, const SiteMap &sites,
             const SaParams &params)
        : g_(g), sites_(sites), params_(params), rng_(params.seed),
          grid_(static_cast<size_t>(sites.width() * sites.height()), -1) {
        for (const auto &inst : g.app.instances) {
            const int id = static_cast<int>(names_.size());
            names_.push_back(inst.name);
            const auto &c = start.at(inst.name);
            loc_.push_back(c);
            grid_[cell_index(c)] = id;
            type_.push_back(site_type(inst.kind));
            const bool fixed = inst.attrs.count("x") && inst.attrs.count("y");
            if (!fixed)
                movable_.push_back(id);
            fixed_.push_back(fixed);
        }
        std::map<std::string, int> id_of;
        for (size_t i = 0; i < names_.size(); ++i)
            id_of[names_[i]] = static_cast<int>(i);
        inst_nets_.resize(names_.size());
        for (const auto &net : g.app.nets) {
            std::vector<int> pins{id_of.at(net.source.inst)};
            for (const auto &s : net.sinks)
                pins.push_back(id_of.at(s.inst));
            const int nid = static_cast<int>(nets_.size());
            for (int p : pins)
                if (inst_nets_[p].empty() || inst_nets_[p].back() != nid)
                    inst_nets_[p].push_back(nid);
            nets_.push_back(std::move(pins));
        }
        for (const auto &[type, _] : std::map<std::string, int>{{"pe", 0}, {"mem", 0}, {"io", 0}})
            sites_of_[type] = sites.sites(type);
        cost_.resize(nets_.size());
        box_.resize(nets_.size());
        total_ = 0;
        for (size_t n = 0; n < nets_.size(); ++n) {
            cost_[n] = net_cost(static_cast<int>(n), box_[n]);
            total_ += cost_[n];
        }
    }

    SaResult run() {
        SaResult r;
        r.initial_cost = total_;
        double best = total_;
        std::vector<Cell> best_loc = loc_;

        double t = params_.t0 ? *params_.t0 : calibrate();
        r.t0 = t;
        const long moves =
            static_cast<long>(params_.moves_per_instance) * static_cast<long>(movable_.size());
        if (moves > 0) {
            for (int sweep = 0; sweep < params_.max_sweeps; ++sweep) {
                long attempted = 0, accepted = 0;
                for (long m = 0; m < moves; ++m) {
                    double delta = 0;
                    if (!propose(delta))
                        continue;
                    ++attempted;
                    bool ok = delta <= 0;
                    if (!ok && t > 0)
                        ok = unit_(rng_) < std::exp(-delta / t);
                    if (!ok) {
                        undo();
                        continue;
                    }
                    commit();
                    ++accepted;
                    if (delta > 0)
                        ++r.worsening_accepted;
                    total_ += delta;
                    if (params_.record_trace)
                        r.trace.push_back(total_);
                    if (total_ < best - 1e-12) {
                        best = total_;
                        best_loc = loc_;
                    }
                }
                r.accepted += accepted;
                r.sweeps = sweep + 1;
                const double rate =
                    attempted ? static_cast<double>(accepted) / static_cast<double>(attempted) : 0;
                if (rate < params_.stop_acceptance)
                    break;
                if (r.t0 > 0) {
                    t *= params_.decay;
                    if (t < params_.min_temperature)
                        break;
                }
            }
        }
        for (size_t i = 0; i < names_.size(); ++i)
            r.placement.loc[names_[i]] = best_loc[i];
        r.placement.legal = is_legal(r.placement, g_, sites_);
        r.final_cost = total_eq2_cost(g_, r.placement, params_.gamma, params_.alpha);
        return r;
    }

private:
    struct Box {
        int x0, x1, y0, y1;
    };

    const PackedGraph &g_;
    const SiteMap &sites_;
    SaParams params_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::vector<std::string> names_;
    std::vector<Cell> loc_;
    std::vector<int> grid_;
    std::vector<std::string> type_;
    std::vector<int> movable_;
    std::vector<bool> fixed_;
    std::vector<std::vector<int>> nets_;
    std::vector<std::vector<int>> inst_nets_;
    std::map<std::string, std::vector<Cell>> sites_of_;
    std::vector<double> cost_;
    std::vector<Box> box_;
    double total_ = 0;

    // Pending move, kept until commit() or undo().
    int a_ = -1, b_ = -1;
    Cell from_{}, to_{};
    std::vector<std::pair<int, double>> saved_cost_;
    std::vector<std::pair<int, Box>> saved_box_;

    size_t cell_index(const Cell &c) const {
        return static_cast<size_t>(c.second * sites_.width() + c.first);
    }

    double net_cost(int n, Box &box) const {
        const auto &pins = nets_[n];
        Box b{loc_[pins[0]].first, loc_[pins[0]].first, loc_[pins[0]].second,
              loc_[pins[0]].second};
        for (int p : pins) {
            b.x0 = std::min(b.x0, loc_[p].first);
            b.x1 = std::max(b.x1, loc_[p].first);
            b.y0 = std::min(b.y0, loc_[p].second);
            b.y1 = std::max(b.y1, loc_[p].second);
        }
        box = b;
        long long overlap = 0;
        for (int y = b.y0; y <= b.y1; ++y)
            for (int x = b.x0; x <= b.x1; ++x) {
                const int occ = grid_[cell_index({x, y})];
                if (occ < 0)
                    continue;
                bool own = false;
                for (int p : pins)
                    own = own || loc_[p] == Cell{x, y};
                overlap += own ? 0 : 1;
            }
        const double h = (b.x1 - b.x0) + (b.y1 - b.y0);
        return eq2_cost(h, params_.gamma, static_cast<double>(overlap), params_.alpha);
    }

    static bool contains(const Box &b, const Cell &c) {
        return c.first >= b.x0 && c.first <= b.x1 && c.second >= b.y0 && c.second <= b.y1;
    }

    // Applies a random move and returns the cost delta through `delta`.
    bool propose(double &delta) {
        if (movable_.empty())
            return false;
        std::uniform_int_distribution<size_t> pick(0, movable_.size() - 1);
        a_ = movable_[pick(rng_)];
        const auto &cands = sites_of_[type_[a_]];
        if (cands.size() < 2)
            return false;
        std::uniform_int_distribution<size_t> pick_site(0, cands.size() - 1);
        to_ = cands[pick_site(rng_)];
        from_ = loc_[a_];
        if (to_ == from_)
            return false;
        b_ = grid_[cell_index(to_)];
        if (b_ >= 0 && fixed_[b_])
            return false;

        // Nets whose cost can change: nets of the moved instances, plus any
        // net whose box covers a cell that changes occupancy.
        std::vector<int> touched;
        for (int n : inst_nets_[a_])
            touched.push_back(n);
        if (b_ >= 0) {
            for (int n : inst_nets_[b_])
                touched.push_back(n);
        } else {
            for (size_t n = 0; n < nets_.size(); ++n)
                if (contains(box_[n], from_) || contains(box_[n], to_))
                    touched.push_back(static_cast<int>(n));
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

        loc_[a_] = to_;
        grid_[cell_index(to_)] = a_;
        if (b_ >= 0) {
            loc_[b_] = from_;
            grid_[cell_index(from_)] = b_;
        } else {
            grid_[cell_index(from_)] = -1;
        }
        saved_cost_.clear();
        saved_box_.clear();
        delta = 0;
        for (int n : touched) {
            saved_cost_.push_back({n, cost_[n]});
            saved_box_.push_back({n, box_[n]});
            const double c = net_cost(n, box_[n]);
            delta += c - cost_[n];
            cost_[n] = c;
        }
        return true;
    }

    void commit() {}

    void undo() {
        loc_[a_] = from_;
        grid_[cell_index(from_)] = a_;
        if (b_ >= 0) {
            loc_[b_] = to_;
            grid_[cell_index(to_)] = b_;
        } else {
            grid_[cell_index(to_)] = -1;
        }
        for (const auto &[n, c] : saved_cost_)
            cost_[n] = c;
        for (const auto &[n, b] : saved_box_)
            box_[n] = b;
    }

    // Initial temperature giving ~80% acceptance of worsening moves.
    double calibrate() {
        double sum = 0;
        int count = 0;
        for (int i = 0; i < 100; ++i) {
            double delta = 0;
            if (!propose(delta))
                continue;
            undo();
            if (delta > 0) {
                sum += delta;
                ++count;
            }
        }
        if (count == 0)
            return 0.0;
        return -(sum / count) / std::log(0.8);
    }
};

} // namespace

SaResult detailed_place(const Placement &legal, const PackedGraph &g, const SiteMap &sites,
                        const SaParams &params) {
    return Annealer(legal, g, sites, params).run();
}

SaResult place(const PackedGraph &g, const SiteMap &sites, const PlaceParams &params) {
    auto anchors = assign_io(g, sites);
    auto gp = global_place(g, sites, anchors, params.cg, params.sa.seed);
    auto legal = legalize(gp, g, sites, anchors);
    return detailed_place(legal, g, sites, params.sa);
}

SweepResult alpha_sweep(const Placement &legal, const PackedGraph &g, const SiteMap &sites,
                        const RouteEval &route, const std::vector<double> &alphas,
                        const SaParams &base) {
    if (alphas.empty())
        throw Error(Errc::InvalidSpec, "alpha range is empty");
    SweepResult out;
    bool found = false;
    for (double alpha : alphas) {
        auto params = base;
        params.alpha = alpha;
        auto sa = detailed_place(legal, g, sites, params);
        std::optional<double> cp;
        try {
            cp = route(sa.placement);
        } catch (const Error &) {
            cp.reset();
        }
        out.points.push_back({alpha, cp});
        if (cp && (!found || *cp < out.critical_path)) {
            found = true;
            out.placement = sa.placement;
            out.alpha = alpha;
            out.critical_path = *cp;
        }
    }
    if (!found)
        throw Error(Errc::AllFailed,
                    fmt::format("routing failed for all {} alpha values", alphas.size()));
    return out;
}

std::string format_placement(const Placement &p) {
    std::string out;
    for (const auto &[name, c] : p.loc)
        out += fmt::format("place {} {} {}\n", name, c.first, c.second);
    return out;
}

Placement parse_placement(std::string_view src) {
    Placement p;
    int line_no = 0;
    size_t pos = 0;
    while (pos < src.size()) {
        auto nl = src.find('\n', pos);
        auto line = src.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                 : nl - pos);
        pos = nl == std::string_view::npos ? src.size() : nl + 1;
        ++line_no;
        auto tok = text::tokenize(line);
        if (tok.empty())
            continue;
        if (tok.size() != 4 || tok[0].text != "place")
            throw ParseError("expected: place <inst> <x> <y>", line_no, tok[0].column);
        p.loc[std::string(tok[1].text)] = {
            static_cast<int>(text::parse_int(tok[2].text, line_no, tok[2].column)),
            static_cast<int>(text::parse_int(tok[3].text, line_no, tok[3].column))};
    }
    return p;
}

} // namespace interlace::pnr
