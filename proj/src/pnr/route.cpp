#include "interlace/pnr/route.hpp"

#include "interlace/error.hpp"
#include "interlace/util/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>

#include <fmt/format.h>

namespace interlace::pnr {

using ir::NodeId;

double edge_cost(double delay, double crit, double history, double present, double base) {
    return crit * delay + (1.0 - crit) * base * (1.0 + history) * (1.0 + present);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int tile_distance(const ir::IrNode &a, const ir::IrNode &b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

struct QueueEntry {
    double f;
    double g;
    uint32_t node;
    // Min-heap on f, then larger g (deeper first), then lower id.
    bool operator>(const QueueEntry &o) const {
        if (f != o.f)
            return f > o.f;
        if (g != o.g)
            return g < o.g;
        return node > o.node;
    }
};

} // namespace

Path astar(const ir::RoutingGraph &g, const std::vector<NodeId> &sources, NodeId target,
           const NodeCost &cost, const Heuristic &h) {
    std::vector<std::pair<NodeId, double>> seeds;
    for (auto s : sources)
        seeds.emplace_back(s, 0.0);
    return astar(g, seeds, target, cost, h);
}

Path astar(const ir::RoutingGraph &g, const std::vector<std::pair<NodeId, double>> &seeds,
           NodeId target, const NodeCost &cost, const Heuristic &h) {
    const size_t n = g.num_nodes();
    std::vector<double> best(n, kInf);
    std::vector<uint32_t> parent(n, UINT32_MAX);
    std::vector<char> closed(n, 0);
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
    for (auto [s, c0] : seeds) {
        if (c0 >= best[s.value])
            continue;
        best[s.value] = c0;
        open.push({c0 + h(s), c0, s.value});
    }
    while (!open.empty()) {
        auto [f, gs, u] = open.top();
        open.pop();
        if (closed[u] || gs > best[u])
            continue;
        closed[u] = 1;
        if (u == target.value) {
            Path p;
            p.cost = gs;
            for (uint32_t v = u; v != UINT32_MAX; v = parent[v])
                p.nodes.push_back(NodeId{v});
            std::reverse(p.nodes.begin(), p.nodes.end());
            return p;
        }
        for (auto v : g.fan_out(NodeId{u})) {
            if (closed[v.value])
                continue;
            const double c = cost(v);
            if (!std::isfinite(c))
                continue;
            const double ng = gs + c;
            if (ng < best[v.value]) {
                best[v.value] = ng;
                parent[v.value] = u;
                open.push({ng + h(v), ng, v.value});
            }
        }
    }
    throw Error(Errc::Unreachable,
                fmt::format("{} is unreachable", ir::node_name(g.node(target))));
}

Path dijkstra(const ir::RoutingGraph &g, const std::vector<NodeId> &sources, NodeId target,
              const NodeCost &cost) {
    return astar(g, sources, target, cost, [](NodeId) { return 0.0; });
}

int max_edge_span(const ir::RoutingGraph &g) {
    int span = 0;
    for (const auto &e : g.edges())
        span = std::max(span, tile_distance(g.node(e.src), g.node(e.dst)));
    return span;
}

Heuristic manhattan_heuristic(const ir::RoutingGraph &g, NodeId target, double per_hop,
                              int span) {
    if (span < 0)
        span = max_edge_span(g);
    if (span == 0 || per_hop <= 0)
        return [](NodeId) { return 0.0; };
    const auto &t = g.node(target);
    const double scale = per_hop / span;
    return [&g, tx = t.x, ty = t.y, scale](NodeId id) {
        const auto &n = g.node(id);
        return scale * (std::abs(n.x - tx) + std::abs(n.y - ty));
    };
}

double min_crossing_delay(const ir::RoutingGraph &g) {
    double d = kInf;
    for (const auto &e : g.edges())
        if (tile_distance(g.node(e.src), g.node(e.dst)) > 0)
            d = std::min(d, g.node(e.dst).delay);
    return std::isfinite(d) ? d : 0.0;
}

std::vector<NetTerminals> net_terminals(const ir::RoutingGraph &g, const PackedGraph &p,
                                        const Placement &placement) {
    auto port = [&](const PortRef &r) {
        const auto &[x, y] = placement.at(r.inst);
        auto id = g.find_port(x, y, r.port);
        if (!id)
            throw Error(Errc::UnknownNode,
                        fmt::format("no port '{}' at ({}, {}) for {}", r.port, x, y, r.inst));
        return *id;
    };
    std::vector<NetTerminals> out;
    for (const auto &net : p.app.nets) {
        NetTerminals t{net.name(), port(net.source), net.sinks, {}};
        for (const auto &s : net.sinks)
            t.sinks.push_back(port(s));
        out.push_back(std::move(t));
    }
    return out;
}

std::set<NodeId> RouteTree::nodes() const {
    std::set<NodeId> out{source};
    for (const auto &b : branches)
        out.insert(b.begin(), b.end());
    return out;
}

std::map<NodeId, NodeId> RouteTree::parents() const {
    std::map<NodeId, NodeId> out;
    for (const auto &b : branches)
        for (size_t i = 1; i < b.size(); ++i)
            out.emplace(b[i], b[i - 1]);
    return out;
}

std::vector<NodeId> RouteTree::path_to(NodeId sink) const {
    auto par = parents();
    std::vector<NodeId> path{sink};
    std::set<NodeId> seen{sink};
    while (path.back() != source) {
        auto it = par.find(path.back());
        if (it == par.end() || !seen.insert(it->second).second)
            return {};
        path.push_back(it->second);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

SinkDelay routed_delay(const ir::RoutingGraph &g, const RouteSet &routes,
                       const std::vector<NetTerminals> &terms) {
    // Precompute per (net, sink pin) so the closure owns its data.
    auto table = std::make_shared<std::map<std::pair<std::string, std::string>, double>>();
    for (const auto &t : terms) {
        auto it = routes.find(t.net);
        if (it == routes.end())
            continue;
        auto par = it->second.parents();
        for (size_t i = 0; i < t.sinks.size(); ++i) {
            double d = 0;
            NodeId n = t.sinks[i];
            while (n != t.source) {
                d += g.node(n).delay;
                auto pt = par.find(n);
                if (pt == par.end())
                    break;
                n = pt->second;
            }
            (*table)[{t.net, to_string(t.sink_pins[i])}] = d;
        }
    }
    return [table](const AppNet &net, const PortRef &sink) {
        auto it = table->find({net.name(), to_string(sink)});
        return it == table->end() ? 0.0 : it->second;
    };
}

namespace {

class Router {
public:
    Router(const ir::RoutingGraph &g, const PackedGraph &p, const Placement &placement,
           const RouteParams &params)
        : g_(g), p_(p), placement_(placement), params_(params),
          terms_(net_terminals(g, p, placement)), delays_(instance_delays(g, p, placement)),
          occ_(g.num_nodes(), 0), history_(g.num_nodes(), 0.0),
          tile_use_(static_cast<size_t>(g.width() * g.height()), 0),
          hop_delay_(min_crossing_delay(g)), span_(max_edge_span(g)) {
        for (const auto &[name, c] : placement.loc)
            ++tile_use_[tile_index(c.first, c.second)];
    }

    RouteResult run() {
        RouteResult result;
        auto timing = sta(p_, delays_, manhattan_delay(placement_, hop_delay_),
                          params_.max_criticality);
        double pres = params_.present_factor;
        for (int iter = 1; iter <= params_.max_iterations; ++iter) {
            std::vector<size_t> order(terms_.size());
            for (size_t i = 0; i < order.size(); ++i)
                order[i] = i;
            std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                const double ca = timing.net_criticality.at(terms_[a].net);
                const double cb = timing.net_criticality.at(terms_[b].net);
                if (ca != cb)
                    return ca > cb;
                return terms_[a].net < terms_[b].net;
            });
            for (size_t i : order) {
                const auto &t = terms_[i];
                rip_up(t.net);
                const double crit =
                    std::pow(timing.net_criticality.at(t.net), params_.criticality_exponent);
                routes_[t.net] = route_net(t, crit, pres, iter == 1);
                claim(routes_[t.net]);
            }
            int overuse = 0;
            for (size_t n = 0; n < occ_.size(); ++n)
                if (occ_[n] > 1) {
                    overuse += occ_[n] - 1;
                    history_[n] += params_.history_increment * (occ_[n] - 1);
                }
            result.overuse.push_back(overuse);
            result.iterations = iter;
            timing = sta(p_, delays_, routed_delay(g_, routes_, terms_), params_.max_criticality);
            if (overuse == 0) {
                result.routes = routes_;
                result.timing = timing;
                return result;
            }
            pres *= params_.present_growth;
        }
        throw RoutingFailed(params_.max_iterations, result.overuse.back());
    }

private:
    const ir::RoutingGraph &g_;
    const PackedGraph &p_;
    const Placement &placement_;
    RouteParams params_;
    std::vector<NetTerminals> terms_;
    std::map<std::string, double> delays_;
    std::vector<int> occ_;
    std::vector<double> history_;
    std::vector<int> tile_use_;
    double hop_delay_;
    int span_;
    RouteSet routes_;

    size_t tile_index(int x, int y) const {
        return static_cast<size_t>(y * g_.width() + x);
    }

    void rip_up(const std::string &net) {
        auto it = routes_.find(net);
        if (it == routes_.end())
            return;
        for (auto n : it->second.nodes()) {
            --occ_[n.value];
            const auto &node = g_.node(n);
            --tile_use_[tile_index(node.x, node.y)];
        }
        routes_.erase(it);
    }

    void claim(const RouteTree &t) {
        for (auto n : t.nodes()) {
            ++occ_[n.value];
            const auto &node = g_.node(n);
            ++tile_use_[tile_index(node.x, node.y)];
        }
    }

    RouteTree route_net(const NetTerminals &t, double crit, double pres, bool first) {
        RouteTree tree{t.net, t.source, t.sinks, {}};
        // Tree nodes seed the search at crit * (delay from the source), so a
        // critical sink does not branch off a long detour.
        std::vector<std::pair<NodeId, double>> in_tree{{t.source, 0.0}};
        std::map<NodeId, double> arrival{{t.source, 0.0}};
        std::set<NodeId> mine{t.source};
        // Tiles touched by this net's own partial tree count as used.
        std::map<size_t, int> own_tiles;
        auto note_tile = [&](NodeId n) {
            const auto &node = g_.node(n);
            ++own_tiles[tile_index(node.x, node.y)];
        };
        note_tile(t.source);

        NodeCost cost = [&](NodeId n) {
            const auto &node = g_.node(n);
            if (node.kind == ir::NodeKind::Register && !params_.allow_registers)
                return kInf;
            if (node.kind == ir::NodeKind::Port &&
                std::find(t.sinks.begin(), t.sinks.end(), n) == t.sinks.end())
                return kInf;
            const size_t ti = tile_index(node.x, node.y);
            const bool used = tile_use_[ti] > 0 || own_tiles.count(ti);
            const double base = 1.0 + (used ? 0.0 : params_.unused_tile_penalty);
            return edge_cost(node.delay, crit, history_[n.value], pres * occ_[n.value], base);
        };
        const double per_hop = crit * hop_delay_ + (1.0 - crit);
        for (size_t i = 0; i < t.sinks.size(); ++i) {
            const auto sink = t.sinks[i];
            if (mine.count(sink))
                continue;
            Path path;
            try {
                path = astar(g_, in_tree, sink, cost, manhattan_heuristic(g_, sink, per_hop, span_));
            } catch (const Error &e) {
                if (e.code() != Errc::Unreachable)
                    throw;
                if (first)
                    throw Error(Errc::UnroutableSink,
                                fmt::format("net {}: sink {} is unreachable",
                                            t.net, to_string(t.sink_pins[i])));
                throw;
            }
            double at = arrival.at(path.nodes.front());
            for (size_t k = 1; k < path.nodes.size(); ++k) {
                at += g_.node(path.nodes[k]).delay;
                arrival[path.nodes[k]] = at;
                in_tree.emplace_back(path.nodes[k], crit * at);
                mine.insert(path.nodes[k]);
                note_tile(path.nodes[k]);
            }
            tree.branches.push_back(std::move(path.nodes));
        }
        return tree;
    }
};

} // namespace

RouteResult route(const ir::RoutingGraph &g, const PackedGraph &p, const Placement &placement,
                  const RouteParams &params) {
    if (params.max_iterations < 1)
        throw Error(Errc::InvalidSpec, "max_iterations must be >= 1");
    return Router(g, p, placement, params).run();
}

std::vector<std::string> check_routes(const ir::RoutingGraph &g, const RouteSet &routes,
                                      const std::vector<NetTerminals> &terms) {
    std::vector<std::string> problems;
    std::map<NodeId, std::string> owner;
    for (const auto &t : terms) {
        auto it = routes.find(t.net);
        if (it == routes.end()) {
            problems.push_back(fmt::format("net {} is not routed", t.net));
            continue;
        }
        const auto &tree = it->second;
        if (tree.source != t.source)
            problems.push_back(fmt::format("net {} starts at the wrong node", t.net));
        std::set<NodeId> reached{tree.source};
        std::map<NodeId, NodeId> parent;
        for (const auto &b : tree.branches) {
            if (b.empty() || !reached.count(b.front())) {
                problems.push_back(fmt::format("net {}: branch does not start in the tree",
                                               t.net));
                continue;
            }
            for (size_t i = 1; i < b.size(); ++i) {
                if (!g.contains(b[i]) || !g.has_edge(b[i - 1], b[i]))
                    problems.push_back(fmt::format("net {}: no edge {} -> {}", t.net,
                                                   b[i - 1].value, b[i].value));
                if (!reached.insert(b[i]).second)
                    problems.push_back(
                        fmt::format("net {}: node {} has two parents", t.net, b[i].value));
            }
        }
        for (size_t i = 0; i < t.sinks.size(); ++i)
            if (!reached.count(t.sinks[i]))
                problems.push_back(fmt::format("net {}: sink {} not reached", t.net,
                                               to_string(t.sink_pins[i])));
        for (auto n : reached) {
            auto [pos, fresh] = owner.emplace(n, t.net);
            if (!fresh)
                problems.push_back(fmt::format("node {} used by {} and {}",
                                               g.contains(n) ? ir::node_name(g.node(n))
                                                             : std::to_string(n.value),
                                               pos->second, t.net));
        }
    }
    return problems;
}

int routed_wirelength(const ir::RoutingGraph &g, const RouteTree &t) {
    int w = 0;
    for (const auto &[child, parent] : t.parents())
        w += tile_distance(g.node(child), g.node(parent));
    return w;
}

std::string format_routes(const RouteSet &routes) {
    std::string out;
    for (const auto &[net, tree] : routes) {
        out += fmt::format("route {}\n", net);
        for (const auto &b : tree.branches) {
            out += " ";
            for (auto n : b)
                out += fmt::format(" {}", n.value);
            out += '\n';
        }
    }
    return out;
}

RouteSet parse_routes(std::string_view src) {
    RouteSet out;
    RouteTree *cur = nullptr;
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
        const bool indented = line.front() == ' ' || line.front() == '\t';
        if (!indented) {
            if (tok[0].text != "route" || tok.size() != 2)
                throw ParseError("expected: route <net>", line_no, tok[0].column);
            cur = &out[std::string(tok[1].text)];
            cur->net = std::string(tok[1].text);
            continue;
        }
        if (!cur)
            throw ParseError("branch before any route line", line_no, tok[0].column);
        std::vector<NodeId> branch;
        for (const auto &t : tok) {
            const auto v = text::parse_int(t.text, line_no, t.column);
            if (v < 0 || v > UINT32_MAX)
                throw ParseError(fmt::format("bad node id '{}'", t.text), line_no, t.column);
            branch.push_back(NodeId{static_cast<uint32_t>(v)});
        }
        if (cur->branches.empty())
            cur->source = branch.front();
        cur->sinks.push_back(branch.back());
        cur->branches.push_back(std::move(branch));
    }
    return out;
}

} // namespace interlace::pnr
