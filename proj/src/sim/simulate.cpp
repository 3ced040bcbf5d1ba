#include "interlace/sim/simulate.hpp"

#include "interlace/error.hpp"

#include <algorithm>
#include <deque>

#include <fmt/format.h>

namespace interlace::sim {

using ir::NodeId;

std::map<NodeId, Arrival> functional_sim(const ConfiguredFabric &f,
                                         const std::map<NodeId, uint64_t> &stimulus) {
    const auto &g = *f.graph;
    std::map<NodeId, Arrival> out;
    std::deque<NodeId> queue;
    for (const auto &[n, token] : stimulus) {
        out[n] = {token, 0};
        queue.push_back(n);
    }
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        const Arrival at = out.at(u);
        for (auto v : g.fan_out(u)) {
            if (out.count(v))
                continue;
            auto fi = g.fan_in(v);
            if (fi.size() >= 2 && g.node(v).kind != ir::NodeKind::Register) {
                auto it = f.select.find(v);
                const int sel = it == f.select.end() ? 0 : it->second;
                if (fi[static_cast<size_t>(sel)] != u)
                    continue;
            }
            const int tick = at.tick + (g.node(v).kind == ir::NodeKind::Register ? 1 : 0);
            out[v] = {at.token, tick};
            queue.push_back(v);
        }
    }
    return out;
}

SweepReport exhaustive_sweep(const ir::RoutingGraph &g, const std::vector<rtl::ConfigField> &sidecar,
                             const std::vector<rtl::ConfigField> &hardware) {
    const FieldIndex write_index(g, sidecar);
    const FieldIndex read_index(g, hardware);
    SweepReport report;
    uint64_t token = 0;
    for (uint32_t i = 0; i < g.num_nodes(); ++i) {
        const NodeId b{i};
        auto fi = g.fan_in(b);
        const bool mux = fi.size() >= 2 && g.node(b).kind != ir::NodeKind::Register;
        for (size_t idx = 0; idx < fi.size(); ++idx) {
            const NodeId a = fi[idx];
            ++report.cases;
            ++token;
            try {
                std::vector<FieldValue> values;
                if (mux) {
                    const auto *sel = write_index.select_of(b);
                    if (!sel) {
                        report.failures.push_back({a, b, "no select field"});
                        continue;
                    }
                    values.push_back({*sel, idx});
                }
                auto fabric = configure(read_index, pack_words(values, write_index, false));
                auto arrivals = functional_sim(fabric, {{a, token}});
                auto it = arrivals.find(b);
                if (it == arrivals.end())
                    report.failures.push_back({a, b, "token did not arrive"});
                else if (it->second.token != token)
                    report.failures.push_back({a, b, "wrong token arrived"});
            } catch (const Error &e) {
                report.failures.push_back({a, b, e.what()});
            }
        }
    }
    return report;
}

SweepReport exhaustive_sweep(const ir::RoutingGraph &g, const rtl::StructNetlist &n) {
    return exhaustive_sweep(g, n.config, rtl::extract_config_map(n));
}

std::string format_sweep_report(const ir::RoutingGraph &g, const SweepReport &r) {
    std::string out;
    for (const auto &f : r.failures)
        out += fmt::format("FAIL {} -> {}: {}\n", ir::node_name(g.node(f.src)),
                           ir::node_name(g.node(f.dst)), f.reason);
    out += fmt::format("sweep: {} cases, {} failures\n", r.cases, r.failures.size());
    return out;
}

StreamResult simulate_stream(const std::vector<int> &stage_depths, int tokens,
                             const std::vector<bool> &ready, int max_cycles) {
    if (ready.empty())
        throw Error(Errc::InvalidSpec, "ready schedule is empty");
    for (int d : stage_depths)
        if (d < 1)
            throw Error(Errc::InvalidSpec, "stage depth must be positive");
    StreamResult r;
    const size_t n = stage_depths.size();
    std::vector<std::deque<uint64_t>> stages(n);
    r.max_occupancy.assign(n, 0);
    uint64_t next = 0;
    while (r.cycles < max_cycles && r.delivered.size() < static_cast<size_t>(tokens)) {
        const bool sink_ready = ready[static_cast<size_t>(r.cycles) % ready.size()];
        // Walk from the sink back so each token advances at most one stage.
        if (n == 0) {
            if (sink_ready && next < static_cast<uint64_t>(tokens))
                r.delivered.push_back(next++);
        } else {
            if (sink_ready && !stages[n - 1].empty()) {
                r.delivered.push_back(stages[n - 1].front());
                stages[n - 1].pop_front();
            }
            for (size_t i = n - 1; i > 0; --i)
                if (!stages[i - 1].empty() &&
                    static_cast<int>(stages[i].size()) < stage_depths[i]) {
                    stages[i].push_back(stages[i - 1].front());
                    stages[i - 1].pop_front();
                }
            if (next < static_cast<uint64_t>(tokens) &&
                static_cast<int>(stages[0].size()) < stage_depths[0])
                stages[0].push_back(next++);
            for (size_t i = 0; i < n; ++i)
                r.max_occupancy[i] =
                    std::max(r.max_occupancy[i], static_cast<int>(stages[i].size()));
        }
        ++r.cycles;
    }
    return r;
}

} // namespace interlace::sim
