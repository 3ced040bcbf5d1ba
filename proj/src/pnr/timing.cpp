#include "interlace/pnr/timing.hpp"

#include "interlace/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <fmt/format.h>

namespace interlace::pnr {

std::map<std::string, double> instance_delays(const ir::RoutingGraph &g, const PackedGraph &p,
                                              const Placement &placement) {
    std::map<std::string, double> out;
    for (const auto &inst : p.app.instances) {
        if (inst.kind == InstKind::Reg) {
            out[inst.name] = 0;
            continue;
        }
        const auto &[x, y] = placement.at(inst.name);
        const auto *tile = g.tile(x, y);
        out[inst.name] = tile ? tile->core_delay : 0.0;
    }
    return out;
}

bool is_timing_endpoint(const PackedGraph &p, const PortRef &sink) {
    const auto *inst = p.app.find(sink.inst);
    if (!inst)
        return true;
    switch (inst->kind) {
    case InstKind::Reg:
    case InstKind::Mem:
    case InstKind::Io: return true;
    default: break;
    }
    const auto *ann = p.annotation(sink.inst, sink.port);
    return ann && ann->reg;
}

TimingInfo sta(const PackedGraph &p, const std::map<std::string, double> &inst_delay,
               const SinkDelay &delay, double max_criticality) {
    const auto &app = p.app;
    auto d_of = [&](const std::string &inst) {
        auto it = inst_delay.find(inst);
        return it == inst_delay.end() ? 0.0 : it->second;
    };
    auto starts_path = [&](const AppInstance &i) {
        return i.kind == InstKind::Io || i.kind == InstKind::Reg || i.kind == InstKind::Mem;
    };

    // Combinational dependency graph between instances, in name order.
    std::map<std::string, std::vector<std::string>> succ;
    std::map<std::string, int> indeg;
    for (const auto &i : app.instances)
        indeg[i.name] = 0;
    for (const auto &net : app.nets)
        for (const auto &s : net.sinks)
            if (!is_timing_endpoint(p, s) && !starts_path(*app.find(s.inst))) {
                succ[net.source.inst].push_back(s.inst);
                ++indeg[s.inst];
            }
    std::vector<std::string> order;
    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (const auto &[name, d] : indeg)
        if (d == 0)
            ready.push(name);
    while (!ready.empty()) {
        auto n = ready.top();
        ready.pop();
        order.push_back(n);
        for (const auto &s : succ[n])
            if (--indeg[s] == 0)
                ready.push(s);
    }
    if (order.size() != app.instances.size()) {
        std::vector<std::string> stuck;
        for (const auto &[name, d] : indeg)
            if (d > 0)
                stuck.push_back(name);
        throw Error(Errc::CombinationalLoop,
                    fmt::format("combinational loop through {}", fmt::join(stuck, ", ")));
    }

    // Arrival of each input pin is the driver's output arrival plus the net
    // delay; an instance output adds its own delay to the latest input.
    TimingInfo t;
    std::map<std::string, double> input_arrival;
    std::map<std::pair<std::string, std::string>, double> pin_delay;
    for (const auto &net : app.nets)
        for (const auto &s : net.sinks)
            pin_delay[{net.name(), to_string(s)}] = delay(net, s);
    std::map<std::string, std::vector<const AppNet *>> nets_in;
    for (const auto &net : app.nets)
        for (const auto &s : net.sinks)
            nets_in[s.inst].push_back(&net);

    for (const auto &name : order) {
        const auto &inst = *app.find(name);
        double in = 0;
        if (!starts_path(inst))
            for (const auto *net : nets_in[name])
                for (const auto &s : net->sinks)
                    if (s.inst == name && !is_timing_endpoint(p, s))
                        in = std::max(in, t.arrival.at(net->source.inst) +
                                              pin_delay.at({net->name(), to_string(s)}));
        t.arrival[name] = in + d_of(name);
    }
    double D = 0;
    for (const auto &net : app.nets)
        for (const auto &s : net.sinks) {
            const double a = t.arrival.at(net.source.inst) + pin_delay.at({net.name(), to_string(s)});
            D = std::max(D, is_timing_endpoint(p, s) ? a : a + d_of(s.inst));
        }
    for (const auto &[name, a] : t.arrival)
        D = std::max(D, a);
    t.critical_path = D;

    // Required times, reverse topological order.
    for (const auto &i : app.instances)
        t.required[i.name] = D;
    auto sink_required = [&](const PortRef &s) {
        return is_timing_endpoint(p, s) ? D : t.required.at(s.inst) - d_of(s.inst);
    };
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        double r = D;
        for (const auto *net : app.nets_from(*it))
            for (const auto &s : net->sinks)
                r = std::min(r, sink_required(s) - pin_delay.at({net->name(), to_string(s)}));
        t.required[*it] = r;
    }
    for (const auto &net : app.nets) {
        double slack = std::numeric_limits<double>::infinity();
        const double a = t.arrival.at(net.source.inst);
        for (const auto &s : net.sinks)
            slack = std::min(slack,
                             sink_required(s) - (a + pin_delay.at({net.name(), to_string(s)})));
        t.net_slack[net.name()] = slack;
        double crit = D > 0 ? 1.0 - slack / D : 0.0;
        t.net_criticality[net.name()] = std::clamp(crit, 0.0, max_criticality);
    }
    return t;
}

SinkDelay manhattan_delay(const Placement &placement, double hop_delay) {
    return [&placement, hop_delay](const AppNet &net, const PortRef &sink) {
        const auto &a = placement.at(net.source.inst);
        const auto &b = placement.at(sink.inst);
        return hop_delay * (std::abs(a.first - b.first) + std::abs(a.second - b.second));
    };
}

} // namespace interlace::pnr
