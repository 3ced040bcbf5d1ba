#include "interlace/rtl/area.hpp"

namespace interlace::rtl {

namespace {

enum class Region { Sb, Cb, Other };

// Names follow the lowering scheme: <prefix>_<node>, where node names start
// with sb/rg/rm (switch box side) or p (core port).
Region region_of(const std::string &inst) {
    auto us = inst.find('_');
    if (us == std::string::npos)
        return Region::Other;
    auto prefix = inst.substr(0, us);
    if (prefix != "mux" && prefix != "vmux" && prefix != "reg")
        return Region::Other;
    auto node = std::string_view(inst).substr(us + 1);
    if (node.starts_with("sb") || node.starts_with("rm") || node.starts_with("rg"))
        return Region::Sb;
    if (node.starts_with("p"))
        return Region::Cb;
    return Region::Other;
}

} // namespace

long long storage_bits(const Instance &inst) {
    const long long w = inst.param("W", 1);
    if (inst.prim == Prim::Reg)
        return w;
    if (inst.prim != Prim::FifoReg)
        return 0;
    if (inst.param("DEPTH", 1) >= 2)
        return 2 * w + 2;
    return w + 1;
}

AreaMetrics area_proxy(const StructNetlist &n) {
    AreaMetrics m;
    for (const auto &inst : n.instances) {
        switch (inst.prim) {
        case Prim::Mux: {
            const long long k = inst.param("K"), w = inst.param("W", 1);
            m.mux_input_count += k * w;
            auto region = region_of(inst.name);
            auto *b = region == Region::Sb ? &m.sb : region == Region::Cb ? &m.cb : nullptr;
            if (b) {
                b->mux_inputs += k;
                b->mux_input_bits += k * w;
            }
            break;
        }
        case Prim::Reg:
        case Prim::FifoReg: m.storage_bits += storage_bits(inst); break;
        case Prim::Join: {
            const long long terms = inst.param("N");
            m.join_gates += terms > 0 ? 2 * terms - 1 : 0;
            break;
        }
        default: break;
        }
    }
    for (const auto &f : n.config) {
        m.config_bits += f.bit_width;
        auto region = region_of(f.target_inst);
        if (region == Region::Sb)
            m.sb.config_bits += f.bit_width;
        else if (region == Region::Cb)
            m.cb.config_bits += f.bit_width;
    }
    for (auto *b : {&m.sb, &m.cb})
        b->gate_estimate = b->mux_input_bits + b->config_bits * kRegisterGateWeight;
    m.gate_count_estimate = m.mux_input_count +
                            (m.storage_bits + m.config_bits) * kRegisterGateWeight +
                            m.join_gates;
    return m;
}

} // namespace interlace::rtl
