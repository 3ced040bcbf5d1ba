#include "interlace/rtl/ready_join.hpp"

#include "interlace/error.hpp"

#include <bit>

#include <fmt/format.h>

namespace interlace::rtl {

bool ready_join(const std::vector<JoinInput> &dirs, int source) {
    bool out = true;
    for (size_t d = 0; d < dirs.size(); ++d) {
        if (std::popcount(dirs[d].sel_onehot) > 1)
            throw Error(Errc::MalformedOneHot,
                        fmt::format("direction {} select {:#x} has several bits set",
                                    d, dirs[d].sel_onehot));
        const bool sel = (dirs[d].sel_onehot >> source) & 1u;
        out = out && (!sel || dirs[d].ready);
    }
    return out;
}

bool ready_join_reference(const std::vector<JoinInput> &dirs, int source) {
    for (const auto &d : dirs) {
        // The consumer forwards `source` iff its selected index equals it.
        int selected = -1;
        for (int i = 0; i < 32; ++i)
            if (d.sel_onehot == (1u << i))
                selected = i;
        if (selected == source && !d.ready)
            return false;
    }
    return true;
}

} // namespace interlace::rtl
