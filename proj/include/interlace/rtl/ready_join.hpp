#pragma once

#include <cstdint>
#include <vector>

namespace interlace::rtl {

// One consumer direction of a fan-out source: the consumer's one-hot select
// (bit i set means it forwards fan-in i) and its ready bit.
struct JoinInput {
    uint32_t sel_onehot = 0;
    bool ready = false;
};

// Ready returned to fan-in `source`: AND over directions of
// (!sel_onehot[source] || ready). Throws MalformedOneHot when a select
// vector has two or more bits set.
bool ready_join(const std::vector<JoinInput> &dirs, int source);

// Reference: AND of ready over exactly the directions that consume source.
bool ready_join_reference(const std::vector<JoinInput> &dirs, int source);

} // namespace interlace::rtl
