#pragma once

#include "interlace/arch/spec.hpp"
#include "interlace/ir/graph.hpp"

namespace interlace::arch {

// Track reached on side `to` by track `t` entering from side `from`.
// Disjoint keeps the track index on every turn.
int disjoint_map(Side from, Side to, int t, int num_tracks);

// Straight through keeps the track, a clockwise turn maps t to (W - t) mod W
// and a counter-clockwise turn maps t to (t + 1) mod W. Each (from, to) pair
// is a permutation of the tracks.
int wilton_map(Side from, Side to, int t, int num_tracks);

int track_map(Topology topo, Side from, Side to, int t, int num_tracks);

// Neighbor tile across `side`; North is y - 1.
std::pair<int, int> neighbor(int x, int y, Side side);

// Builds the full uniform mesh: switch boxes, connection boxes, core ports,
// inter-tile wires, then applies the port policy and pipeline registers.
ir::RoutingGraph create_uniform_interconnect(const ArchSpec &spec);

// Drops core-output -> SB-out and SB-in -> core-input edges that the policy
// does not allow. A policy covering every side and track is the identity.
ir::RoutingGraph apply_port_policy(const ir::RoutingGraph &g,
                                   const ArchSpec &spec);

// Splits selected SB-out -> neighbor SB-in wires into a register plus a
// 2-input bypass mux (RegMux). Every ceil(1/density)-th track is selected.
ir::RoutingGraph insert_registers(const ir::RoutingGraph &g,
                                  const ArchSpec &spec);

// Tracks registered per tile side for a density.
std::vector<int> registered_tracks(double reg_density, int num_tracks);

} // namespace interlace::arch
