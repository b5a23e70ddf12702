#pragma once

#include <vector>

#include "hexcross/hexlat.hpp"
#include "hexcross/model.hpp"
#include "hexcross/spin_config.hpp"

namespace hexcross {

// Subset of the domain's hexagonal-lattice edges (indices into dual_edges())
// in which every vertex has even degree. Vertices on the outer rim (triangles
// with two exterior faces) only see two of their three edges and may have
// degree 1 there, which is where domain walls of non-constant boundary
// conditions end.
class LoopConfig {
public:
    // Throws ConfigError when the degree condition fails.
    LoopConfig(DomainPtr domain, std::vector<int> edges);

    const HexDomain& domain() const { return *domain_; }
    const std::vector<int>& edges() const { return edges_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

private:
    DomainPtr domain_;
    std::vector<int> edges_;
};

// Connected components of the edge set, found by walking each cycle.
int loop_count(const LoopConfig& loops);
// Same quantity via the cycle-space dimension |E| - |V| + c, which counts only
// closed loops. Agrees with loop_count whenever every vertex has degree 0 or 2.
int loop_count_cycle_space(const LoopConfig& loops);

// x^|E| n^loops.
double loop_weight(const LoopConfig& loops, const ModelParams& params);

// Edges separating unequal spins, boundary edges included.
LoopConfig spins_to_loops(const SpinConfig& config);

}  // namespace hexcross
