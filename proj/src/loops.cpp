#include "hexcross/loops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hexcross/errors.hpp"

namespace hexcross {

namespace {

// Incident chosen edges per vertex (triangle index).
std::vector<std::vector<int>> incidence(const HexDomain& d, const std::vector<int>& edges) {
    std::vector<std::vector<int>> inc(d.triangles().size());
    for (int e : edges)
        for (int t : d.edge_endpoints()[static_cast<std::size_t>(e)])
            if (t >= 0) inc[static_cast<std::size_t>(t)].push_back(e);
    return inc;
}

// Number of domain-touching edges available at a vertex.
int available_degree(const HexDomain& d, const std::array<int, 3>& tri) {
    int ext = 0;
    for (int v : tri) ext += v >= d.size();
    return ext >= 2 ? 2 : 3;
}

}  // namespace

LoopConfig::LoopConfig(DomainPtr domain, std::vector<int> edges) : domain_(std::move(domain)), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw ConfigError("loop configuration repeats an edge");
    const int m = static_cast<int>(domain_->dual_edges().size());
    for (int e : edges_)
        if (e < 0 || e >= m) throw ConfigError("loop edge index out of range");
    const auto inc = incidence(*domain_, edges_);
    for (std::size_t t = 0; t < inc.size(); ++t) {
        const int deg = static_cast<int>(inc[t].size());
        const bool rim = available_degree(*domain_, domain_->triangles()[t]) == 2;
        if (deg == 0 || deg == 2 || (rim && deg == 1)) continue;
        throw ConfigError("loop configuration violates the degree condition");
    }
}

int loop_count(const LoopConfig& loops) {
    const HexDomain& d = loops.domain();
    const auto inc = incidence(d, loops.edges());
    std::vector<char> used(d.dual_edges().size(), 0);
    int count = 0;
    for (int start : loops.edges()) {
        if (used[static_cast<std::size_t>(start)]) continue;
        ++count;
        // Walk in both directions from the starting edge.
        std::vector<int> stack{start};
        used[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            const int e = stack.back();
            stack.pop_back();
            for (int t : d.edge_endpoints()[static_cast<std::size_t>(e)]) {
                if (t < 0) continue;
                for (int f : inc[static_cast<std::size_t>(t)]) {
                    if (used[static_cast<std::size_t>(f)]) continue;
                    used[static_cast<std::size_t>(f)] = 1;
                    stack.push_back(f);
                }
            }
        }
    }
    return count;
}

int loop_count_cycle_space(const LoopConfig& loops) {
    const HexDomain& d = loops.domain();
    const auto tri_count = static_cast<int>(d.triangles().size());
    std::vector<int> parent(static_cast<std::size_t>(tri_count));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] =
                                                              parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    std::vector<char> active(static_cast<std::size_t>(tri_count), 0);
    int vertices = 0, components = 0;
    for (int e : loops.edges()) {
        const auto ends = d.edge_endpoints()[static_cast<std::size_t>(e)];
        for (int t : ends)
            if (!active[static_cast<std::size_t>(t)]) {
                active[static_cast<std::size_t>(t)] = 1;
                ++vertices;
                ++components;
            }
        const int a = find(ends[0]), b = find(ends[1]);
        if (a != b) {
            parent[static_cast<std::size_t>(a)] = b;
            --components;
        }
    }
    return loops.edge_count() - vertices + components;
}

double loop_weight(const LoopConfig& loops, const ModelParams& params) {
    return std::pow(params.x, loops.edge_count()) * std::pow(params.n, loop_count(loops));
}

LoopConfig spins_to_loops(const SpinConfig& config) {
    const auto spins = config.extended_spins();
    const auto& edges = config.domain().dual_edges();
    std::vector<int> chosen;
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (spins[static_cast<std::size_t>(edges[i].a)] != spins[static_cast<std::size_t>(edges[i].b)])
            chosen.push_back(static_cast<int>(i));
    return LoopConfig(config.domain_ptr(), std::move(chosen));
}

}  // namespace hexcross
