#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "hexcross/hexlat.hpp"

namespace hexcross {

struct DiluteParams {
    int q = 2;
    double k1 = 0;
    double k2 = 0;
    double k3 = 0;
};

// Occupation t in {0,1} and Potts state s in {1..q} per site.
struct DilutePottsConfig {
    std::vector<std::uint8_t> t;
    std::vector<int> s;
};

// Nearest-neighbour pairs and triangles of a site set.
struct SiteGraph {
    int sites = 0;
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::array<int, 3>> triangles;
};

// Sites are the domain faces; pairs and triangles are those fully inside.
SiteGraph site_graph(const HexDomain& domain);

// Log of prod_{i~j}(1 - t_i t_j + t_i t_j delta(s_i, s_j))
//        * exp(K1 sum t_i + K2 sum t_i t_j + K3 sum t_i t_j t_k).
// -inf when two occupied neighbours disagree.
double dilute_potts_log_weight(const DilutePottsConfig& config, const DiluteParams& params, const SiteGraph& graph);

}  // namespace hexcross
