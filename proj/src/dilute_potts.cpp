#include "hexcross/dilute_potts.hpp"

#include <limits>

#include "hexcross/errors.hpp"

namespace hexcross {

SiteGraph site_graph(const HexDomain& domain) {
    SiteGraph g;
    g.sites = domain.size();
    for (const DualEdge& e : domain.dual_edges())
        if (e.b < domain.size()) g.pairs.emplace_back(e.a, e.b);
    for (const auto& t : domain.triangles())
        if (t[0] < domain.size() && t[1] < domain.size() && t[2] < domain.size()) g.triangles.push_back(t);
    return g;
}

double dilute_potts_log_weight(const DilutePottsConfig& c, const DiluteParams& p, const SiteGraph& g) {
    if (static_cast<int>(c.t.size()) != g.sites || static_cast<int>(c.s.size()) != g.sites)
        throw ConfigError("dilute Potts configuration does not match the site graph");
    auto occ = [&](int i) { return c.t[static_cast<std::size_t>(i)] != 0; };

    double sites = 0, pairs = 0, triangles = 0;
    for (int i = 0; i < g.sites; ++i) sites += occ(i);
    for (const auto& [i, j] : g.pairs) {
        if (!(occ(i) && occ(j))) continue;
        if (c.s[static_cast<std::size_t>(i)] != c.s[static_cast<std::size_t>(j)])
            return -std::numeric_limits<double>::infinity();
        pairs += 1;
    }
    for (const auto& t : g.triangles) triangles += occ(t[0]) && occ(t[1]) && occ(t[2]);

    double out = 0;
    if (sites != 0) out += p.k1 * sites;
    if (pairs != 0) out += p.k2 * pairs;
    if (triangles != 0) out += p.k3 * triangles;
    return out;
}

}  // namespace hexcross
