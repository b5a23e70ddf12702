#include "hexcross/hexlat.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hexcross/errors.hpp"

namespace hexcross {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= kFnvPrime;
    }
}

}  // namespace

bool adjacent(FaceCoord a, FaceCoord b) {
    const FaceCoord d = b - a;
    return std::find(kDirections.begin(), kDirections.end(), d) != kDirections.end();
}

std::array<double, 2> face_center(FaceCoord f) {
    const double sqrt3 = std::sqrt(3.0);
    return {f.q + 0.5 * f.r, 0.5 * sqrt3 * f.r};
}

std::string to_string(Arc a) {
    switch (a) {
        case Arc::A1: return "1";
        case Arc::A2: return "2";
        case Arc::A3: return "3";
        case Arc::A4: return "4";
        case Arc::A5: return "5";
        case Arc::A6: return "6";
        case Arc::Left: return "left";
        case Arc::Right: return "right";
        case Arc::Top: return "top";
        case Arc::Bottom: return "bottom";
        case Arc::Inner: return "inner";
        case Arc::Outer: return "outer";
    }
    return "?";
}

Arc arc_from_string(const std::string& s) {
    for (int i = 0; i < kArcCount; ++i) {
        const auto a = static_cast<Arc>(i);
        if (to_string(a) == s) return a;
    }
    throw ConfigError("unknown arc label '" + s + "'");
}

std::string to_string(DomainKind k) {
    switch (k) {
        case DomainKind::RegularHexagon: return "hexagon";
        case DomainKind::HexBox: return "box";
        case DomainKind::Strip: return "strip";
        case DomainKind::Annulus: return "annulus";
        case DomainKind::Union: return "union";
    }
    return "?";
}

FaceCoord HexDomain::coord(int extended_index) const {
    if (extended_index < size()) return faces_[static_cast<std::size_t>(extended_index)];
    return exterior_[static_cast<std::size_t>(extended_index - size())];
}

int HexDomain::index_of(FaceCoord f) const {
    const auto it = index_.find(f);
    if (it == index_.end() || it->second >= size()) return -1;
    return it->second;
}

int HexDomain::extended_index_of(FaceCoord f) const {
    const auto it = index_.find(f);
    return it == index_.end() ? -1 : it->second;
}

std::vector<int> HexDomain::domain_neighbors(int face) const {
    std::vector<int> out;
    for (int v : ring(face))
        if (v < size()) out.push_back(v);
    return out;
}

const std::vector<int>& HexDomain::arc(Arc a) const {
    const auto i = static_cast<std::size_t>(a);
    if (!has_arc_[i]) throw ConfigError("domain " + describe() + " has no arc '" + to_string(a) + "'");
    return arcs_[i];
}

bool HexDomain::has_arc(Arc a) const { return has_arc_[static_cast<std::size_t>(a)]; }

std::vector<Arc> HexDomain::arc_labels() const {
    std::vector<Arc> out;
    for (int i = 0; i < kArcCount; ++i)
        if (has_arc_[static_cast<std::size_t>(i)]) out.push_back(static_cast<Arc>(i));
    return out;
}

std::array<double, 2> HexDomain::centroid() const {
    double x = 0, y = 0;
    for (FaceCoord f : faces_) {
        const auto c = face_center(f);
        x += c[0];
        y += c[1];
    }
    const double n = faces_.empty() ? 1.0 : static_cast<double>(faces_.size());
    return {x / n, y / n};
}

std::string HexDomain::describe() const {
    std::ostringstream os;
    os << to_string(kind_);
    for (std::size_t i = 0; i < params_.size(); ++i) os << (i == 0 ? ":" : ",") << params_[i];
    return os.str();
}

std::shared_ptr<const HexDomain> HexDomain::assemble(
    DomainKind kind, std::vector<int> params, std::vector<FaceCoord> faces,
    std::map<Arc, std::vector<FaceCoord>> arcs,
    const std::function<ArcMask(FaceCoord)>& classify_exterior) {
    if (faces.empty()) throw ConfigError("empty domain");
    std::shared_ptr<HexDomain> d(new HexDomain());
    d->kind_ = kind;
    d->params_ = std::move(params);
    d->faces_ = std::move(faces);

    const int n = d->size();
    for (int i = 0; i < n; ++i) {
        if (!d->index_.emplace(d->faces_[static_cast<std::size_t>(i)], i).second)
            throw ConfigError("duplicate face in domain");
    }

    // Exterior ring, ordered by first discovery in face order.
    for (int i = 0; i < n; ++i) {
        for (FaceCoord dir : kDirections) {
            const FaceCoord g = d->faces_[static_cast<std::size_t>(i)] + dir;
            if (d->index_.count(g)) continue;
            d->index_.emplace(g, n + static_cast<int>(d->exterior_.size()));
            d->exterior_.push_back(g);
        }
    }
    d->exterior_arcs_.reserve(d->exterior_.size());
    for (FaceCoord g : d->exterior_) d->exterior_arcs_.push_back(classify_exterior ? classify_exterior(g) : 0);

    d->rings_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (std::size_t k = 0; k < 6; ++k)
            d->rings_[static_cast<std::size_t>(i)][k] = d->index_.at(d->faces_[static_cast<std::size_t>(i)] + kDirections[k]);

    // Dual edges: every adjacent pair with at least one domain face, once.
    for (int i = 0; i < n; ++i)
        for (int v : d->rings_[static_cast<std::size_t>(i)])
            if (v >= n || v > i) d->edges_.push_back({i, v});

    // Triangles touching the domain. A triangle {u, u+d_k, u+d_{k+1}} is
    // canonicalised by its sorted extended indices.
    std::set<std::array<int, 3>> tris;
    for (int i = 0; i < n; ++i) {
        const auto& ring = d->rings_[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < 6; ++k) {
            std::array<int, 3> t{i, ring[k], ring[(k + 1) % 6]};
            std::sort(t.begin(), t.end());
            tris.insert(t);
        }
    }
    d->triangles_.assign(tris.begin(), tris.end());

    std::map<std::array<int, 3>, int> tri_index;
    for (std::size_t t = 0; t < d->triangles_.size(); ++t) tri_index.emplace(d->triangles_[t], static_cast<int>(t));
    d->edge_endpoints_.reserve(d->edges_.size());
    for (const DualEdge& e : d->edges_) {
        const FaceCoord fa = d->coord(e.a), fb = d->coord(e.b);
        std::array<int, 2> ends{-1, -1};
        int found = 0;
        for (FaceCoord dir : kDirections) {
            const FaceCoord c = fa + dir;
            if (c == fb || !adjacent(c, fb)) continue;
            const int ci = d->extended_index_of(c);
            std::array<int, 3> t{e.a, e.b, ci};
            std::sort(t.begin(), t.end());
            const auto it = ci < 0 ? tri_index.end() : tri_index.find(t);
            ends[static_cast<std::size_t>(found++)] = it == tri_index.end() ? -1 : it->second;
        }
        d->edge_endpoints_.push_back(ends);
    }

    for (auto& [label, coords] : arcs) {
        auto& dst = d->arcs_[static_cast<std::size_t>(label)];
        for (FaceCoord f : coords) {
            const int idx = d->index_of(f);
            if (idx < 0) throw ConfigError("arc face outside domain");
            dst.push_back(idx);
        }
        d->has_arc_[static_cast<std::size_t>(label)] = true;
    }

    std::uint64_t h = kFnvOffset;
    fnv_mix(h, static_cast<std::uint64_t>(kind));
    for (FaceCoord f : d->faces_) {
        fnv_mix(h, static_cast<std::uint32_t>(f.q));
        fnv_mix(h, static_cast<std::uint32_t>(f.r));
    }
    d->hash_ = h;
    return d;
}

std::vector<FaceCoord> hexagon_arc_faces(int side, FaceCoord c, int arc_number) {
    std::vector<FaceCoord> out;
    const int j = side;
    switch (arc_number) {
        case 1:
            for (int q = 0; q <= j; ++q) out.push_back(c + FaceCoord{q, -j});
            break;
        case 2:
            for (int r = -j; r <= 0; ++r) out.push_back(c + FaceCoord{j, r});
            break;
        case 3:
            for (int q = j; q >= 0; --q) out.push_back(c + FaceCoord{q, j - q});
            break;
        case 4:
            for (int q = 0; q >= -j; --q) out.push_back(c + FaceCoord{q, j});
            break;
        case 5:
            for (int r = j; r >= 0; --r) out.push_back(c + FaceCoord{-j, r});
            break;
        case 6:
            for (int q = -j; q <= 0; ++q) out.push_back(c + FaceCoord{q, -j - q});
            break;
        default:
            throw ConfigError("hexagon arcs are numbered 1..6");
    }
    return out;
}

namespace {

ArcMask classify_hexagon_exterior(FaceCoord g, FaceCoord c, int side) {
    const FaceCoord d = g - c;
    const int o = side + 1;
    ArcMask m = 0;
    if (d.r == -o) m |= arc_bit(Arc::A1);
    if (d.q == o) m |= arc_bit(Arc::A2);
    if (d.q + d.r == o) m |= arc_bit(Arc::A3);
    if (d.r == o) m |= arc_bit(Arc::A4);
    if (d.q == -o) m |= arc_bit(Arc::A5);
    if (d.q + d.r == -o) m |= arc_bit(Arc::A6);
    return m;
}

std::vector<FaceCoord> hexagon_faces(int side, FaceCoord c) {
    std::vector<FaceCoord> faces;
    for (int r = -side; r <= side; ++r)
        for (int q = -side; q <= side; ++q)
            if (hex_norm({q, r}) <= side) faces.push_back(c + FaceCoord{q, r});
    return faces;
}

DomainPtr build_parallelogram(DomainKind kind, int width, int height, FaceCoord o) {
    if (width < 1 || height < 1) throw ConfigError("box dimensions must be positive");
    std::vector<FaceCoord> faces;
    faces.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (int r = 0; r < height; ++r)
        for (int q = 0; q < width; ++q) faces.push_back(o + FaceCoord{q, r});
    std::map<Arc, std::vector<FaceCoord>> arcs;
    for (int r = 0; r < height; ++r) {
        arcs[Arc::Left].push_back(o + FaceCoord{0, r});
        arcs[Arc::Right].push_back(o + FaceCoord{width - 1, r});
    }
    for (int q = 0; q < width; ++q) {
        arcs[Arc::Bottom].push_back(o + FaceCoord{q, 0});
        arcs[Arc::Top].push_back(o + FaceCoord{q, height - 1});
    }
    auto classify = [=](FaceCoord g) -> ArcMask {
        const FaceCoord d = g - o;
        ArcMask m = 0;
        if (d.r < 0) m |= arc_bit(Arc::Bottom);
        if (d.r >= height) m |= arc_bit(Arc::Top);
        if (d.q < 0) m |= arc_bit(Arc::Left);
        if (d.q >= width) m |= arc_bit(Arc::Right);
        return m;
    };
    return HexDomain::assemble(kind, {width, height}, std::move(faces), std::move(arcs), classify);
}

}  // namespace

DomainPtr build_regular_hexagon(int side, FaceCoord center) {
    if (side < 1) throw ConfigError("hexagon side must be >= 1");
    std::map<Arc, std::vector<FaceCoord>> arcs;
    for (int a = 1; a <= 6; ++a) arcs[static_cast<Arc>(a - 1)] = hexagon_arc_faces(side, center, a);
    return HexDomain::assemble(
        DomainKind::RegularHexagon, {side}, hexagon_faces(side, center), std::move(arcs),
        [=](FaceCoord g) { return classify_hexagon_exterior(g, center, side); });
}

DomainPtr build_hex_box(int width, int height, FaceCoord origin) {
    return build_parallelogram(DomainKind::HexBox, width, height, origin);
}

DomainPtr build_strip(int width, int height) {
    return build_parallelogram(DomainKind::Strip, width, height, {0, 0});
}

DomainPtr annulus(int side, int delta) {
    if (side < 1 || delta < 1) throw ConfigError("annulus needs side >= 1 and delta >= 1");
    std::vector<FaceCoord> faces;
    std::map<Arc, std::vector<FaceCoord>> arcs;
    const int outer = side + delta;
    for (int r = -outer; r <= outer; ++r) {
        for (int q = -outer; q <= outer; ++q) {
            const int d = hex_norm({q, r});
            if (d <= side || d > outer) continue;
            faces.push_back({q, r});
            if (d == side + 1) arcs[Arc::Inner].push_back({q, r});
            if (d == outer) arcs[Arc::Outer].push_back({q, r});
        }
    }
    auto classify = [=](FaceCoord g) -> ArcMask {
        return hex_norm(g) <= side ? arc_bit(Arc::Inner) : arc_bit(Arc::Outer);
    };
    return HexDomain::assemble(DomainKind::Annulus, {side, delta}, std::move(faces), std::move(arcs), classify);
}

DomainPtr translate_union(int side, std::span<const FaceCoord> centers) {
    if (side < 1) throw ConfigError("hexagon side must be >= 1");
    if (centers.empty()) throw ConfigError("union needs at least one hexagon");
    std::set<FaceCoord> seen;
    std::vector<FaceCoord> faces;
    std::vector<int> params{side};
    for (FaceCoord c : centers) {
        params.push_back(c.q);
        params.push_back(c.r);
        for (FaceCoord f : hexagon_faces(side, c))
            if (seen.insert(f).second) faces.push_back(f);
    }
    std::sort(faces.begin(), faces.end(), [](FaceCoord a, FaceCoord b) {
        return a.r != b.r ? a.r < b.r : a.q < b.q;
    });
    return HexDomain::assemble(DomainKind::Union, std::move(params), std::move(faces), {}, nullptr);
}

DomainPtr translate(const HexDomain& domain, FaceCoord offset) {
    std::vector<FaceCoord> faces;
    faces.reserve(domain.faces().size());
    for (FaceCoord f : domain.faces()) faces.push_back(f + offset);
    std::map<Arc, std::vector<FaceCoord>> arcs;
    for (Arc a : domain.arc_labels())
        for (int i : domain.arc(a)) arcs[a].push_back(domain.coord(i) + offset);
    // The shifted exterior ring keeps the tags of its preimage.
    std::unordered_map<FaceCoord, ArcMask, FaceCoordHash> tags;
    for (int i = 0; i < domain.exterior_size(); ++i)
        tags.emplace(domain.exterior()[static_cast<std::size_t>(i)] + offset, domain.exterior_arcs(i));
    auto classify = [tags = std::move(tags)](FaceCoord g) -> ArcMask {
        const auto it = tags.find(g);
        return it == tags.end() ? ArcMask{0} : it->second;
    };
    return HexDomain::assemble(domain.kind(), domain.params(), std::move(faces), std::move(arcs), classify);
}

std::vector<int> partition_cell(std::span<const int> arc_faces, int k, int index) {
    const int len = static_cast<int>(arc_faces.size());
    if (k < 1 || k > len) throw ConfigError("partition count must be in [1, arc length]");
    if (index < 0 || index >= k) throw ConfigError("partition index out of range");
    const int base = len / k, extra = len % k;
    const int begin = index * base + std::min(index, extra);
    const int count = base + (index < extra ? 1 : 0);
    return {arc_faces.begin() + begin, arc_faces.begin() + begin + count};
}

std::vector<int> partition_cell(const HexDomain& domain, const EdgePartition& p) {
    return partition_cell(domain.arc(p.arc), p.k, p.index);
}

int interior_adjacency_count(const HexDomain& domain) {
    int count = 0;
    for (const DualEdge& e : domain.dual_edges())
        if (e.b < domain.size()) ++count;
    return count;
}

}  // namespace hexcross
