#pragma once

// Hexagonal-lattice geometry. Spins live on the faces of the hexagonal
// lattice, i.e. on the sites of the triangular lattice. Faces are addressed by
// axial coordinates with pointy-top orientation: rows of constant r are
// horizontal and r grows upwards.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hexcross {

struct FaceCoord {
    int q = 0;
    int r = 0;

    constexpr int s() const { return -q - r; }
    constexpr FaceCoord operator+(FaceCoord o) const { return {q + o.q, r + o.r}; }
    constexpr FaceCoord operator-(FaceCoord o) const { return {q - o.q, r - o.r}; }
    constexpr auto operator<=>(const FaceCoord&) const = default;
};

// Counterclockwise, starting east. Consecutive directions are themselves
// adjacent, so {u, u+d[i], u+d[i+1]} is a triangle of the triangular lattice.
inline constexpr std::array<FaceCoord, 6> kDirections{{
    {1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

// Hex distance from the origin.
constexpr int hex_norm(FaceCoord f) {
    auto a = [](int v) { return v < 0 ? -v : v; };
    int m = a(f.q);
    if (a(f.r) > m) m = a(f.r);
    if (a(f.s()) > m) m = a(f.s());
    return m;
}

bool adjacent(FaceCoord a, FaceCoord b);

// Planar embedding of the face center (unit distance between neighbours).
std::array<double, 2> face_center(FaceCoord f);

struct FaceCoordHash {
    std::size_t operator()(FaceCoord f) const noexcept {
        return std::hash<std::int64_t>{}((static_cast<std::int64_t>(f.q) << 32) ^
                                         static_cast<std::uint32_t>(f.r));
    }
};

enum class DomainKind { RegularHexagon, HexBox, Strip, Annulus, Union };

// Arcs 1..6 of a regular hexagon run counterclockwise from the bottom side.
// Boxes and strips use Left/Right/Top/Bottom, annuli Inner/Outer.
enum class Arc : std::uint8_t {
    A1 = 0, A2, A3, A4, A5, A6,
    Left, Right, Top, Bottom,
    Inner, Outer,
};
inline constexpr int kArcCount = 12;

using ArcMask = std::uint16_t;
constexpr ArcMask arc_bit(Arc a) { return static_cast<ArcMask>(1u << static_cast<unsigned>(a)); }

std::string to_string(Arc a);
std::string to_string(DomainKind k);
Arc arc_from_string(const std::string& s);

// Unordered pair of adjacent faces, i.e. one edge of the hexagonal lattice.
// Indices are "extended": [0, N) are domain faces, [N, N+M) exterior-ring faces.
struct DualEdge {
    int a = 0;  // always a domain face
    int b = 0;
};

// A finite set of faces with its exterior ring, adjacency, triangles and
// labelled boundary arcs. Immutable once built; share via shared_ptr.
class HexDomain {
public:
    DomainKind kind() const { return kind_; }
    const std::vector<int>& params() const { return params_; }

    int size() const { return static_cast<int>(faces_.size()); }
    int exterior_size() const { return static_cast<int>(exterior_.size()); }
    int extended_size() const { return size() + exterior_size(); }

    const std::vector<FaceCoord>& faces() const { return faces_; }
    const std::vector<FaceCoord>& exterior() const { return exterior_; }
    FaceCoord coord(int extended_index) const;

    // Domain index of a face, or -1.
    int index_of(FaceCoord f) const;
    // Extended index (domain or exterior ring), or -1.
    int extended_index_of(FaceCoord f) const;
    bool contains(FaceCoord f) const { return index_of(f) >= 0; }

    // Six neighbours of a domain face in kDirections order, as extended indices.
    const std::array<int, 6>& ring(int face) const { return rings_[static_cast<std::size_t>(face)]; }
    // Neighbours of a domain face that are themselves domain faces.
    std::vector<int> domain_neighbors(int face) const;

    const std::vector<DualEdge>& dual_edges() const { return edges_; }
    // Triangles (hexagonal-lattice vertices) with at least one domain face.
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    // For each dual edge, the two triangles at its endpoints.
    const std::vector<std::array<int, 2>>& edge_endpoints() const { return edge_endpoints_; }

    const std::vector<int>& arc(Arc a) const;
    bool has_arc(Arc a) const;
    std::vector<Arc> arc_labels() const;
    // Arc tags of an exterior-ring face (exterior index, 0-based).
    ArcMask exterior_arcs(int exterior_index) const { return exterior_arcs_[static_cast<std::size_t>(exterior_index)]; }

    // Centroid of the face centers; used for angular boundary parametrisation.
    std::array<double, 2> centroid() const;

    std::uint64_t hash() const { return hash_; }
    std::string describe() const;

    // Internal construction entry point; prefer the named builders below.
    static std::shared_ptr<const HexDomain> assemble(
        DomainKind kind, std::vector<int> params, std::vector<FaceCoord> faces,
        std::map<Arc, std::vector<FaceCoord>> arcs,
        const std::function<ArcMask(FaceCoord)>& classify_exterior);

private:
    HexDomain() = default;

    DomainKind kind_ = DomainKind::Union;
    std::vector<int> params_;
    std::vector<FaceCoord> faces_;
    std::vector<FaceCoord> exterior_;
    std::vector<ArcMask> exterior_arcs_;
    std::unordered_map<FaceCoord, int, FaceCoordHash> index_;
    std::vector<std::array<int, 6>> rings_;
    std::vector<DualEdge> edges_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::array<int, 2>> edge_endpoints_;
    std::array<std::vector<int>, kArcCount> arcs_;
    std::array<bool, kArcCount> has_arc_{};
    std::uint64_t hash_ = 0;
};

using DomainPtr = std::shared_ptr<const HexDomain>;

// Centered regular hexagon of the given side (3j^2+3j+1 faces).
DomainPtr build_regular_hexagon(int side, FaceCoord center = {0, 0});
// width x height parallelogram, faces (q, r) with 0 <= q < width, 0 <= r < height,
// row-major order.
DomainPtr build_hex_box(int width, int height, FaceCoord origin = {0, 0});
// Same geometry as a box, tagged as a strip (width T, height L).
DomainPtr build_strip(int width, int height);
// Hexagon of side j+delta minus the hexagon of side j.
DomainPtr annulus(int side, int delta);
// Union of regular hexagons of a common side centred at the given faces.
DomainPtr translate_union(int side, std::span<const FaceCoord> centers);
// Same shape shifted by a lattice vector; arcs are carried along.
DomainPtr translate(const HexDomain& domain, FaceCoord offset);

// Arc faces of a regular hexagon of side j centred at `center`, ordered counterclockwise.
std::vector<FaceCoord> hexagon_arc_faces(int side, FaceCoord center, int arc_number);

// One cell of the partition of an arc into k contiguous runs whose lengths
// differ by at most one.
struct EdgePartition {
    Arc arc = Arc::A1;
    int k = 1;
    int index = 0;
};
// Throws ConfigError if k exceeds the arc length.
std::vector<int> partition_cell(std::span<const int> arc_faces, int k, int index);
std::vector<int> partition_cell(const HexDomain& domain, const EdgePartition& p);

// Number of interior adjacencies (unordered domain-domain neighbour pairs).
int interior_adjacency_count(const HexDomain& domain);

}  // namespace hexcross
