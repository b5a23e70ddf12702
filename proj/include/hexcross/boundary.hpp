#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "hexcross/hexlat.hpp"
#include "hexcross/model.hpp"

namespace hexcross {

// Exterior spin assignment. Free means every exterior face is -, wired +.
class BoundaryCondition {
public:
    struct Free {};
    struct Wired {};
    struct Explicit {
        std::map<FaceCoord, Spin> spins;
    };
    // Per-arc spins; exterior faces carrying no listed arc get `otherwise`.
    // A face tagged with several arcs is + if any of them is +.
    struct Mixed {
        std::map<Arc, Spin> arcs;
        Spin otherwise = Spin::minus;
    };
    // + on the exterior faces whose angular position (fraction of a full turn,
    // counterclockwise from straight down around the domain centroid) lies in
    // [begin, end), wrapping when begin > end; - elsewhere.
    struct Dobrushin {
        double begin = 0.0;
        double end = 0.5;
    };

    BoundaryCondition() = default;

    static BoundaryCondition free() { return BoundaryCondition(Free{}); }
    static BoundaryCondition wired() { return BoundaryCondition(Wired{}); }
    static BoundaryCondition explicit_spins(std::map<FaceCoord, Spin> spins) {
        return BoundaryCondition(Explicit{std::move(spins)});
    }
    static BoundaryCondition mixed(std::map<Arc, Spin> arcs, Spin otherwise = Spin::minus) {
        return BoundaryCondition(Mixed{std::move(arcs), otherwise});
    }
    static BoundaryCondition dobrushin(double begin, double end) {
        return BoundaryCondition(Dobrushin{begin, end});
    }
    // Wired along left, top and right, free along the bottom.
    static BoundaryCondition push_mixed();
    // The spin-flipped counterpart of push_mixed.
    static BoundaryCondition push_mixed_dual();

    // One spin per exterior-ring face, in the domain's exterior order.
    // Throws ConfigError when the condition cannot cover the ring.
    std::vector<Spin> resolve(const HexDomain& domain) const;

    // Spin-flipped boundary condition.
    BoundaryCondition flipped() const;

    std::string describe() const;

    const auto& variant() const { return v_; }

private:
    using Variant = std::variant<Free, Wired, Explicit, Mixed, Dobrushin>;
    explicit BoundaryCondition(Variant v) : v_(std::move(v)) {}
    Variant v_ = Free{};
};

// Pointwise order of the resolved exterior spins on this domain.
bool boundary_leq(const HexDomain& domain, const BoundaryCondition& a, const BoundaryCondition& b);

// Parses free | wired | mixed | mixed-dual | dobrushin:a,b | arcs:left=+,top=-,...
BoundaryCondition parse_boundary(const std::string& spec);

}  // namespace hexcross
