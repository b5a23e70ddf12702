#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hexcross/event.hpp"
#include "hexcross/hexlat.hpp"
#include "hexcross/spin_config.hpp"

namespace hexcross {

// Path event: faces of `spin` inside `region` join some source face to some
// target face. Face lists are domain indices. Empty region means whole domain.
struct CrossingEvent {
    std::string name;
    std::vector<int> source;
    std::vector<int> target;
    std::vector<int> region;
    Spin spin = Spin::plus;
};

// Union-find over the region, rebuilt per call.
bool connected(const SpinConfig& config, const CrossingEvent& ev);

// Precomputed form for repeated queries on one domain. Domains of at most 64
// faces use a bitset flood fill, larger ones the union-find path.
class CompiledEvent {
public:
    CompiledEvent(const HexDomain& domain, CrossingEvent ev);

    bool operator()(const SpinConfig& config) const;
    bool union_find(const SpinConfig& config) const;
    bool uses_bitset() const { return bitset_; }
    const CrossingEvent& event() const { return ev_; }

private:
    CrossingEvent ev_;
    bool bitset_ = false;
    std::uint64_t region_mask_ = 0, source_mask_ = 0, target_mask_ = 0;
    std::vector<std::uint64_t> nbr_mask_;
    std::vector<std::uint8_t> in_region_, is_target_;
};

// Boxes and strips: Left -> Right and Bottom -> Top. Regular hexagons: arcs
// {2,3} -> {5,6} and arc 1 -> arc 4. Throws ConfigError otherwise.
CrossingEvent horizontal_crossing(const HexDomain& domain, Spin spin = Spin::plus);
CrossingEvent vertical_crossing(const HexDomain& domain, Spin spin = Spin::plus);

EventPredicate as_predicate(const HexDomain& domain, const CrossingEvent& ev);
// A minus B for two path events.
EventPredicate difference_predicate(const HexDomain& domain, const CrossingEvent& a, const CrossingEvent& b);

// Crossing events around a hexagon H_j (side j, centred at the origin) and
// its horizontal translates H_{j-d} and H_{j+d} by d faces. The domain is the
// union of the three.
struct SixArmEvent {
    int target_arc = 0;  // 2..6
    int cell = 0;
    bool primed = false;
    CrossingEvent event;
    std::optional<CrossingEvent> minus;  // primed events: event minus this one
};

struct SixArmFamily {
    int side = 1;
    int delta = 1;
    int cells = 1;
    DomainPtr domain;
    std::vector<int> h_left, h_mid, h_right;  // faces of each translate
    std::vector<SixArmEvent> base;    // cells x targets 2..6
    std::vector<SixArmEvent> primed;  // cells x targets {2,3,5,6}
    CrossingEvent vertical;            // arc 1 -> arc 4 inside H_j
    std::vector<CrossingEvent> c0;     // per cell of the left translate
};

SixArmFamily six_arm_events(int side, int delta, int cells);

// Sizes of the maximal `spin` components of the domain, sorted descending.
std::vector<int> component_volumes(const SpinConfig& config, Spin spin);

}  // namespace hexcross
