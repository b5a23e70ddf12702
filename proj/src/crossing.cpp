#include "hexcross/crossing.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>

#include "hexcross/errors.hpp"

namespace hexcross {

namespace {

std::vector<int> whole(const HexDomain& d) {
    std::vector<int> v(static_cast<std::size_t>(d.size()));
    std::iota(v.begin(), v.end(), 0);
    return v;
}

std::vector<int> merge_sets(std::initializer_list<const std::vector<int>*> parts) {
    std::set<int> s;
    for (const auto* p : parts) s.insert(p->begin(), p->end());
    return {s.begin(), s.end()};
}

struct Forest {
    std::vector<int> parent;
    explicit Forest(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            auto& p = parent[static_cast<std::size_t>(x)];
            p = parent[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(a)] = b;
    }
};

bool connected_uf(const SpinConfig& c, const CrossingEvent& ev, const std::vector<std::uint8_t>& in_region,
                  const std::vector<std::uint8_t>& is_target) {
    const HexDomain& d = c.domain();
    const int n = d.size();
    Forest f(n);
    auto ok = [&](int v) { return v < n && in_region[static_cast<std::size_t>(v)] && c.spin(v) == ev.spin; };
    bool any_source = false;
    for (int u : ev.source) any_source |= ok(u);
    if (!any_source) return false;
    for (int u = 0; u < n; ++u) {
        if (!ok(u)) continue;
        for (int v : d.ring(u))
            if (v > u && ok(v)) f.unite(u, v);
    }
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(n), 0);
    for (int u : ev.source)
        if (ok(u)) hit[static_cast<std::size_t>(f.find(u))] = 1;
    for (int u : ev.target)
        if (ok(u) && hit[static_cast<std::size_t>(f.find(u))]) return true;
    (void)is_target;
    return false;
}

std::vector<std::uint8_t> flags(int n, const std::vector<int>& members) {
    std::vector<std::uint8_t> f(static_cast<std::size_t>(n), 0);
    for (int u : members) {
        if (u < 0 || u >= n) throw ConfigError("event face index out of range");
        f[static_cast<std::size_t>(u)] = 1;
    }
    return f;
}

}  // namespace

CompiledEvent::CompiledEvent(const HexDomain& domain, CrossingEvent ev) : ev_(std::move(ev)) {
    const int n = domain.size();
    if (ev_.region.empty()) ev_.region = whole(domain);
    in_region_ = flags(n, ev_.region);
    is_target_ = flags(n, ev_.target);
    for (int u : ev_.source)
        if (!in_region_[static_cast<std::size_t>(u)]) throw ConfigError("event source leaves its region");
    for (int u : ev_.target)
        if (!in_region_[static_cast<std::size_t>(u)]) throw ConfigError("event target leaves its region");
    bitset_ = n <= 64;
    if (!bitset_) return;
    nbr_mask_.assign(static_cast<std::size_t>(n), 0);
    for (int u = 0; u < n; ++u)
        for (int v : domain.ring(u))
            if (v < n) nbr_mask_[static_cast<std::size_t>(u)] |= 1ULL << v;
    for (int u : ev_.region) region_mask_ |= 1ULL << u;
    for (int u : ev_.source) source_mask_ |= 1ULL << u;
    for (int u : ev_.target) target_mask_ |= 1ULL << u;
}

bool CompiledEvent::operator()(const SpinConfig& config) const {
    if (!bitset_) return union_find(config);
    const std::uint64_t plus = config.plus_bits()[0];
    const std::uint64_t ok = (ev_.spin == Spin::plus ? plus : ~plus) & region_mask_;
    std::uint64_t reach = source_mask_ & ok;
    std::uint64_t frontier = reach;
    while (frontier) {
        if (reach & target_mask_) return true;
        std::uint64_t grow = 0;
        for (std::uint64_t f = frontier; f; f &= f - 1) grow |= nbr_mask_[static_cast<std::size_t>(std::countr_zero(f))];
        frontier = grow & ok & ~reach;
        reach |= frontier;
    }
    return (reach & target_mask_) != 0;
}

bool CompiledEvent::union_find(const SpinConfig& config) const {
    return connected_uf(config, ev_, in_region_, is_target_);
}

bool connected(const SpinConfig& config, const CrossingEvent& ev) {
    const int n = config.size();
    const auto region = ev.region.empty() ? flags(n, whole(config.domain())) : flags(n, ev.region);
    return connected_uf(config, ev, region, flags(n, ev.target));
}

CrossingEvent horizontal_crossing(const HexDomain& d, Spin spin) {
    CrossingEvent ev;
    ev.spin = spin;
    ev.region = whole(d);
    ev.name = spin == Spin::plus ? "H+" : "H-";
    if (d.has_arc(Arc::Left) && d.has_arc(Arc::Right)) {
        ev.source = d.arc(Arc::Left);
        ev.target = d.arc(Arc::Right);
    } else if (d.has_arc(Arc::A1)) {
        ev.source = merge_sets({&d.arc(Arc::A2), &d.arc(Arc::A3)});
        ev.target = merge_sets({&d.arc(Arc::A5), &d.arc(Arc::A6)});
    } else {
        throw ConfigError("horizontal crossing needs a box or hexagon domain");
    }
    return ev;
}

CrossingEvent vertical_crossing(const HexDomain& d, Spin spin) {
    CrossingEvent ev;
    ev.spin = spin;
    ev.region = whole(d);
    ev.name = spin == Spin::plus ? "V+" : "V-";
    if (d.has_arc(Arc::Bottom) && d.has_arc(Arc::Top)) {
        ev.source = d.arc(Arc::Bottom);
        ev.target = d.arc(Arc::Top);
    } else if (d.has_arc(Arc::A1)) {
        ev.source = d.arc(Arc::A1);
        ev.target = d.arc(Arc::A4);
    } else {
        throw ConfigError("vertical crossing needs a box or hexagon domain");
    }
    return ev;
}

EventPredicate as_predicate(const HexDomain& domain, const CrossingEvent& ev) {
    auto compiled = std::make_shared<CompiledEvent>(domain, ev);
    return {ev.name, [compiled](const SpinConfig& c) { return (*compiled)(c); }, ev.spin == Spin::plus};
}

EventPredicate difference_predicate(const HexDomain& domain, const CrossingEvent& a, const CrossingEvent& b) {
    auto ca = std::make_shared<CompiledEvent>(domain, a);
    auto cb = std::make_shared<CompiledEvent>(domain, b);
    return {a.name + "\\" + b.name, [ca, cb](const SpinConfig& c) { return (*ca)(c) && !(*cb)(c); }, std::nullopt};
}

SixArmFamily six_arm_events(int side, int delta, int cells) {
    if (side < 1 || delta < 1 || cells < 1) throw ConfigError("six-arm events need positive side, shift and cell count");
    SixArmFamily fam;
    fam.side = side;
    fam.delta = delta;
    fam.cells = cells;
    const FaceCoord centers[3] = {{-delta, 0}, {0, 0}, {delta, 0}};
    fam.domain = translate_union(side, centers);
    const HexDomain& d = *fam.domain;

    auto indices = [&](const std::vector<FaceCoord>& faces) {
        std::vector<int> out;
        for (FaceCoord f : faces) out.push_back(d.index_of(f));
        return out;
    };
    auto hexagon = [&](FaceCoord c) {
        std::vector<int> out;
        for (int i = 0; i < d.size(); ++i)
            if (hex_norm(d.coord(i) - c) <= side) out.push_back(i);
        return out;
    };
    auto arc = [&](int which, int number) { return indices(hexagon_arc_faces(side, centers[which], number)); };

    fam.h_left = hexagon(centers[0]);
    fam.h_mid = hexagon(centers[1]);
    fam.h_right = hexagon(centers[2]);
    const std::vector<int> all = whole(d);
    const std::vector<int> bottom_mid = arc(1, 1);

    fam.vertical = {"V(H_j)", bottom_mid, arc(1, 4), fam.h_mid, Spin::plus};

    for (int cell = 0; cell < cells; ++cell) {
        const std::vector<int> source = partition_cell(bottom_mid, cells, cell);
        auto make = [&](const std::string& name, int which, int target, const std::vector<int>& region) {
            return CrossingEvent{name + "/" + std::to_string(cell), source, arc(which, target), region, Spin::plus};
        };
        // C_2, C_3 aim at the left translate, C_5, C_6 at the right one; C_4 stays inside H_j.
        const int base_side[7] = {0, 0, 0, 0, 1, 2, 2};
        for (int t = 2; t <= 6; ++t) {
            SixArmEvent ev;
            ev.target_arc = t;
            ev.cell = cell;
            ev.event = t == 4 ? make("C4", 1, 4, fam.h_mid) : make("C" + std::to_string(t), base_side[t], t, all);
            fam.base.push_back(ev);
        }
        for (int t : {2, 3, 5, 6}) {
            SixArmEvent ev;
            ev.target_arc = t;
            ev.cell = cell;
            ev.primed = true;
            const int other = base_side[t] == 0 ? 2 : 0;
            ev.event = make("C'" + std::to_string(t), other, t, all);
            ev.minus = make("C" + std::to_string(t), base_side[t], t, all);
            fam.primed.push_back(ev);
        }
        // C0 shifted onto the triple: a cell of the left translate's bottom arc
        // joined to the matching cells of H_j and H_{j+d} through the outer two.
        const std::vector<int> left_bottom = arc(0, 1), right_bottom = arc(2, 1);
        CrossingEvent c0;
        c0.name = "C0/" + std::to_string(cell);
        c0.source = partition_cell(left_bottom, cells, cell);
        const auto mid_cell = partition_cell(bottom_mid, cells, cell);
        const auto right_cell = partition_cell(right_bottom, cells, cell);
        c0.target = merge_sets({&mid_cell, &right_cell});
        c0.region = merge_sets({&fam.h_left, &fam.h_right, &mid_cell});
        fam.c0.push_back(c0);
    }
    return fam;
}

std::vector<int> component_volumes(const SpinConfig& config, Spin spin) {
    const HexDomain& d = config.domain();
    const int n = d.size();
    Forest f(n);
    for (int u = 0; u < n; ++u) {
        if (config.spin(u) != spin) continue;
        for (int v : d.ring(u))
            if (v < n && v > u && config.spin(v) == spin) f.unite(u, v);
    }
    std::vector<int> sizes(static_cast<std::size_t>(n), 0);
    for (int u = 0; u < n; ++u)
        if (config.spin(u) == spin) ++sizes[static_cast<std::size_t>(f.find(u))];
    std::vector<int> out;
    for (int s : sizes)
        if (s > 0) out.push_back(s);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

}  // namespace hexcross
