#include "hexcross/spin_config.hpp"

#include <algorithm>
#include <climits>
#include <numeric>

#include "hexcross/errors.hpp"

namespace hexcross {

namespace {

// Union-find with path halving over a small dense index range.
struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            auto& p = parent[static_cast<std::size_t>(x)];
            p = parent[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        return true;
    }
};

constexpr int sign_slot(std::int8_t s) { return s > 0 ? 1 : 0; }

}  // namespace

SpinConfig::SpinConfig(DomainPtr domain, const BoundaryCondition& bc, Spin fill, bool track_clusters)
    : domain_(std::move(domain)), bc_(bc), track_clusters_(track_clusters) {
    spins_.assign(static_cast<std::size_t>(domain_->extended_size()), static_cast<std::int8_t>(fill));
    init_boundary();
    refresh_all();
}

SpinConfig::SpinConfig(DomainPtr domain, const BoundaryCondition& bc, std::span<const Spin> spins,
                       bool track_clusters)
    : domain_(std::move(domain)), bc_(bc), track_clusters_(track_clusters) {
    if (static_cast<int>(spins.size()) != domain_->size())
        throw ConfigError("spin array length does not match the domain");
    spins_.assign(static_cast<std::size_t>(domain_->extended_size()), -1);
    for (std::size_t i = 0; i < spins.size(); ++i) spins_[i] = static_cast<std::int8_t>(spins[i]);
    init_boundary();
    refresh_all();
}

void SpinConfig::init_boundary() {
    const int n = domain_->size();
    const auto ext = bc_.resolve(*domain_);
    for (std::size_t i = 0; i < ext.size(); ++i) {
        spins_[static_cast<std::size_t>(n) + i] = static_cast<std::int8_t>(ext[i]);
        has_virtual_[sign_slot(static_cast<std::int8_t>(ext[i]))] = true;
    }
    for (int slot = 0; slot < 2; ++slot) {
        touches_[slot].clear();
        touch_flag_[slot].assign(static_cast<std::size_t>(n), 0);
    }
    for (int u = 0; u < n; ++u) {
        for (int v : domain_->ring(u)) {
            if (v < n) continue;
            const int slot = sign_slot(spins_[static_cast<std::size_t>(v)]);
            if (!touch_flag_[slot][static_cast<std::size_t>(u)]) {
                touch_flag_[slot][static_cast<std::size_t>(u)] = 1;
                touches_[slot].push_back(u);
            }
        }
    }
    stamp_.assign(static_cast<std::size_t>(n) + 1, 0);
    owner_.assign(static_cast<std::size_t>(n) + 1, 0);
    epoch_ = 0;
}

void SpinConfig::refresh_all() {
    const int n = domain_->size();
    plus_bits_.assign((static_cast<std::size_t>(n) + 63) / 64, 0);
    for (int i = 0; i < n; ++i)
        if (spins_[static_cast<std::size_t>(i)] > 0)
            plus_bits_[static_cast<std::size_t>(i) / 64] |= 1ULL << (i % 64);
    SpinStats s;
    for (const DualEdge& e : domain_->dual_edges())
        if (spins_[static_cast<std::size_t>(e.a)] != spins_[static_cast<std::size_t>(e.b)]) ++s.e;
    for (int i = 0; i < n; ++i) s.r += spins_[static_cast<std::size_t>(i)];
    for (const auto& t : domain_->triangles()) {
        const auto a = spins_[static_cast<std::size_t>(t[0])];
        if (a == spins_[static_cast<std::size_t>(t[1])] && a == spins_[static_cast<std::size_t>(t[2])]) s.r_prime += a;
    }
    stats_ = s;
    k_valid_ = false;
    if (track_clusters_) {
        stats_.k = count_clusters();
        k_valid_ = true;
    }
}

std::vector<Spin> SpinConfig::spins() const {
    std::vector<Spin> out(static_cast<std::size_t>(size()));
    for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = spin(i);
    return out;
}

const SpinStats& SpinConfig::stats() const {
    if (!k_valid_) {
        stats_.k = count_clusters();
        k_valid_ = true;
    }
    return stats_;
}

SpinStats SpinConfig::recount() const {
    SpinStats s;
    for (const DualEdge& e : domain_->dual_edges())
        if (spins_[static_cast<std::size_t>(e.a)] != spins_[static_cast<std::size_t>(e.b)]) ++s.e;
    for (int i = 0; i < size(); ++i) s.r += spins_[static_cast<std::size_t>(i)];
    for (const auto& t : domain_->triangles()) {
        const auto a = spins_[static_cast<std::size_t>(t[0])];
        if (a == spins_[static_cast<std::size_t>(t[1])] && a == spins_[static_cast<std::size_t>(t[2])]) s.r_prime += a;
    }
    s.k = count_clusters();
    return s;
}

std::int64_t SpinConfig::count_clusters() const {
    const int n = size();
    DisjointSets ds(n + 2);
    for (int u = 0; u < n; ++u) {
        const auto su = spins_[static_cast<std::size_t>(u)];
        for (int v : domain_->ring(u)) {
            if (spins_[static_cast<std::size_t>(v)] != su) continue;
            if (v < n) {
                if (v > u) ds.unite(u, v);
            } else {
                ds.unite(u, n + sign_slot(su));
            }
        }
    }
    std::int64_t k = 0;
    for (int u = 0; u < n; ++u)
        if (ds.find(u) == u) ++k;
    for (int slot = 0; slot < 2; ++slot)
        if (has_virtual_[slot] && ds.find(n + slot) == n + slot) ++k;
    return k;
}

int SpinConfig::count_groups(const RingGroups& groups, std::int8_t spin, int excluded) const {
    const int n = size();
    const int g_count = groups.count;
    const int slot = sign_slot(spin);

    if (++epoch_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        epoch_ = 1;
    }
    int parent[RingGroups::kMax];
    for (int g = 0; g < g_count; ++g) parent[g] = g;
    auto find = [&](int g) {
        while (parent[g] != g) g = parent[g];
        return g;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };

    thread_local std::vector<int> queues[RingGroups::kMax];
    std::size_t heads[RingGroups::kMax] = {};
    for (int g = 0; g < g_count; ++g) queues[g].clear();

    auto visit = [&](int node, int g) {
        auto& st = stamp_[static_cast<std::size_t>(node)];
        if (st == epoch_) {
            unite(g, owner_[static_cast<std::size_t>(node)]);
        } else {
            st = epoch_;
            owner_[static_cast<std::size_t>(node)] = static_cast<std::int8_t>(g);
            queues[g].push_back(node);
        }
    };
    for (int g = 0; g < g_count; ++g)
        for (int i = 0; i < groups.size[g]; ++i) visit(groups.node[g][i], g);

    int expanded = 0;
    while (true) {
        // A merged set is finished once every member queue is drained.
        int sets = 0, unfinished = 0;
        for (int g = 0; g < g_count; ++g) {
            if (find(g) != g) continue;
            ++sets;
            bool open = false;
            for (int h = 0; h < g_count && !open; ++h)
                open = find(h) == g && heads[h] < queues[h].size();
            if (open) ++unfinished;
        }
        if (sets <= 1 || unfinished <= 1) return sets;

        for (int g = 0; g < g_count; ++g) {
            if (heads[g] >= queues[g].size()) continue;
            const int node = queues[g][heads[g]++];
            if (++expanded > budget_) return -1;
            if (node == n) {
                for (int u : touches_[slot])
                    if (u != excluded && spins_[static_cast<std::size_t>(u)] == spin) visit(u, g);
            } else {
                for (int v : domain_->ring(node)) {
                    if (spins_[static_cast<std::size_t>(v)] != spin) continue;
                    if (v < n) {
                        if (v != excluded) visit(v, g);
                    } else {
                        visit(n, g);
                    }
                }
            }
        }
    }
}

int SpinConfig::local_dk(int u, Spin new_spin) const {
    const int n = size();
    const auto& ring = domain_->ring(u);
    const auto s = spins_[static_cast<std::size_t>(u)];
    const auto t = static_cast<std::int8_t>(new_spin);
    if (s == t) return 0;

    std::int8_t c[6];
    for (int i = 0; i < 6; ++i) c[i] = spins_[static_cast<std::size_t>(ring[static_cast<std::size_t>(i)])];

    auto components = [&](std::int8_t want, int excluded) -> int {
        // Cyclic runs of `want` around the ring.
        int start = -1;
        for (int i = 0; i < 6; ++i)
            if (c[i] != want) {
                start = i;
                break;
            }
        RingGroups runs;
        if (start < 0) {
            runs.count = 1;
            for (int i = 0; i < 6; ++i) {
                const int v = ring[static_cast<std::size_t>(i)];
                runs.node[0][runs.size[0]++] = v < n ? v : n;
            }
        } else {
            bool in_run = false;
            for (int step = 1; step <= 6; ++step) {
                const int i = (start + step) % 6;
                if (c[i] == want) {
                    if (!in_run) {
                        ++runs.count;
                        in_run = true;
                    }
                    const int v = ring[static_cast<std::size_t>(i)];
                    const int g = runs.count - 1;
                    runs.node[g][runs.size[g]++] = v < n ? v : n;
                } else {
                    in_run = false;
                }
            }
        }
        if (runs.count <= 1) {
            ++diag_.local_resolutions;
            return runs.count;
        }
        // Runs touching the exterior share the virtual vertex.
        RingGroups groups;
        int virtual_group = -1;
        for (int g = 0; g < runs.count; ++g) {
            bool touches = false;
            for (int i = 0; i < runs.size[g]; ++i) touches |= runs.node[g][i] == n;
            int target;
            if (touches && virtual_group >= 0) {
                target = virtual_group;
            } else {
                target = groups.count++;
                if (touches) virtual_group = target;
            }
            for (int i = 0; i < runs.size[g]; ++i) groups.node[target][groups.size[target]++] = runs.node[g][i];
        }
        if (groups.count <= 1) {
            ++diag_.local_resolutions;
            return groups.count;
        }
        ++diag_.searches;
        return count_groups(groups, want, excluded);
    };

    const int m = components(t, u);
    if (m < 0) return INT_MIN;
    const int b = components(s, u);
    if (b < 0) return INT_MIN;
    return b - m;
}

int SpinConfig::delta_cluster_count(int face, Spin new_spin) const {
    if (spin(face) == new_spin) return 0;
    const int local = local_dk(face, new_spin);
    if (local != INT_MIN) return local;
    ++diag_.fallbacks;
    const std::int64_t before = stats().k;
    auto& self = const_cast<SpinConfig&>(*this);
    auto& slot = self.spins_[static_cast<std::size_t>(face)];
    const auto old = slot;
    slot = static_cast<std::int8_t>(new_spin);
    const std::int64_t after = count_clusters();
    slot = old;
    return static_cast<int>(after - before);
}

FlipDelta SpinConfig::flip_delta(int u) const {
    const auto& ring = domain_->ring(u);
    const int s = spins_[static_cast<std::size_t>(u)];
    const int t = -s;
    FlipDelta d;
    int same = 0;
    for (int v : ring) same += spins_[static_cast<std::size_t>(v)] == s;
    d.de = same - (6 - same);
    d.dr = 2 * t;
    for (std::size_t i = 0; i < 6; ++i) {
        const int a = spins_[static_cast<std::size_t>(ring[i])];
        const int b = spins_[static_cast<std::size_t>(ring[(i + 1) % 6])];
        if (a == t && b == t) d.dr_prime += t;
        if (a == s && b == s) d.dr_prime -= s;
    }
    if (track_clusters_) d.dk = delta_cluster_count(u, spin_of(t));
    return d;
}

void SpinConfig::flip_with(int face, const FlipDelta& d) {
    auto& v = spins_[static_cast<std::size_t>(face)];
    v = static_cast<std::int8_t>(-v);
    plus_bits_[static_cast<std::size_t>(face) / 64] ^= 1ULL << (face % 64);
    stats_.e += d.de;
    stats_.r += d.dr;
    stats_.r_prime += d.dr_prime;
    if (track_clusters_)
        stats_.k += d.dk;
    else
        k_valid_ = false;
}

void SpinConfig::flip(int face) { flip_with(face, flip_delta(face)); }

void SpinConfig::set(int face, Spin s) {
    if (spin(face) != s) flip(face);
}

void SpinConfig::assign(std::span<const Spin> spins) {
    if (static_cast<int>(spins.size()) != size()) throw ConfigError("spin array length does not match the domain");
    for (std::size_t i = 0; i < spins.size(); ++i) spins_[i] = static_cast<std::int8_t>(spins[i]);
    refresh_all();
}

void SpinConfig::fill(Spin s) {
    std::fill(spins_.begin(), spins_.begin() + size(), static_cast<std::int8_t>(s));
    refresh_all();
}

}  // namespace hexcross
