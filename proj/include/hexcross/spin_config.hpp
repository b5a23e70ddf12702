#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hexcross/boundary.hpp"
#include "hexcross/hexlat.hpp"
#include "hexcross/model.hpp"

namespace hexcross {

// Local changes produced by flipping one face.
struct FlipDelta {
    int de = 0;
    int dk = 0;
    int dr = 0;
    int dr_prime = 0;
};

struct ClusterDiagnostics {
    std::uint64_t local_resolutions = 0;  // decided from the neighbour ring alone
    std::uint64_t searches = 0;           // needed a bounded search
    std::uint64_t fallbacks = 0;          // search exceeded its budget, full recount
};

// Spin assignment on a domain together with its boundary condition and the
// cached statistics (e, k, r, r'), maintained incrementally under flips.
//
// Cluster count k counts constant-spin components of domain plus exterior
// ring; all exterior faces of one sign form a single virtual vertex. When
// cluster tracking is off (n = 1 needs no k) k is recomputed on demand.
//
// Single writer. Even const queries touch internal scratch space, so a
// config must not be read concurrently from several threads.
class SpinConfig {
public:
    SpinConfig(DomainPtr domain, const BoundaryCondition& bc, Spin fill = Spin::minus,
               bool track_clusters = true);
    SpinConfig(DomainPtr domain, const BoundaryCondition& bc, std::span<const Spin> spins,
               bool track_clusters = true);

    const HexDomain& domain() const { return *domain_; }
    const DomainPtr& domain_ptr() const { return domain_; }
    const BoundaryCondition& boundary() const { return bc_; }
    int size() const { return domain_->size(); }

    Spin spin(int face) const { return static_cast<Spin>(spins_[static_cast<std::size_t>(face)]); }
    // Spins of domain faces followed by the exterior ring, as -1/+1.
    std::span<const std::int8_t> extended_spins() const { return spins_; }
    std::vector<Spin> spins() const;
    // Bit i set iff domain face i is +.
    std::span<const std::uint64_t> plus_bits() const { return plus_bits_; }

    const SpinStats& stats() const;
    SpinStats recount() const;
    bool tracks_clusters() const { return track_clusters_; }

    // Change in k if `face` took `new_spin`. Local ring analysis first, then a
    // bounded multi-source search, then a full recount past the node budget.
    int delta_cluster_count(int face, Spin new_spin) const;
    // e, r, r' deltas of flipping `face`; k delta only when tracking.
    FlipDelta flip_delta(int face) const;

    void flip(int face);
    void set(int face, Spin s);
    void flip_with(int face, const FlipDelta& d);
    void assign(std::span<const Spin> spins);
    void fill(Spin s);

    void set_search_budget(int nodes) { budget_ = nodes; }
    const ClusterDiagnostics& cluster_diagnostics() const { return diag_; }

    // Components of the +/- graphs, exterior merged per sign; used by recount.
    std::int64_t count_clusters() const;

private:
    void init_boundary();
    void refresh_all();
    int local_dk(int face, Spin new_spin) const;
    // Number of distinct components among seed groups in the graph of
    // `spin`-faces with `excluded` removed; -1 when the budget is exhausted.
    struct RingGroups {
        static constexpr int kMax = 3;
        int count = 0;
        int size[kMax] = {};
        int node[kMax][6];
    };
    int count_groups(const RingGroups& groups, std::int8_t spin, int excluded) const;

    DomainPtr domain_;
    BoundaryCondition bc_;
    std::vector<std::int8_t> spins_;  // extended
    std::vector<std::uint64_t> plus_bits_;
    bool track_clusters_ = true;
    bool has_virtual_[2] = {false, false};  // [0] = minus, [1] = plus
    // Domain faces with at least one exterior neighbour of the given sign.
    std::vector<int> touches_[2];
    std::vector<std::uint8_t> touch_flag_[2];

    mutable SpinStats stats_;
    mutable bool k_valid_ = false;
    int budget_ = 512;

    // Search scratch.
    mutable std::vector<std::uint32_t> stamp_;
    mutable std::vector<std::int8_t> owner_;
    mutable std::uint32_t epoch_ = 0;
    mutable ClusterDiagnostics diag_;
};

}  // namespace hexcross
