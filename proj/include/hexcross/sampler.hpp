#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hexcross/boundary.hpp"
#include "hexcross/event.hpp"
#include "hexcross/hexlat.hpp"
#include "hexcross/model.hpp"
#include "hexcross/spin_config.hpp"

namespace hexcross {

// SplitMix64: a Weyl counter passed through a bijective mixer, so the state
// is a plain 64-bit counter.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}
    std::uint64_t next();
    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // Uniform in [0, bound).
    std::uint64_t below(std::uint64_t bound);
    std::uint64_t state() const { return state_; }

    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t state_;
};

enum class UpdateKind {
    HeatBath,
    // Heat-bath sweep followed by Wolff clusters; n = 1 and x <= 1 only.
    Wolff,
};

std::string to_string(UpdateKind u);
UpdateKind update_from_string(const std::string& s);

struct Schedule {
    int burn_in = 1000;
    int sweeps = 10000;
    int thin = 1;
    int chains = 3;
    std::uint64_t seed = 1;
    int batches = 20;
    int checkpoint_every = 100;
    UpdateKind update = UpdateKind::HeatBath;
    int threads = 0;  // 0: thread_count()
};

struct Estimate {
    double mean = 0;
    double std_error = 0;
    std::int64_t n_samples = 0;
    double autocorrelation_time = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> chain_means;
    std::vector<double> chain_errors;
    bool converged = true;
};

struct ChainDiagnostics {
    std::int64_t sweeps = 0;
    std::int64_t checkpoints = 0;
    std::int64_t flips = 0;
    std::int64_t cluster_moves = 0;
    std::int64_t cluster_accepted = 0;
    ClusterDiagnostics clusters;
};

// One Markov chain on the spin measure.
class ChainState {
public:
    ChainState(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc, std::uint64_t seed);

    SpinConfig& config() { return config_; }
    const SpinConfig& config() const { return config_; }
    const ModelParams& params() const { return params_; }
    SplitMix64& rng() { return rng_; }
    std::int64_t sweep_count() const { return diag_.sweeps; }
    const ChainDiagnostics& diagnostics() const;
    // Last few checkpoint statistics, oldest first.
    const std::vector<SpinStats>& history() const { return history_; }

    // Probability that `face` is + under its exact conditional distribution.
    double conditional_plus(int face) const;
    void heatbath_step(int face);
    void sweep();
    // One Wolff cluster move; returns true when the cluster flipped.
    bool wolff_step();
    int last_cluster_size() const { return static_cast<int>(cluster_.size()); }
    // Throws std::logic_error when cached statistics differ from a recount.
    void checkpoint();

private:
    double flip_log_ratio(const FlipDelta& d) const;

    SpinConfig config_;
    ModelParams params_;
    LogCoeffs coeffs_;
    SplitMix64 rng_;
    mutable ChainDiagnostics diag_;
    std::vector<SpinStats> history_;
    std::vector<int> cluster_, stack_;
    std::vector<std::uint8_t> in_cluster_;
};

enum class InitialState { AllPlus, AllMinus, Random };
// Chain c starts AllPlus, AllMinus, Random, AllPlus, ... by c mod 3.
InitialState initial_state(int chain);
std::uint64_t chain_seed(std::uint64_t seed, int chain);
// Seed of an independent job (grid point, schedule entry) derived from a run seed.
std::uint64_t job_seed(std::uint64_t seed, std::uint64_t job);

// Real-valued observables recorded once per kept sample.
using Observables = std::function<void(const SpinConfig&, std::vector<double>&)>;

struct SampleRun {
    std::vector<Estimate> estimates;  // one per observable
    std::vector<ChainDiagnostics> chains;
    bool converged = true;
};

// Runs schedule.chains independent chains (in parallel) and reduces each
// observable with batch means. Results do not depend on the thread count.
SampleRun sample_observables(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                             std::size_t observable_count, const Observables& observe, const Schedule& schedule);

Estimate estimate_event(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                        const EventPredicate& a, const Schedule& schedule);
std::vector<Estimate> estimate_events(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                                      const std::vector<EventPredicate>& events, const Schedule& schedule);

// Batch-means reduction of per-chain sample series; exposed for testing.
Estimate reduce_batch_means(const std::vector<std::vector<double>>& chains, int batches);

}  // namespace hexcross
