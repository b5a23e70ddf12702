#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hexcross/boundary.hpp"
#include "hexcross/crossing.hpp"
#include "hexcross/event.hpp"
#include "hexcross/hexlat.hpp"
#include "hexcross/model.hpp"

namespace hexcross {

struct ExactOptions {
    int cap = 22;      // largest domain (faces) that may be enumerated
    int threads = 0;   // 0: thread_count()
};

class ExactMeasure;

// Statistics and event indicators of every configuration of a domain under a
// fixed boundary condition. Row i is the configuration whose face f is + iff
// bit f of i is set. Built once by a Gray-code walk; independent of params.
class EnumerationTable {
public:
    static constexpr int kMaxEvents = 64;

    // Throws SizeError above opts.cap and ConfigError beyond kMaxEvents events.
    EnumerationTable(DomainPtr domain, BoundaryCondition bc, std::vector<EventPredicate> events = {},
                     ExactOptions opts = {});

    const HexDomain& domain() const { return *domain_; }
    const DomainPtr& domain_ptr() const { return domain_; }
    const BoundaryCondition& boundary() const { return bc_; }
    const std::vector<EventPredicate>& events() const { return events_; }
    std::size_t rows() const { return k_.size(); }

    SpinStats stats(std::size_t row) const;
    std::span<const std::uint64_t> masks() const { return masks_; }
    bool holds(std::size_t row, std::size_t event) const { return (masks_[row] >> event) & 1u; }
    static std::uint64_t bit(std::size_t event) { return 1ULL << event; }

    // Log-weights of every row under params, via the active SIMD table.
    std::vector<double> log_weights(const ModelParams& params) const;
    // The measure refers to this table, so temporaries cannot hand one out.
    ExactMeasure measure(const ModelParams& params) const&;
    ExactMeasure measure(const ModelParams& params) const&& = delete;

    // Exhaustive monotonicity check: turning any - into + never falsifies the event.
    bool is_increasing(std::size_t event) const;

private:
    DomainPtr domain_;
    BoundaryCondition bc_;
    std::vector<EventPredicate> events_;
    std::vector<std::int16_t> k_, e_, r_, rp_;
    std::vector<std::uint64_t> masks_;
};

// Unnormalised weights exp(log w - shift) of one table under one parameter point.
class ExactMeasure {
public:
    ExactMeasure(const EnumerationTable& table, const ModelParams& params);

    double log_partition() const { return log_z_; }
    // Probability that every event in `require` holds. Z = 0 gives NaN.
    double probability(std::uint64_t require) const;
    double event(std::size_t index) const { return probability(EnumerationTable::bit(index)); }
    // Normalised weight of one row.
    double row_probability(std::size_t row) const { return w_[row] / total_; }
    const std::vector<double>& weights() const { return w_; }
    double total() const { return total_; }
    // Compensated sum of every row probability.
    double total_probability() const;

private:
    const EnumerationTable* table_;
    std::vector<double> w_;
    double total_ = 0;
    double log_z_ = kNegInf;
};

double partition_function_log(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                              ExactOptions opts = {});
double event_probability(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                         const EventPredicate& a, ExactOptions opts = {});

struct FkgResult {
    double margin = 0;  // P[A and B] - P[A] P[B]
    double p_a = 0, p_b = 0, p_ab = 0;
    bool regime_supported = true;
};
// Throws PreconditionError unless both events are declared increasing and
// verified to be so on the domain.
FkgResult check_fkg(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                    const EventPredicate& a, const EventPredicate& b, ExactOptions opts = {});

struct CbcResult {
    double margin = 0;  // mu^tau'[A] - mu^tau[A]
    double p_tau = 0, p_tau_prime = 0;
    bool regime_supported = true;
};
// Throws PreconditionError when tau <= tau' fails pointwise or A is not increasing.
CbcResult check_cbc(DomainPtr domain, const ModelParams& params, const EventPredicate& a,
                    const BoundaryCondition& tau, const BoundaryCondition& tau_prime, ExactOptions opts = {});

struct CbcFactorResult {
    double factor = 1;            // max over configurations of w_tau'/w_tau
    double margin = 0;            // factor mu^tau'[A] - mu^tau[A]
    double special_factor = 1;    // max over configurations of n^{dk} x e^h
    double rigorous_factor = 1;   // max(w_tau/w_tau') max(w_tau'/w_tau)
    double rigorous_margin = 0;
    double p_tau = 0, p_tau_prime = 0;
};
CbcFactorResult check_cbc_factor(DomainPtr domain, const ModelParams& params, const EventPredicate& a,
                                 const BoundaryCondition& tau, const BoundaryCondition& tau_prime,
                                 ExactOptions opts = {});

struct SmpResult {
    double max_deviation = 0;
    int outside_configs = 0;  // boundary configurations with positive probability
};
// A must depend on the inner domain's spins only.
SmpResult check_smp(DomainPtr inner, DomainPtr outer, const ModelParams& params, const BoundaryCondition& bc_outer,
                    const EventPredicate& a, ExactOptions opts = {});

struct ComplementarityResult {
    double deviation = 0;     // |mu^0[H+] + mu^1[V+] - 1|, second measure with negated fields
    double p_horizontal = 0;
    double p_vertical = 0;
    std::uint64_t dichotomy_failures = 0;  // configurations with neither or both of H+ and V-
};
ComplementarityResult check_complementarity(DomainPtr box, const ModelParams& params, ExactOptions opts = {});

struct UnionBoundReport {
    int side = 1, delta = 1, cells = 1;
    int faces = 0;
    double mu_vertical = 0;
    double best = 0;       // max over C2, C3, C4 and all cells
    double threshold = 0;  // mu_vertical / (3 cells)
    double margin = 0;
    bool holds = false;
    double mu_c0 = 0;          // max over cells
    double c_fit = 0;          // mu_c0 lambda^5 / mu_vertical^5
    std::vector<std::pair<std::string, double>> probabilities;
};
UnionBoundReport check_union_bound(int side, int delta, int cells, const ModelParams& params,
                                   const BoundaryCondition& bc, int lambda = 2, ExactOptions opts = {});

}  // namespace hexcross
