#include "hexcross/exact.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "hexcross/errors.hpp"
#include "hexcross/parallel.hpp"
#include "hexcross/simd/kernels.hpp"

namespace hexcross {

namespace {

constexpr std::uint64_t kRecountInterval = 1u << 14;

simd::Coeffs to_simd(const ModelParams& p) {
    const LogCoeffs c = LogCoeffs::from(p);
    return {c.ln_n, c.ln_x, c.h, c.half_h_prime};
}

void require_increasing(const EnumerationTable& t, std::size_t ev) {
    const auto& a = t.events()[ev];
    if (a.monotone_increasing != true)
        throw PreconditionError("event '" + a.name + "' is not declared increasing");
    if (!t.is_increasing(ev))
        throw PreconditionError("event '" + a.name + "' is declared increasing but is not");
}

}  // namespace

EnumerationTable::EnumerationTable(DomainPtr domain, BoundaryCondition bc, std::vector<EventPredicate> events,
                                   ExactOptions opts)
    : domain_(std::move(domain)), bc_(std::move(bc)), events_(std::move(events)) {
    const int n = domain_->size();
    if (n > opts.cap || n > 40)
        throw SizeError("domain of " + std::to_string(n) + " faces exceeds the enumeration cap of " +
                        std::to_string(opts.cap));
    if (static_cast<int>(events_.size()) > kMaxEvents) throw ConfigError("too many events for one enumeration table");

    const std::size_t rows = std::size_t{1} << n;
    k_.resize(rows);
    e_.resize(rows);
    r_.resize(rows);
    rp_.resize(rows);
    masks_.assign(rows, 0);

    // Shards fix the top `b` faces; every shard walks the rest in Gray order.
    const int threads = thread_count(opts.threads);
    int b = 0;
    while (b < n && b < 8 && (1 << b) < 4 * threads) ++b;
    if (n - b < 4) b = std::max(0, n - 4);
    const int low = n - b;
    const std::size_t shard_rows = std::size_t{1} << low;

    parallel_for(std::size_t{1} << b, threads, [&](std::size_t shard) {
        std::vector<Spin> init(static_cast<std::size_t>(n), Spin::minus);
        for (int f = low; f < n; ++f)
            if ((shard >> (f - low)) & 1u) init[static_cast<std::size_t>(f)] = Spin::plus;
        SpinConfig cfg(domain_, bc_, init, true);
        for (std::size_t g = 0; g < shard_rows; ++g) {
            if (g > 0) cfg.flip(std::countr_zero(g));
            const std::size_t row = (shard << low) | (g ^ (g >> 1));
            const SpinStats& s = cfg.stats();
            if (g % kRecountInterval == kRecountInterval - 1 && !(s == cfg.recount()))
                throw std::logic_error("incremental statistics drifted during enumeration");
            k_[row] = static_cast<std::int16_t>(s.k);
            e_[row] = static_cast<std::int16_t>(s.e);
            r_[row] = static_cast<std::int16_t>(s.r);
            rp_[row] = static_cast<std::int16_t>(s.r_prime);
            std::uint64_t m = 0;
            for (std::size_t ev = 0; ev < events_.size(); ++ev)
                if (events_[ev](cfg)) m |= bit(ev);
            masks_[row] = m;
        }
    });
}

SpinStats EnumerationTable::stats(std::size_t row) const { return {e_[row], k_[row], r_[row], rp_[row]}; }

std::vector<double> EnumerationTable::log_weights(const ModelParams& params) const {
    std::vector<double> lw(rows());
    simd::kernels().affine_log_weights({k_.data(), e_.data(), r_.data(), rp_.data()}, rows(), to_simd(params), lw.data());
    return lw;
}

ExactMeasure EnumerationTable::measure(const ModelParams& params) const& { return ExactMeasure(*this, params); }

bool EnumerationTable::is_increasing(std::size_t event) const {
    const int n = domain_->size();
    const std::uint64_t b = bit(event);
    for (std::size_t row = 0; row < rows(); ++row) {
        if (!(masks_[row] & b)) continue;
        for (int f = 0; f < n; ++f) {
            const std::size_t up = row | (std::size_t{1} << f);
            if (up != row && !(masks_[up] & b)) return false;
        }
    }
    return true;
}

ExactMeasure::ExactMeasure(const EnumerationTable& table, const ModelParams& params)
    : table_(&table), w_(table.log_weights(params)) {
    const auto& kt = simd::kernels();
    const double shift = kt.max_value(w_.data(), w_.size());
    if (shift == kNegInf) {
        std::fill(w_.begin(), w_.end(), 0.0);
        total_ = 0;
        log_z_ = kNegInf;
        return;
    }
    kt.exp_shifted(w_.data(), w_.size(), shift);
    total_ = kt.masked_sum(w_.data(), table.masks().data(), w_.size(), 0);
    log_z_ = shift + std::log(total_);
}

double ExactMeasure::probability(std::uint64_t require) const {
    return simd::kernels().masked_sum(w_.data(), table_->masks().data(), w_.size(), require) / total_;
}

double ExactMeasure::total_probability() const {
    double s = 0, c = 0;
    for (const double w : w_) {
        const double x = w / total_;
        const double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    return s + c;
}

double partition_function_log(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                              ExactOptions opts) {
    const EnumerationTable table(std::move(domain), bc, {}, opts);
    return table.measure(params).log_partition();
}

double event_probability(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                         const EventPredicate& a, ExactOptions opts) {
    const EnumerationTable table(std::move(domain), bc, {a}, opts);
    return table.measure(params).event(0);
}

FkgResult check_fkg(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                    const EventPredicate& a, const EventPredicate& b, ExactOptions opts) {
    EnumerationTable t(std::move(domain), bc, {a, b}, opts);
    require_increasing(t, 0);
    require_increasing(t, 1);
    const ExactMeasure m = t.measure(params);
    FkgResult r;
    r.p_a = m.event(0);
    r.p_b = m.event(1);
    r.p_ab = m.probability(EnumerationTable::bit(0) | EnumerationTable::bit(1));
    r.margin = r.p_ab - r.p_a * r.p_b;
    r.regime_supported = params.is_fkg_regime();
    return r;
}

CbcResult check_cbc(DomainPtr domain, const ModelParams& params, const EventPredicate& a,
                    const BoundaryCondition& tau, const BoundaryCondition& tau_prime, ExactOptions opts) {
    if (!boundary_leq(*domain, tau, tau_prime))
        throw PreconditionError("boundary conditions are not ordered: " + tau.describe() + " vs " + tau_prime.describe());
    EnumerationTable lo(domain, tau, {a}, opts);
    require_increasing(lo, 0);
    EnumerationTable hi(domain, tau_prime, {a}, opts);
    CbcResult r;
    r.p_tau = lo.measure(params).event(0);
    r.p_tau_prime = hi.measure(params).event(0);
    r.margin = r.p_tau_prime - r.p_tau;
    r.regime_supported = params.is_fkg_regime();
    return r;
}

CbcFactorResult check_cbc_factor(DomainPtr domain, const ModelParams& params, const EventPredicate& a,
                                 const BoundaryCondition& tau, const BoundaryCondition& tau_prime,
                                 ExactOptions opts) {
    if (!boundary_leq(*domain, tau, tau_prime))
        throw PreconditionError("boundary conditions are not ordered: " + tau.describe() + " vs " + tau_prime.describe());
    EnumerationTable lo(domain, tau, {a}, opts);
    EnumerationTable hi(domain, tau_prime, {a}, opts);
    const auto lw_lo = lo.log_weights(params);
    const auto lw_hi = hi.log_weights(params);

    double up = kNegInf, down = kNegInf;  // log max of w'/w and of w/w'
    std::int64_t dk_max = INT64_MIN;
    for (std::size_t row = 0; row < lo.rows(); ++row) {
        if (lw_lo[row] != kNegInf) up = std::max(up, lw_hi[row] - lw_lo[row]);
        if (lw_hi[row] != kNegInf) down = std::max(down, lw_lo[row] - lw_hi[row]);
        dk_max = std::max(dk_max, hi.stats(row).k - lo.stats(row).k);
    }
    CbcFactorResult r;
    r.p_tau = lo.measure(params).event(0);
    r.p_tau_prime = hi.measure(params).event(0);
    r.factor = std::exp(up);
    r.margin = r.factor * r.p_tau_prime - r.p_tau;
    r.rigorous_factor = std::exp(up + down);
    r.rigorous_margin = r.rigorous_factor * r.p_tau_prime - r.p_tau;
    r.special_factor = std::pow(params.n, static_cast<double>(dk_max)) * params.x * std::exp(params.h);
    return r;
}

SmpResult check_smp(DomainPtr inner, DomainPtr outer, const ModelParams& params, const BoundaryCondition& bc_outer,
                    const EventPredicate& a, ExactOptions opts) {
    const int ni = inner->size(), no = outer->size();
    std::vector<int> inner_in_outer(static_cast<std::size_t>(ni));
    std::vector<std::uint8_t> is_inner(static_cast<std::size_t>(no), 0);
    for (int i = 0; i < ni; ++i) {
        const int o = outer->index_of(inner->coord(i));
        if (o < 0) throw PreconditionError("inner domain is not contained in the outer domain");
        inner_in_outer[static_cast<std::size_t>(i)] = o;
        is_inner[static_cast<std::size_t>(o)] = 1;
    }
    std::vector<int> rest;
    for (int o = 0; o < no; ++o)
        if (!is_inner[static_cast<std::size_t>(o)]) rest.push_back(o);

    // A evaluated on the inner restriction of each outer configuration.
    auto inner_cfg = std::make_shared<SpinConfig>(inner, BoundaryCondition::free(), Spin::minus, false);
    EventPredicate restricted{a.name, [&, inner_cfg](const SpinConfig& c) {
                                  std::vector<Spin> s(static_cast<std::size_t>(ni));
                                  for (int i = 0; i < ni; ++i) s[static_cast<std::size_t>(i)] = c.spin(inner_in_outer[static_cast<std::size_t>(i)]);
                                  inner_cfg->assign(s);
                                  return a(*inner_cfg);
                              },
                              std::nullopt};
    opts.threads = 1;  // the restriction shares one scratch config
    EnumerationTable outer_table(outer, bc_outer, {restricted}, opts);
    const auto lw = outer_table.log_weights(params);

    const std::size_t groups = std::size_t{1} << rest.size();
    auto group_of = [&](std::size_t row) {
        std::size_t g = 0;
        for (std::size_t j = 0; j < rest.size(); ++j)
            if ((row >> rest[j]) & 1u) g |= std::size_t{1} << j;
        return g;
    };
    std::vector<double> gmax(groups, kNegInf), sum(groups, 0), sum_a(groups, 0);
    for (std::size_t row = 0; row < outer_table.rows(); ++row) {
        const std::size_t g = group_of(row);
        gmax[g] = std::max(gmax[g], lw[row]);
    }
    for (std::size_t row = 0; row < outer_table.rows(); ++row) {
        const std::size_t g = group_of(row);
        if (gmax[g] == kNegInf) continue;
        const double w = std::exp(lw[row] - gmax[g]);
        sum[g] += w;
        if (outer_table.holds(row, 0)) sum_a[g] += w;
    }

    const auto outer_ext = bc_outer.resolve(*outer);
    SmpResult res;
    for (std::size_t g = 0; g < groups; ++g) {
        if (gmax[g] == kNegInf) continue;
        std::map<FaceCoord, Spin> ring;
        for (FaceCoord f : inner->exterior()) {
            const int o = outer->index_of(f);
            if (o >= 0) {
                const auto j = static_cast<std::size_t>(std::find(rest.begin(), rest.end(), o) - rest.begin());
                ring[f] = (g >> j) & 1u ? Spin::plus : Spin::minus;
            } else {
                const int x = outer->extended_index_of(f) - no;
                ring[f] = outer_ext[static_cast<std::size_t>(x)];
            }
        }
        EnumerationTable inner_table(inner, BoundaryCondition::explicit_spins(std::move(ring)), {a}, opts);
        const double p_inner = inner_table.measure(params).event(0);
        res.max_deviation = std::max(res.max_deviation, std::abs(sum_a[g] / sum[g] - p_inner));
        ++res.outside_configs;
    }
    return res;
}

ComplementarityResult check_complementarity(DomainPtr box, const ModelParams& params, ExactOptions opts) {
    const auto h_plus = as_predicate(*box, horizontal_crossing(*box, Spin::plus));
    const auto v_plus = as_predicate(*box, vertical_crossing(*box, Spin::plus));
    const auto v_minus = as_predicate(*box, vertical_crossing(*box, Spin::minus));
    EnumerationTable free_table(box, BoundaryCondition::free(), {h_plus, v_minus}, opts);
    EnumerationTable wired_table(box, BoundaryCondition::wired(), {v_plus}, opts);

    ComplementarityResult r;
    r.p_horizontal = free_table.measure(params).event(0);
    r.p_vertical = wired_table.measure(params.flipped()).event(0);
    r.deviation = std::abs(r.p_horizontal + r.p_vertical - 1.0);
    for (std::size_t row = 0; row < free_table.rows(); ++row)
        if (free_table.holds(row, 0) == free_table.holds(row, 1)) ++r.dichotomy_failures;
    return r;
}

UnionBoundReport check_union_bound(int side, int delta, int cells, const ModelParams& params,
                                   const BoundaryCondition& bc, int lambda, ExactOptions opts) {
    const SixArmFamily fam = six_arm_events(side, delta, cells);
    const HexDomain& d = *fam.domain;
    std::vector<EventPredicate> events{as_predicate(d, fam.vertical)};
    std::vector<std::size_t> union_members, c0_members;
    for (const auto& ev : fam.base) {
        if (ev.target_arc <= 4) union_members.push_back(events.size());
        events.push_back(as_predicate(d, ev.event));
    }
    for (const auto& ev : fam.c0) {
        c0_members.push_back(events.size());
        events.push_back(as_predicate(d, ev));
    }
    EnumerationTable table(fam.domain, bc, events, opts);
    const ExactMeasure m = table.measure(params);

    UnionBoundReport r;
    r.side = side;
    r.delta = delta;
    r.cells = cells;
    r.faces = d.size();
    r.mu_vertical = m.event(0);
    for (std::size_t i = 0; i < events.size(); ++i) r.probabilities.emplace_back(events[i].name, m.event(i));
    for (std::size_t i : union_members) r.best = std::max(r.best, m.event(i));
    for (std::size_t i : c0_members) r.mu_c0 = std::max(r.mu_c0, m.event(i));
    r.threshold = r.mu_vertical / (3.0 * cells);
    r.margin = r.best - r.threshold;
    r.holds = r.margin >= 0;
    r.c_fit = r.mu_vertical > 0 ? r.mu_c0 * std::pow(lambda, 5) / std::pow(r.mu_vertical, 5)
                                : std::numeric_limits<double>::infinity();
    return r;
}

}  // namespace hexcross
