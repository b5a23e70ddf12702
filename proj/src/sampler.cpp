#include "hexcross/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hexcross/errors.hpp"
#include "hexcross/parallel.hpp"

namespace hexcross {

namespace {

constexpr std::size_t kHistory = 16;

bool constant_boundary(const HexDomain& d, const BoundaryCondition& bc, Spin& value) {
    const auto ext = bc.resolve(d);
    if (ext.empty()) {
        value = Spin::minus;
        return true;
    }
    value = ext.front();
    return std::all_of(ext.begin(), ext.end(), [&](Spin s) { return s == value; });
}

}  // namespace

std::uint64_t SplitMix64::mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do v = next();
    while (v >= limit);
    return v % bound;
}

std::string to_string(UpdateKind u) { return u == UpdateKind::Wolff ? "wolff" : "heatbath"; }

UpdateKind update_from_string(const std::string& s) {
    if (s == "heatbath") return UpdateKind::HeatBath;
    if (s == "wolff") return UpdateKind::Wolff;
    throw ConfigError("unknown update kind '" + s + "'");
}

ChainState::ChainState(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc, std::uint64_t seed)
    : config_(domain, bc, Spin::minus, params.n != 1.0),
      params_(params),
      coeffs_(LogCoeffs::from(params)),
      rng_(seed),
      in_cluster_(static_cast<std::size_t>(domain->size()), 0) {
    Spin ground;
    if (params.x == 0 && !constant_boundary(*domain, bc, ground))
        throw ConfigError("x = 0 with a non-constant boundary condition admits no configuration");
}

const ChainDiagnostics& ChainState::diagnostics() const {
    diag_.clusters = config_.cluster_diagnostics();
    return diag_;
}

double ChainState::flip_log_ratio(const FlipDelta& d) const {
    double v = coeffs_.h * d.dr + coeffs_.half_h_prime * d.dr_prime;
    if (d.dk != 0) v += coeffs_.ln_n * d.dk;
    if (d.de != 0) v += coeffs_.ln_x * d.de;
    return v;
}

double ChainState::conditional_plus(int face) const {
    const double flip = 1.0 / (1.0 + std::exp(-flip_log_ratio(config_.flip_delta(face))));
    return config_.spin(face) == Spin::plus ? 1.0 - flip : flip;
}

void ChainState::heatbath_step(int face) {
    const FlipDelta d = config_.flip_delta(face);
    const double p = 1.0 / (1.0 + std::exp(-flip_log_ratio(d)));
    if (rng_.uniform() < p) {
        config_.flip_with(face, d);
        ++diag_.flips;
    }
}

void ChainState::sweep() {
    const int n = config_.size();
    for (int u = 0; u < n; ++u) heatbath_step(u);
    ++diag_.sweeps;
}

bool ChainState::wolff_step() {
    if (params_.n != 1.0 || params_.x > 1.0) throw PreconditionError("Wolff moves need n = 1 and x <= 1");
    const HexDomain& d = config_.domain();
    const int n = d.size();
    const double p_bond = 1.0 - params_.x;
    const int seed_face = static_cast<int>(rng_.below(static_cast<std::uint64_t>(n)));
    const auto s = static_cast<std::int8_t>(config_.spin(seed_face));
    const auto spins = config_.extended_spins();

    cluster_.clear();
    stack_.assign(1, seed_face);
    in_cluster_[static_cast<std::size_t>(seed_face)] = 1;
    while (!stack_.empty()) {
        const int u = stack_.back();
        stack_.pop_back();
        cluster_.push_back(u);
        for (int v : d.ring(u)) {
            if (v >= n || in_cluster_[static_cast<std::size_t>(v)] || spins[static_cast<std::size_t>(v)] != s) continue;
            if (rng_.uniform() < p_bond) {
                in_cluster_[static_cast<std::size_t>(v)] = 1;
                stack_.push_back(v);
            }
        }
    }

    // Interior edges are balanced by the bond probabilities; boundary edges,
    // the field and the triangle term go through a Metropolis test.
    auto in_c = [&](int v) { return v < n && in_cluster_[static_cast<std::size_t>(v)]; };
    auto after = [&](int v) { return in_c(v) ? -spins[static_cast<std::size_t>(v)] : spins[static_cast<std::size_t>(v)]; };
    std::int64_t de_boundary = 0, dr_prime = 0;
    for (int u : cluster_) {
        const auto& ring = d.ring(u);
        for (int i = 0; i < 6; ++i) {
            const int v = ring[static_cast<std::size_t>(i)];
            if (v >= n) de_boundary += (spins[static_cast<std::size_t>(v)] != -s) - (spins[static_cast<std::size_t>(v)] != s);
            const int w = ring[static_cast<std::size_t>((i + 1) % 6)];
            if ((in_c(v) && v < u) || (in_c(w) && w < u)) continue;
            const int a0 = s, b0 = spins[static_cast<std::size_t>(v)], c0 = spins[static_cast<std::size_t>(w)];
            const int a1 = -s, b1 = after(v), c1 = after(w);
            dr_prime += (a1 == b1 && a1 == c1 ? a1 : 0) - (a0 == b0 && a0 == c0 ? a0 : 0);
        }
    }
    const std::int64_t dr = -2 * static_cast<std::int64_t>(s) * static_cast<std::int64_t>(cluster_.size());
    double log_ratio = coeffs_.h * static_cast<double>(dr) + coeffs_.half_h_prime * static_cast<double>(dr_prime);
    if (de_boundary != 0) log_ratio += coeffs_.ln_x * static_cast<double>(de_boundary);

    ++diag_.cluster_moves;
    const bool accept = log_ratio >= 0 || rng_.uniform() < std::exp(log_ratio);
    for (int u : cluster_) {
        in_cluster_[static_cast<std::size_t>(u)] = 0;
        if (accept) config_.flip(u);
    }
    if (accept) {
        ++diag_.cluster_accepted;
        diag_.flips += static_cast<std::int64_t>(cluster_.size());
    }
    return accept;
}

void ChainState::checkpoint() {
    const SpinStats cached = config_.stats();
    const SpinStats fresh = config_.recount();
    if (!(cached == fresh)) throw std::logic_error("cached statistics differ from a full recount");
    ++diag_.checkpoints;
    if (history_.size() == kHistory) history_.erase(history_.begin());
    history_.push_back(fresh);
}

InitialState initial_state(int chain) {
    switch (chain % 3) {
        case 0: return InitialState::AllPlus;
        case 1: return InitialState::AllMinus;
        default: return InitialState::Random;
    }
}

std::uint64_t chain_seed(std::uint64_t seed, int chain) { return SplitMix64::mix(seed + static_cast<std::uint64_t>(chain)); }

std::uint64_t job_seed(std::uint64_t seed, std::uint64_t job) {
    return SplitMix64::mix(seed ^ SplitMix64::mix(job + 0x632be59bd9b4e019ULL));
}

Estimate reduce_batch_means(const std::vector<std::vector<double>>& chains, int batches) {
    if (chains.empty()) throw ConfigError("no chains to reduce");
    Estimate est;
    double total = 0, total_sq = 0, err_sq = 0;
    for (const auto& xs : chains) {
        const std::size_t len = xs.size();
        if (len < 2) throw ConfigError("each chain needs at least two kept samples");
        const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(std::max(2, batches)), len);
        const std::size_t per = len / b;
        double mean = 0;
        for (double v : xs) {
            mean += v;
            total += v;
            total_sq += v * v;
        }
        mean /= static_cast<double>(len);
        std::vector<double> bm(b, 0.0);
        for (std::size_t i = 0; i < b; ++i) {
            for (std::size_t j = 0; j < per; ++j) bm[i] += xs[i * per + j];
            bm[i] /= static_cast<double>(per);
        }
        double bmean = 0;
        for (double v : bm) bmean += v;
        bmean /= static_cast<double>(b);
        double var = 0;
        for (double v : bm) var += (v - bmean) * (v - bmean);
        var /= static_cast<double>(b - 1);
        const double se = std::sqrt(var / static_cast<double>(b));
        est.chain_means.push_back(mean);
        est.chain_errors.push_back(se);
        err_sq += se * se;
        est.n_samples += static_cast<std::int64_t>(len);
    }
    const double c = static_cast<double>(chains.size());
    double mean = 0;
    for (double m : est.chain_means) mean += m;
    est.mean = mean / c;
    est.std_error = std::sqrt(err_sq) / c;

    const double n = static_cast<double>(est.n_samples);
    const double var = std::max(0.0, total_sq / n - (total / n) * (total / n));
    est.autocorrelation_time = var > 0 ? n * est.std_error * est.std_error / (2.0 * var) : 0.5;

    for (std::size_t a = 0; a < chains.size(); ++a)
        for (std::size_t b = a + 1; b < chains.size(); ++b) {
            const double se = std::hypot(est.chain_errors[a], est.chain_errors[b]);
            if (std::abs(est.chain_means[a] - est.chain_means[b]) > 4.0 * se) est.converged = false;
        }
    return est;
}

SampleRun sample_observables(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                             std::size_t observable_count, const Observables& observe, const Schedule& sch) {
    if (sch.chains < 1 || sch.sweeps < 1 || sch.thin < 1 || sch.burn_in < 0)
        throw ConfigError("sampling schedule needs chains, sweeps, thin >= 1 and burn_in >= 0");
    if (sch.update == UpdateKind::Wolff && (params.n != 1.0 || params.x > 1.0))
        throw ConfigError("Wolff updates need n = 1 and x <= 1");

    const auto chains = static_cast<std::size_t>(sch.chains);
    std::vector<std::vector<std::vector<double>>> series(chains);  // [chain][observable][sample]
    std::vector<ChainDiagnostics> diags(chains);

    parallel_for(chains, thread_count(sch.threads), [&](std::size_t c) {
        ChainState chain(domain, params, bc, chain_seed(sch.seed, static_cast<int>(c)));
        SpinConfig& cfg = chain.config();
        Spin ground;
        if (params.x == 0 && constant_boundary(*domain, bc, ground)) {
            cfg.fill(ground);
        } else {
            switch (initial_state(static_cast<int>(c))) {
                case InitialState::AllPlus: cfg.fill(Spin::plus); break;
                case InitialState::AllMinus: cfg.fill(Spin::minus); break;
                case InitialState::Random: {
                    std::vector<Spin> s(static_cast<std::size_t>(cfg.size()));
                    for (auto& v : s) v = chain.rng().next() >> 63 ? Spin::plus : Spin::minus;
                    cfg.assign(s);
                    break;
                }
            }
        }

        auto& out = series[c];
        out.assign(observable_count, {});
        for (auto& v : out) v.reserve(static_cast<std::size_t>(sch.sweeps / sch.thin));
        std::vector<double> values(observable_count);
        const int n = cfg.size();
        const int total = sch.burn_in + sch.sweeps;
        // Clusters per sweep: until ~n faces visited during burn-in, then the burn-in average.
        std::int64_t burn_moves = 0;
        int moves_per_sweep = 1;
        for (int t = 1; t <= total; ++t) {
            chain.sweep();
            if (sch.update == UpdateKind::Wolff) {
                if (t <= sch.burn_in) {
                    for (int touched = 0; touched < n; ++burn_moves) {
                        chain.wolff_step();
                        touched += chain.last_cluster_size();
                    }
                    if (t == sch.burn_in)
                        moves_per_sweep = std::max<int>(1, static_cast<int>(std::lround(static_cast<double>(burn_moves) / t)));
                } else {
                    for (int m = 0; m < moves_per_sweep; ++m) chain.wolff_step();
                }
            }
            if (sch.checkpoint_every > 0 && t % sch.checkpoint_every == 0) chain.checkpoint();
            if (t > sch.burn_in && (t - sch.burn_in) % sch.thin == 0) {
                observe(cfg, values);
                for (std::size_t i = 0; i < observable_count; ++i) out[i].push_back(values[i]);
            }
        }
        diags[c] = chain.diagnostics();
    });

    SampleRun run;
    run.chains = diags;
    for (std::size_t i = 0; i < observable_count; ++i) {
        std::vector<std::vector<double>> per_chain(chains);
        for (std::size_t c = 0; c < chains; ++c) per_chain[c] = std::move(series[c][i]);
        Estimate e = reduce_batch_means(per_chain, sch.batches);
        for (std::size_t c = 0; c < chains; ++c) e.seeds.push_back(chain_seed(sch.seed, static_cast<int>(c)));
        run.converged = run.converged && e.converged;
        run.estimates.push_back(std::move(e));
    }
    return run;
}

std::vector<Estimate> estimate_events(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                                      const std::vector<EventPredicate>& events, const Schedule& schedule) {
    auto observe = [&](const SpinConfig& c, std::vector<double>& out) {
        for (std::size_t i = 0; i < events.size(); ++i) out[i] = events[i](c) ? 1.0 : 0.0;
    };
    return sample_observables(std::move(domain), params, bc, events.size(), observe, schedule).estimates;
}

Estimate estimate_event(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                        const EventPredicate& a, const Schedule& schedule) {
    return estimate_events(std::move(domain), params, bc, {a}, schedule).front();
}

}  // namespace hexcross
