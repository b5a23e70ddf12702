#include "hexcross/density.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "hexcross/crossing.hpp"
#include "hexcross/errors.hpp"
#include "hexcross/exact.hpp"

namespace hexcross {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Estimate exact_estimate(double p) {
    Estimate e;
    e.mean = p;
    return e;
}

Estimate probability(DomainPtr domain, const ModelParams& params, const BoundaryCondition& bc,
                     const EventPredicate& a, const Schedule& schedule, int exact_cap) {
    if (domain->size() <= exact_cap) {
        ExactOptions opts;
        opts.cap = exact_cap;
        opts.threads = schedule.threads;
        return exact_estimate(event_probability(domain, params, bc, a, opts));
    }
    return estimate_event(domain, params, bc, a, schedule);
}

Schedule with_seed(Schedule s, std::uint64_t job) {
    s.seed = job_seed(s.seed, job);
    return s;
}

EventPredicate no_vertical(const HexDomain& d) { return negation(as_predicate(d, vertical_crossing(d))); }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double log_base(double v, int lambda) { return std::log(v) / std::log(static_cast<double>(lambda)); }

std::vector<std::int64_t> sample_counts(const std::vector<Estimate>& es) {
    std::vector<std::int64_t> out;
    for (const auto& e : es) out.push_back(e.n_samples);
    return out;
}

}  // namespace

std::string to_string(StripMode m) {
    return m == StripMode::FreeHorizontal ? "free-horizontal" : "wired-vertical-complement";
}

std::string to_string(PushKind k) {
    switch (k) {
        case PushKind::Primal: return "push-primal";
        case PushKind::Dual: return "push-dual";
        case PushKind::StripPrimal: return "push-strip";
    }
    return "?";
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "Subcritical";
        case Regime::Supercritical: return "Supercritical";
        case Regime::ContinuousCritical: return "ContinuousCritical";
        case Regime::DiscontinuousCritical: return "DiscontinuousCritical";
        case Regime::Undetermined: return "Undetermined";
    }
    return "?";
}

DensityCurve density_curve(int n, int stretch, int lambda, StripMode mode, std::vector<int> rho,
                           std::vector<Estimate> raw, int tail) {
    if (rho.size() != raw.size() || rho.size() < 2) throw ConfigError("a density curve needs at least two rho values");
    if (!std::is_sorted(rho.begin(), rho.end()) || std::adjacent_find(rho.begin(), rho.end()) != rho.end() || rho[0] < 1)
        throw ConfigError("rho values must be positive and strictly increasing");
    DensityCurve c;
    c.n = n;
    c.stretch = stretch;
    c.lambda = lambda;
    c.height = lambda * stretch;
    c.mode = mode;
    c.rho = std::move(rho);
    c.raw = std::move(raw);
    for (std::size_t i = 0; i < c.rho.size(); ++i) {
        c.densities.push_back(std::pow(clamp01(c.raw[i].mean), 1.0 / c.rho[i]));
        c.flagged = c.flagged || !c.raw[i].converged;
    }

    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(2, tail)), c.rho.size());
    const std::size_t first = c.rho.size() - k;
    std::vector<double> xs, ys, var;
    for (std::size_t i = first; i < c.rho.size(); ++i) {
        const double p = clamp01(c.raw[i].mean);
        if (p <= 0) {
            c.extrapolated = 0;
            c.extrapolated_error = 0;
            return c;
        }
        xs.push_back(c.rho[i]);
        ys.push_back(std::log(p));
        var.push_back(std::pow(c.raw[i].std_error / p, 2));
    }
    const LinearFit f = fit_line(xs, ys);
    double mx = 0;
    for (double x : xs) mx += x;
    mx /= static_cast<double>(xs.size());
    double sxx = 0;
    for (double x : xs) sxx += (x - mx) * (x - mx);
    double slope_var = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) slope_var += std::pow((xs[i] - mx) / sxx, 2) * var[i];
    const double d = std::exp(f.slope);
    c.extrapolated = clamp01(d);
    c.extrapolated_error = d * std::sqrt(slope_var);
    return c;
}

DensityCurve strip_density(const ModelParams& params, int n, StripMode mode, const std::vector<int>& rho,
                           const Schedule& schedule, const DensityOptions& opts) {
    if (n < 1 || opts.lambda < 1 || opts.stretch < 1) throw ConfigError("strip density needs positive n, lambda, stretch");
    const int height = opts.height_override > 0 ? opts.height_override : opts.lambda * opts.stretch;
    std::vector<Estimate> raw;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const DomainPtr box = build_hex_box(rho[i] * n, height);
        const bool horizontal = mode == StripMode::FreeHorizontal;
        const auto bc = horizontal ? BoundaryCondition::free() : BoundaryCondition::wired();
        const auto event = horizontal ? as_predicate(*box, horizontal_crossing(*box)) : no_vertical(*box);
        raw.push_back(probability(box, params, bc, event, with_seed(schedule, i), opts.exact_cap));
    }
    DensityCurve c = density_curve(n, opts.stretch, opts.lambda, mode, rho, std::move(raw), opts.tail);
    c.height = height;
    return c;
}

StripInequalityReport check_strip_inequality(const DensityCurve& p, const DensityCurve& q, int lambda) {
    if (p.n != q.n || p.stretch != q.stretch) throw ConfigError("strip inequality needs curves with the same n and stretch");
    if (lambda < 2) throw ConfigError("lambda must be at least 2");
    const double s = p.stretch;
    const double a = s + s / lambda;
    auto smallest_c = [&](double lhs, double rhs_base, bool& finite) {
        const double rhs = std::pow(rhs_base, a);
        if (rhs <= 0) return 0.0;
        if (lhs <= 0) {
            finite = false;
            return kInf;
        }
        return std::max(0.0, log_base(rhs / lhs, lambda));
    };
    StripInequalityReport r;
    bool fp = true, fq = true;
    r.c_p = smallest_c(p.extrapolated, q.extrapolated, fp);
    r.c_q = smallest_c(q.extrapolated, p.extrapolated, fq);
    r.finite = fp && fq;
    r.flagged = !r.finite || p.flagged || q.flagged;
    return r;
}

RenormReport check_renorm_inequality(const DensityCurve& curve_n, const DensityCurve& curve_3n, int lambda) {
    if (lambda < 2) throw ConfigError("lambda must be at least 2");
    if (curve_3n.n != 3 * curve_n.n) throw ConfigError("renormalisation needs curves at scales n and 3n");
    const double vn = curve_n.extrapolated, v3 = curve_3n.extrapolated;
    const double bound = std::pow(vn, 3.0 - 9.0 / lambda);
    RenormReport r;
    if (v3 <= 0) {
        r.c = 0;
    } else if (bound <= 0) {
        r.c = kInf;
        r.finite = false;
    } else {
        r.c = std::max(0.0, log_base(v3 / bound, lambda));
    }
    const double b = curve_n.stretch - static_cast<double>(curve_n.n) * curve_n.stretch / lambda;
    if (vn > 0) {
        r.displayed_c_max = (1.0 - b) * log_base(vn, lambda);
    } else {
        r.displayed_c_max = 1.0 - b < 0 ? kInf : (1.0 - b > 0 ? -kInf : kInf);
    }
    r.flagged = !r.finite || curve_n.flagged || curve_3n.flagged;
    return r;
}

PushReport push_probe(const ModelParams& params, PushKind kind, int n, const std::vector<int>& rho,
                      const Schedule& schedule, const DensityOptions& opts) {
    if (rho.empty()) throw ConfigError("push probe needs at least one rho value");
    const int height = opts.height_override > 0 ? opts.height_override : opts.lambda * opts.stretch;
    PushReport r;
    r.kind = kind;
    r.rho = rho;
    r.c1 = 1.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        DomainPtr d;
        BoundaryCondition bc;
        EventPredicate ev;
        switch (kind) {
            case PushKind::Primal:
                d = build_hex_box(rho[i] * n, height);
                bc = BoundaryCondition::push_mixed();
                ev = as_predicate(*d, horizontal_crossing(*d));
                break;
            case PushKind::Dual:
                d = build_hex_box(rho[i] * n, height);
                bc = BoundaryCondition::push_mixed_dual();
                ev = no_vertical(*d);
                break;
            case PushKind::StripPrimal:
                d = build_strip(rho[i] * n, height);
                bc = BoundaryCondition::push_mixed_dual();
                ev = as_predicate(*d, horizontal_crossing(*d));
                break;
        }
        const Estimate e = probability(d, params, bc, ev, with_seed(schedule, 100 + i), opts.exact_cap);
        r.flagged = r.flagged || !e.converged;
        r.c1 = std::min(r.c1, std::pow(clamp01(e.mean), 1.0 / rho[i]));
        r.raw.push_back(e);
    }
    return r;
}

PushDisjunction push_disjunction(const ModelParams& params, int n, const std::vector<int>& rho,
                                 const Schedule& schedule, const DensityOptions& opts) {
    PushDisjunction d;
    d.primal = push_probe(params, PushKind::Primal, n, rho, schedule, opts);
    d.dual = push_probe(params, PushKind::Dual, n, rho, schedule, opts);
    d.holds = d.primal.c1 > 0 || d.dual.c1 > 0;
    return d;
}

DecayClause decay_clause(const std::vector<int>& sizes, const std::vector<double>& values,
                         const std::vector<std::int64_t>& samples, const PhaseThresholds& t) {
    if (sizes.size() != values.size() || sizes.size() < 2) throw ConfigError("decay clause needs matching sizes and values");
    DecayClause c;
    c.values = values;
    // All zero, or a non-increasing resolved prefix followed by at least two
    // zeros: the decay has dropped below what the samples can resolve.
    const auto first_zero = std::find_if(values.begin(), values.end(), [](double v) { return v <= 0; });
    const bool zero_tail = std::all_of(first_zero, values.end(), [](double v) { return v <= 0; }) &&
                           values.end() - first_zero >= 2 &&
                           std::is_sorted(values.begin(), first_zero, std::greater<double>());
    c.saturated = first_zero == values.begin() || zero_tail;
    if (c.saturated) {
        c.passed = true;
        return c;
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        double v = values[i];
        if (v <= 0) {
            // Half a count below the resolution of the estimate.
            const double n = i < samples.size() && samples[i] > 0 ? static_cast<double>(samples[i]) : 1e12;
            v = 0.5 / n;
        }
        xs.push_back(sizes[i]);
        ys.push_back(std::log(v));
    }
    c.fit = fit_line(xs, ys);
    c.passed = c.fit.slope < 0 && c.fit.p_negative < t.p_value && c.fit.r_squared > t.r_squared;
    return c;
}

PhaseVerdict classify_phase(const ModelParams& params, const std::vector<int>& sizes, const Schedule& schedule,
                            const PhaseThresholds& t) {
    if (sizes.size() < 4) throw ConfigError("phase classification needs at least four sizes");
    PhaseVerdict v;
    v.params = params;
    v.sizes = sizes;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const DomainPtr box = build_hex_box(sizes[i], sizes[i]);
        const auto h = as_predicate(*box, horizontal_crossing(*box));
        v.wired.push_back(estimate_event(box, params, BoundaryCondition::wired(), h, with_seed(schedule, 2 * i)));
        v.free.push_back(estimate_event(box, params, BoundaryCondition::free(), h, with_seed(schedule, 2 * i + 1)));
        v.converged = v.converged && v.wired.back().converged && v.free.back().converged;
    }
    std::vector<double> w, f, w_c, f_c;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        w.push_back(clamp01(v.wired[i].mean));
        f.push_back(clamp01(v.free[i].mean));
        w_c.push_back(1.0 - w.back());
        f_c.push_back(1.0 - f.back());
    }
    const auto nw = sample_counts(v.wired), nf = sample_counts(v.free);
    v.subcritical = decay_clause(sizes, w, nw, t);
    v.supercritical = decay_clause(sizes, f_c, nf, t);
    v.discontinuous_wired = decay_clause(sizes, w_c, nw, t);
    v.discontinuous_free = decay_clause(sizes, f, nf, t);
    v.bounded = true;
    for (std::size_t i = 0; i < sizes.size(); ++i)
        for (double p : {w[i], f[i]}) v.bounded = v.bounded && p >= t.epsilon && p <= 1.0 - t.epsilon;

    const bool disc = v.discontinuous_wired.passed && v.discontinuous_free.passed;
    const int passed = v.subcritical.passed + v.supercritical.passed + disc + v.bounded;
    if (passed == 1) {
        if (v.subcritical.passed) v.regime = Regime::Subcritical;
        if (v.supercritical.passed) v.regime = Regime::Supercritical;
        if (disc) v.regime = Regime::DiscontinuousCritical;
        if (v.bounded) v.regime = Regime::ContinuousCritical;
    }
    return v;
}

PropAReport decay_probe_propA(const ModelParams& params, const std::vector<int>& sizes, const Schedule& schedule) {
    if (sizes.size() < 2) throw ConfigError("propA probe needs at least two sizes");
    PropAReport r;
    r.sizes = sizes;
    std::vector<double> conn;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const DomainPtr hex = build_regular_hexagon(sizes[i]);
        const int centre = hex->index_of({0, 0});
        CrossingEvent ev;
        ev.name = "centre<->boundary(-)";
        ev.source = {centre};
        for (int u = 0; u < hex->size(); ++u)
            if (hex_norm(hex->coord(u)) == sizes[i]) ev.target.push_back(u);
        ev.spin = Spin::minus;
        const auto link = as_predicate(*hex, ev);

        auto observe_wired = [&](const SpinConfig& c, std::vector<double>& out) {
            out[0] = link(c) ? 1.0 : 0.0;
            out[1] = value(c.spin(centre));
        };
        auto observe_free = [&](const SpinConfig& c, std::vector<double>& out) { out[0] = value(c.spin(centre)); };
        const SampleRun wired = sample_observables(hex, params, BoundaryCondition::wired(), 2, observe_wired,
                                                   with_seed(schedule, 2 * i));
        const SampleRun freed = sample_observables(hex, params, BoundaryCondition::free(), 1, observe_free,
                                                   with_seed(schedule, 2 * i + 1));
        r.connectivity.push_back(wired.estimates[0]);
        r.m_wired.push_back(wired.estimates[1]);
        r.m_free.push_back(freed.estimates[0]);
        r.gap.push_back(r.m_wired.back().mean - r.m_free.back().mean);
        conn.push_back(clamp01(wired.estimates[0].mean));
    }
    r.decay = decay_clause(sizes, conn, sample_counts(r.connectivity));
    r.frozen = r.decay.saturated;
    r.c = r.frozen ? kInf : -r.decay.fit.slope;
    r.gap_decreasing = r.gap.back() < r.gap.front();
    for (std::size_t i = 1; i < r.gap.size(); ++i) {
        const double se = std::hypot(r.m_wired[i].std_error, r.m_free[i].std_error) +
                          std::hypot(r.m_wired[i - 1].std_error, r.m_free[i - 1].std_error);
        r.gap_decreasing = r.gap_decreasing && r.gap[i] <= r.gap[i - 1] + 3.0 * se;
    }
    return r;
}

PropBReport dual_probe_propB(const ModelParams& params, const std::vector<int>& sizes, const Schedule& schedule) {
    if (sizes.size() < 2) throw ConfigError("propB probe needs at least two sizes");
    PropBReport r;
    r.sizes = sizes;
    std::vector<double> fail;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const int n = sizes[i];
        const DomainPtr hex = build_regular_hexagon(2 * n);
        CrossingEvent ev;
        ev.name = "H_n<->boundary(H_2n)";
        for (int u = 0; u < hex->size(); ++u) {
            const int norm = hex_norm(hex->coord(u));
            if (norm <= n) ev.source.push_back(u);
            if (norm == 2 * n) ev.target.push_back(u);
        }
        const auto missing = negation(as_predicate(*hex, ev));
        r.failure.push_back(estimate_event(hex, params, BoundaryCondition::free(), missing, with_seed(schedule, i)));
        fail.push_back(clamp01(r.failure.back().mean));
    }
    r.decay = decay_clause(sizes, fail, sample_counts(r.failure));
    r.c = r.decay.saturated ? kInf : -r.decay.fit.slope;
    r.precondition_violated = !r.decay.saturated && r.decay.fit.slope >= 0;
    return r;
}

AnnulusTail annulus_tail(const ModelParams& params, int side, int delta, Spin spin, const BoundaryCondition& bc,
                         const Schedule& schedule, int min_hits) {
    const DomainPtr ring = annulus(side, delta);
    AnnulusTail r;
    r.faces = ring->size();
    const auto count = static_cast<std::size_t>(r.faces);
    auto observe = [&](const SpinConfig& c, std::vector<double>& out) {
        const auto vols = component_volumes(c, spin);
        const int biggest = vols.empty() ? 0 : vols.front();
        for (std::size_t i = 0; i < count; ++i) out[i] = biggest >= static_cast<int>(i) + 1 ? 1.0 : 0.0;
    };
    const SampleRun run = sample_observables(ring, params, bc, count, observe, schedule);
    r.samples = run.estimates.front().n_samples;
    std::vector<double> xs, ys;
    r.monotone = true;
    for (std::size_t i = 0; i < count; ++i) {
        r.volume.push_back(static_cast<int>(i) + 1);
        r.tail.push_back(run.estimates[i]);
        if (i > 0) r.monotone = r.monotone && run.estimates[i].mean <= run.estimates[i - 1].mean;
        if (run.estimates[i].mean * static_cast<double>(r.samples) >= min_hits) {
            r.fit_volume.push_back(static_cast<int>(i) + 1);
            xs.push_back(static_cast<double>(i) + 1);
            ys.push_back(std::log(run.estimates[i].mean));
        }
    }
    // Strictly decreasing across the resolved window.
    for (std::size_t i = 1; i < ys.size(); ++i) r.monotone = r.monotone && ys[i] < ys[i - 1];
    if (xs.size() >= 2) r.fit = fit_line(xs, ys);
    return r;
}

}  // namespace hexcross
