#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hexcross/boundary.hpp"
#include "hexcross/crossing.hpp"
#include "hexcross/density.hpp"
#include "hexcross/errors.hpp"
#include "hexcross/exact.hpp"
#include "hexcross/sampler.hpp"
#include "hexcross/serialize.hpp"
#include "hexcross/simd/kernels.hpp"

using namespace hexcross;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFlagged = 1;
constexpr int kExitConfig = 2;

struct Options {
    std::string domain;
    std::vector<double> n{1.0};
    std::vector<double> x;  // empty: Nienhuis point of each n
    std::vector<double> h{0.0};
    std::vector<double> hp{0.0};
    std::string bc = "free";
    std::string bc_prime = "wired";
    std::string outer;
    std::uint64_t seed = 1;
    int sweeps = 10000;
    int burn_in = 1000;
    int thin = 1;
    int chains = 3;
    int threads = 0;
    std::string update = "heatbath";
    std::string output_dir = ".";
    std::string format = "json";
    std::vector<std::string> check{"fkg"};
    int cap = 22;
    // strips and pushes
    int scale = 1;
    std::vector<int> rho{1, 2, 3, 4};
    int stretch = 1;
    int lambda = 2;
    int height = 0;
    std::string mode = "both";
    std::string kind = "both";
    bool renorm = false;
    // sizes, hexagon families, annuli
    std::vector<int> sizes;
    int side = 2;
    int delta = 2;
    int cells = 1;
    std::string spin = "+";
    int min_hits = 5;
    bool probes = false;
};

// Flat JSON keys accepted by --config, one per flag.
json options_to_json(const std::string& command, const Options& o) {
    json j;
    j["command"] = command;
    j["domain"] = o.domain;
    j["n"] = o.n;
    j["x"] = o.x;
    j["h"] = o.h;
    j["hp"] = o.hp;
    j["bc"] = o.bc;
    j["bc-prime"] = o.bc_prime;
    j["outer"] = o.outer;
    j["seed"] = o.seed;
    j["sweeps"] = o.sweeps;
    j["burn-in"] = o.burn_in;
    j["thin"] = o.thin;
    j["chains"] = o.chains;
    j["threads"] = o.threads;
    j["update"] = o.update;
    j["output-dir"] = o.output_dir;
    j["format"] = o.format;
    j["check"] = o.check;
    j["cap"] = o.cap;
    j["scale"] = o.scale;
    j["rho"] = o.rho;
    j["stretch"] = o.stretch;
    j["lambda"] = o.lambda;
    j["height"] = o.height;
    j["mode"] = o.mode;
    j["kind"] = o.kind;
    j["renorm"] = o.renorm;
    j["sizes"] = o.sizes;
    j["side"] = o.side;
    j["delta"] = o.delta;
    j["cells"] = o.cells;
    j["spin"] = o.spin;
    j["min-hits"] = o.min_hits;
    j["probes"] = o.probes;
    return j;
}

template <class T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

template <class T>
void take_list(const json& j, const char* key, std::vector<T>& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    out = v.is_array() ? v.get<std::vector<T>>() : std::vector<T>{v.get<T>()};
}

// Values from a flat config document; command-line flags parsed afterwards win.
void apply_config(const json& j, const std::string& command, Options& o) {
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    static const std::vector<std::string> known = [] {
        std::vector<std::string> k;
        const json defaults = options_to_json("", Options{});
        for (const auto& [key, _] : defaults.items()) k.push_back(key);
        return k;
    }();
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown config key '" + key + "'");
        if (value.is_object()) throw ConfigError("config key '" + key + "' is nested; the config file is flat");
    }
    if (j.contains("command") && j.at("command").get<std::string>() != command)
        throw ConfigError("config file is for command '" + j.at("command").get<std::string>() + "'");
    try {
        take(j, "domain", o.domain);
        take_list(j, "n", o.n);
        take_list(j, "x", o.x);
        take_list(j, "h", o.h);
        take_list(j, "hp", o.hp);
        take(j, "bc", o.bc);
        take(j, "bc-prime", o.bc_prime);
        take(j, "outer", o.outer);
        take(j, "seed", o.seed);
        take(j, "sweeps", o.sweeps);
        take(j, "burn-in", o.burn_in);
        take(j, "thin", o.thin);
        take(j, "chains", o.chains);
        take(j, "threads", o.threads);
        take(j, "update", o.update);
        take(j, "output-dir", o.output_dir);
        take(j, "format", o.format);
        take_list(j, "check", o.check);
        take(j, "cap", o.cap);
        take(j, "scale", o.scale);
        take_list(j, "rho", o.rho);
        take(j, "stretch", o.stretch);
        take(j, "lambda", o.lambda);
        take(j, "height", o.height);
        take(j, "mode", o.mode);
        take(j, "kind", o.kind);
        take(j, "renorm", o.renorm);
        take_list(j, "sizes", o.sizes);
        take(j, "side", o.side);
        take(j, "delta", o.delta);
        take(j, "cells", o.cells);
        take(j, "spin", o.spin);
        take(j, "min-hits", o.min_hits);
        take(j, "probes", o.probes);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config value: ") + e.what());
    }
}

std::string engine_hash() {
    return hex64(fnv1a(std::string("hexcross ") + HEXCROSS_VERSION));
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

struct Row {
    ModelParams params;
    std::string bc;
    std::string domain;
    std::string size;
    std::string rho;
    double estimate = 0;
    double std_error = 0;
    std::string flag = "ok";
};

// Output of one command: per-row CSV view plus a structured JSON result.
struct Report {
    std::vector<Row> rows;
    json results = json::array();
    bool flagged = false;
};

struct Grid {
    std::vector<ModelParams> points;
};

Grid make_grid(const Options& o) {
    Grid g;
    for (double n : o.n) {
        const std::vector<double> xs = o.x.empty() ? std::vector<double>{nienhuis_xc(n)} : o.x;
        for (double x : xs)
            for (double h : o.h)
                for (double hp : o.hp) {
                    if (n < 0 || x < 0) throw ConfigError("n and x must be non-negative");
                    g.points.push_back({n, x, h, hp});
                }
    }
    if (g.points.empty()) throw ConfigError("empty parameter grid");
    return g;
}

Schedule make_schedule(const Options& o, std::uint64_t job) {
    Schedule s;
    s.burn_in = o.burn_in;
    s.sweeps = o.sweeps;
    s.thin = o.thin;
    s.chains = o.chains;
    s.seed = job_seed(o.seed, job);
    s.update = update_from_string(o.update);
    s.threads = o.threads;
    if (s.sweeps < 2 || s.thin < 1 || s.chains < 1 || s.burn_in < 0) throw ConfigError("invalid sampling schedule");
    return s;
}

ExactOptions exact_options(const Options& o) { return {o.cap, o.threads}; }

Spin parse_spin(const std::string& s) {
    if (s == "+" || s == "plus") return Spin::plus;
    if (s == "-" || s == "minus") return Spin::minus;
    throw ConfigError("spin must be + or -");
}

DomainPtr require_domain(const Options& o, const std::string& fallback) {
    return parse_domain(o.domain.empty() ? fallback : o.domain);
}

// Increasing events used by enumerate, sample and verify.
std::vector<EventPredicate> canonical_events(const DomainPtr& d) {
    std::vector<EventPredicate> out;
    try {
        out.push_back(as_predicate(*d, horizontal_crossing(*d)));
        out.push_back(as_predicate(*d, vertical_crossing(*d)));
    } catch (const ConfigError&) {
    }
    if (d->has_arc(Arc::Inner) && d->has_arc(Arc::Outer)) {
        std::vector<int> all(static_cast<std::size_t>(d->size()));
        for (int i = 0; i < d->size(); ++i) all[static_cast<std::size_t>(i)] = i;
        out.push_back(as_predicate(*d, {"connect(inner,outer)", d->arc(Arc::Inner), d->arc(Arc::Outer), all, Spin::plus}));
    }
    int centre = 0;
    double best = std::numeric_limits<double>::infinity();
    const auto c = d->centroid();
    for (int i = 0; i < d->size(); ++i) {
        const auto p = face_center(d->coord(i));
        const double dist = std::hypot(p[0] - c[0], p[1] - c[1]);
        if (dist < best - 1e-9) {
            best = dist;
            centre = i;
        }
    }
    auto face = EventPredicate::face_is(centre);
    face.name = "centre+";
    out.push_back(face);
    out.push_back(EventPredicate::all_plus());
    return out;
}

json fit_json(const LinearFit& f) {
    return {{"slope", f.slope},      {"intercept", f.intercept},   {"slope_se", f.slope_se},
            {"r_squared", f.r_squared}, {"p_negative", f.p_negative}, {"points", f.points}};
}

json estimates_json(const std::vector<Estimate>& es) {
    json a = json::array();
    for (const auto& e : es) a.push_back(estimate_to_json(e));
    return a;
}

std::string flag_of(const Estimate& e) { return e.converged ? "ok" : "nonconverged"; }

// ---- commands ------------------------------------------------------------

Report cmd_enumerate(const Options& o) {
    Report rep;
    const DomainPtr d = require_domain(o, "hexagon:1");
    const BoundaryCondition bc = parse_boundary(o.bc);
    const auto events = canonical_events(d);
    EnumerationTable table(d, bc, events, exact_options(o));
    for (const ModelParams& p : make_grid(o).points) {
        const ExactMeasure m = table.measure(p);
        json r{{"params", params_to_json(p)}, {"log_partition", m.log_partition()}};
        json probs = json::object();
        rep.rows.push_back({p, o.bc, domain_spec(*d), std::to_string(d->size()), "", m.log_partition(), 0, "log_partition"});
        for (std::size_t i = 0; i < events.size(); ++i) {
            const double v = m.event(i);
            probs[events[i].name] = v;
            rep.rows.push_back({p, o.bc, domain_spec(*d), std::to_string(d->size()), "", v, 0, events[i].name});
        }
        r["probabilities"] = probs;
        rep.results.push_back(r);
    }
    return rep;
}

Report cmd_sample(const Options& o) {
    Report rep;
    const DomainPtr d = require_domain(o, "hexagon:2");
    const BoundaryCondition bc = parse_boundary(o.bc);
    const auto events = canonical_events(d);
    const auto grid = make_grid(o).points;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const ModelParams& p = grid[g];
        const std::size_t count = events.size() + 1;
        const auto run = sample_observables(
            d, p, bc, count,
            [&](const SpinConfig& c, std::vector<double>& v) {
                for (std::size_t i = 0; i < events.size(); ++i) v[i] = events[i](c) ? 1.0 : 0.0;
                v[events.size()] = static_cast<double>(c.stats().r) / c.size();
            },
            make_schedule(o, g));
        json r{{"params", params_to_json(p)}, {"converged", run.converged}};
        json est = json::object();
        for (std::size_t i = 0; i < count; ++i) {
            const std::string name = i < events.size() ? events[i].name : "magnetisation";
            est[name] = estimate_to_json(run.estimates[i]);
            rep.rows.push_back({p, o.bc, domain_spec(*d), std::to_string(d->size()), "", run.estimates[i].mean,
                                run.estimates[i].std_error, name + (run.estimates[i].converged ? "" : ";nonconverged")});
        }
        r["estimates"] = est;
        rep.flagged = rep.flagged || !run.converged;
        rep.results.push_back(r);
    }
    return rep;
}

Report cmd_crossing(const Options& o) {
    Report rep;
    const BoundaryCondition bc = parse_boundary(o.bc);
    std::vector<DomainPtr> domains;
    if (!o.sizes.empty()) {
        for (int s : o.sizes) domains.push_back(build_hex_box(s, s));
    } else {
        domains.push_back(require_domain(o, "box:6x6"));
    }
    const auto grid = make_grid(o).points;
    std::uint64_t job = 0;
    for (const DomainPtr& d : domains) {
        const std::vector<EventPredicate> events{as_predicate(*d, horizontal_crossing(*d)),
                                                 as_predicate(*d, vertical_crossing(*d))};
        for (const ModelParams& p : grid) {
            const auto est = estimate_events(d, p, bc, events, make_schedule(o, job++));
            json r{{"params", params_to_json(p)}, {"domain", domain_spec(*d)}};
            std::vector<double> exact;
            if (d->size() <= std::min(o.cap, 20)) {
                const EnumerationTable table(d, bc, events, exact_options(o));
                const auto m = table.measure(p);
                for (std::size_t i = 0; i < events.size(); ++i) exact.push_back(m.event(i));
            }
            for (std::size_t i = 0; i < events.size(); ++i) {
                json e = estimate_to_json(est[i]);
                std::string flag = flag_of(est[i]);
                if (!exact.empty()) {
                    e["exact"] = exact[i];
                    const double z = est[i].std_error > 0 ? (est[i].mean - exact[i]) / est[i].std_error
                                                          : (est[i].mean == exact[i] ? 0.0 : std::numeric_limits<double>::infinity());
                    e["z"] = z;
                    if (std::abs(z) > 3) flag = "exact-mismatch";
                }
                r[events[i].name] = e;
                rep.flagged = rep.flagged || !est[i].converged;
                rep.rows.push_back({p, o.bc, domain_spec(*d), std::to_string(d->size()), "", est[i].mean, est[i].std_error,
                                    events[i].name + ";" + flag});
            }
            rep.results.push_back(r);
        }
    }
    return rep;
}

json curve_json(const DensityCurve& c) {
    return {{"n", c.n},
            {"stretch", c.stretch},
            {"lambda", c.lambda},
            {"height", c.height},
            {"mode", to_string(c.mode)},
            {"rho", c.rho},
            {"raw", estimates_json(c.raw)},
            {"densities", c.densities},
            {"extrapolated", c.extrapolated},
            {"extrapolated_error", c.extrapolated_error},
            {"flagged", c.flagged}};
}

void curve_rows(Report& rep, const ModelParams& p, const std::string& bc, const DensityCurve& c) {
    const std::string dom = "strip:" + std::to_string(c.n) + "x" + std::to_string(c.height);
    for (std::size_t i = 0; i < c.rho.size(); ++i)
        rep.rows.push_back({p, bc, dom, std::to_string(c.rho[i] * c.n), std::to_string(c.rho[i]), c.raw[i].mean,
                            c.raw[i].std_error, to_string(c.mode) + ";" + flag_of(c.raw[i])});
    rep.rows.push_back({p, bc, dom, "", "inf", c.extrapolated, c.extrapolated_error,
                        to_string(c.mode) + ";extrapolated" + (c.flagged ? ";flagged" : "")});
    rep.flagged = rep.flagged || c.flagged;
}

Report cmd_strip(const Options& o) {
    Report rep;
    DensityOptions dopt;
    dopt.lambda = o.lambda;
    dopt.stretch = o.stretch;
    dopt.height_override = o.height;
    const auto grid = make_grid(o).points;
    std::vector<StripMode> modes;
    if (o.mode == "both" || o.mode == "free-horizontal") modes.push_back(StripMode::FreeHorizontal);
    if (o.mode == "both" || o.mode == "wired-vertical-complement") modes.push_back(StripMode::WiredVerticalComplement);
    if (modes.empty()) throw ConfigError("mode must be free-horizontal, wired-vertical-complement or both");
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const ModelParams& p = grid[g];
        json r{{"params", params_to_json(p)}};
        std::vector<DensityCurve> curves;
        for (std::size_t m = 0; m < modes.size(); ++m) {
            curves.push_back(strip_density(p, o.scale, modes[m], o.rho, make_schedule(o, 4 * g + m), dopt));
            curve_rows(rep, p, modes[m] == StripMode::FreeHorizontal ? "free" : "wired", curves.back());
            r[to_string(modes[m])] = curve_json(curves.back());
        }
        if (curves.size() == 2) {
            const auto s = check_strip_inequality(curves[0], curves[1], o.lambda);
            r["strip_inequality"] = {{"c_p", s.c_p}, {"c_q", s.c_q}, {"finite", s.finite}, {"flagged", s.flagged}};
            rep.flagged = rep.flagged || s.flagged;
        }
        if (o.renorm) {
            const auto base = strip_density(p, o.scale, StripMode::FreeHorizontal, o.rho, make_schedule(o, 4 * g + 2), dopt);
            const auto big = strip_density(p, 3 * o.scale, StripMode::FreeHorizontal, o.rho, make_schedule(o, 4 * g + 3), dopt);
            curve_rows(rep, p, "free", big);
            const auto rn = check_renorm_inequality(base, big, o.lambda);
            r["renormalisation"] = {{"c", rn.c},
                                    {"displayed_c_max", rn.displayed_c_max},
                                    {"finite", rn.finite},
                                    {"flagged", rn.flagged},
                                    {"curve_3n", curve_json(big)}};
            rep.flagged = rep.flagged || rn.flagged;
        }
        rep.results.push_back(r);
    }
    return rep;
}

json push_json(const PushReport& r) {
    return {{"kind", to_string(r.kind)}, {"rho", r.rho}, {"raw", estimates_json(r.raw)}, {"c1", r.c1}, {"flagged", r.flagged}};
}

void push_rows(Report& rep, const ModelParams& p, const PushReport& r, int scale) {
    for (std::size_t i = 0; i < r.rho.size(); ++i)
        rep.rows.push_back({p, to_string(r.kind), "box", std::to_string(r.rho[i] * scale), std::to_string(r.rho[i]),
                            r.raw[i].mean, r.raw[i].std_error, to_string(r.kind) + ";" + flag_of(r.raw[i])});
    rep.rows.push_back({p, to_string(r.kind), "box", "", "min", r.c1, 0, to_string(r.kind) + ";c1"});
    rep.flagged = rep.flagged || r.flagged;
}

Report cmd_push(const Options& o) {
    Report rep;
    DensityOptions dopt;
    dopt.lambda = o.lambda;
    dopt.stretch = o.stretch;
    dopt.height_override = o.height;
    const auto grid = make_grid(o).points;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const ModelParams& p = grid[g];
        json r{{"params", params_to_json(p)}};
        if (o.kind == "both") {
            const auto d = push_disjunction(p, o.scale, o.rho, make_schedule(o, g), dopt);
            push_rows(rep, p, d.primal, o.scale);
            push_rows(rep, p, d.dual, o.scale);
            r["primal"] = push_json(d.primal);
            r["dual"] = push_json(d.dual);
            r["disjunction_holds"] = d.holds;
            rep.flagged = rep.flagged || !d.holds;
        } else {
            PushKind k;
            if (o.kind == "primal") k = PushKind::Primal;
            else if (o.kind == "dual") k = PushKind::Dual;
            else if (o.kind == "strip-primal") k = PushKind::StripPrimal;
            else throw ConfigError("kind must be primal, dual, strip-primal or both");
            const auto pr = push_probe(p, k, o.scale, o.rho, make_schedule(o, g), dopt);
            push_rows(rep, p, pr, o.scale);
            r[to_string(k)] = push_json(pr);
        }
        rep.results.push_back(r);
    }
    return rep;
}

json clause_json(const DecayClause& c) {
    return {{"passed", c.passed}, {"saturated", c.saturated}, {"values", c.values}, {"fit", fit_json(c.fit)}};
}

Report cmd_phase(const Options& o) {
    Report rep;
    const std::vector<int> sizes = o.sizes.empty() ? std::vector<int>{6, 9, 12, 18} : o.sizes;
    const auto grid = make_grid(o).points;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const ModelParams& p = grid[g];
        const PhaseVerdict v = classify_phase(p, sizes, make_schedule(o, g));
        json r{{"params", params_to_json(p)},
               {"verdict", to_string(v.regime)},
               {"sizes", v.sizes},
               {"wired", estimates_json(v.wired)},
               {"free", estimates_json(v.free)},
               {"subcritical", clause_json(v.subcritical)},
               {"supercritical", clause_json(v.supercritical)},
               {"discontinuous_wired", clause_json(v.discontinuous_wired)},
               {"discontinuous_free", clause_json(v.discontinuous_free)},
               {"bounded", v.bounded},
               {"converged", v.converged}};
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            const std::string box = "box:" + std::to_string(sizes[i]) + "x" + std::to_string(sizes[i]);
            rep.rows.push_back({p, "wired", box, std::to_string(sizes[i]), "", v.wired[i].mean, v.wired[i].std_error,
                                to_string(v.regime) + ";" + flag_of(v.wired[i])});
            rep.rows.push_back({p, "free", box, std::to_string(sizes[i]), "", v.free[i].mean, v.free[i].std_error,
                                to_string(v.regime) + ";" + flag_of(v.free[i])});
        }
        if (o.probes) {
            const auto a = decay_probe_propA(p, sizes, make_schedule(o, 1000 + g));
            r["propA"] = {{"connectivity", estimates_json(a.connectivity)},
                          {"decay", clause_json(a.decay)},
                          {"c", a.c},
                          {"frozen", a.frozen},
                          {"gap", a.gap},
                          {"gap_decreasing", a.gap_decreasing}};
            const auto b = dual_probe_propB(p, sizes, make_schedule(o, 2000 + g));
            r["propB"] = {{"failure", estimates_json(b.failure)},
                          {"decay", clause_json(b.decay)},
                          {"c", b.c},
                          {"precondition_violated", b.precondition_violated}};
        }
        rep.flagged = rep.flagged || !v.converged;
        rep.results.push_back(r);
    }
    return rep;
}

Report cmd_annulus(const Options& o) {
    Report rep;
    const BoundaryCondition bc = parse_boundary(o.bc);
    const auto grid = make_grid(o).points;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const ModelParams& p = grid[g];
        const auto t = annulus_tail(p, o.side, o.delta, parse_spin(o.spin), bc, make_schedule(o, g), o.min_hits);
        const std::string dom = "annulus:" + std::to_string(o.side) + "," + std::to_string(o.delta);
        for (std::size_t i = 0; i < t.volume.size(); ++i)
            rep.rows.push_back({p, o.bc, dom, std::to_string(t.volume[i]), "", t.tail[i].mean, t.tail[i].std_error,
                                std::string(t.monotone ? "monotone" : "non-monotone") + ";" + flag_of(t.tail[i])});
        rep.results.push_back({{"params", params_to_json(p)},
                               {"domain", dom},
                               {"faces", t.faces},
                               {"volume", t.volume},
                               {"tail", estimates_json(t.tail)},
                               {"fit_volume", t.fit_volume},
                               {"fit", fit_json(t.fit)},
                               {"monotone", t.monotone},
                               {"samples", t.samples}});
        for (const auto& e : t.tail) rep.flagged = rep.flagged || !e.converged;
    }
    return rep;
}

DomainPtr default_outer(const HexDomain& inner) {
    if (inner.kind() == DomainKind::RegularHexagon) return build_regular_hexagon(inner.params().at(0) + 1);
    if (inner.kind() == DomainKind::HexBox) return build_hex_box(inner.params().at(0) + 1, inner.params().at(1) + 1);
    throw ConfigError("smp check needs --outer for this domain");
}

Report cmd_verify(const Options& o) {
    constexpr double kTol = 1e-12;
    Report rep;
    const auto grid = make_grid(o).points;
    for (const std::string& check : o.check) {
        for (const ModelParams& p : grid) {
            json r{{"check", check}, {"params", params_to_json(p)}};
            auto row = [&](const std::string& dom, double v, const std::string& flag) {
                rep.rows.push_back({p, o.bc, dom, "", "", v, 0, check + ";" + flag});
                if (flag == "violated") rep.flagged = true;
            };
            if (check == "fkg") {
                const DomainPtr d = require_domain(o, "hexagon:1");
                const auto events = canonical_events(d);
                const BoundaryCondition bc = parse_boundary(o.bc);
                double worst = std::numeric_limits<double>::infinity();
                bool supported = true;
                json pairs = json::array();
                for (std::size_t a = 0; a < events.size(); ++a)
                    for (std::size_t b = a + 1; b < events.size(); ++b) {
                        const auto f = check_fkg(d, p, bc, events[a], events[b], exact_options(o));
                        worst = std::min(worst, f.margin);
                        supported = f.regime_supported;
                        pairs.push_back({{"a", events[a].name}, {"b", events[b].name}, {"margin", f.margin},
                                         {"p_a", f.p_a}, {"p_b", f.p_b}, {"p_ab", f.p_ab}});
                    }
                const bool ok = worst >= -kTol;
                r.update({{"domain", domain_spec(*d)}, {"pairs", pairs}, {"min_margin", worst},
                          {"regime_supported", supported}, {"holds", ok}});
                row(domain_spec(*d), worst, ok ? "ok" : (supported ? "violated" : "outside-regime"));
            } else if (check == "cbc" || check == "cbc-factor") {
                const DomainPtr d = require_domain(o, "hexagon:1");
                const auto events = canonical_events(d);
                const BoundaryCondition tau = parse_boundary(o.bc), tau_p = parse_boundary(o.bc_prime);
                double worst = std::numeric_limits<double>::infinity();
                bool supported = true;
                json per = json::array();
                for (const auto& ev : events) {
                    if (check == "cbc") {
                        const auto c = check_cbc(d, p, ev, tau, tau_p, exact_options(o));
                        worst = std::min(worst, c.margin);
                        supported = c.regime_supported;
                        per.push_back({{"event", ev.name}, {"margin", c.margin}, {"p_tau", c.p_tau}, {"p_tau_prime", c.p_tau_prime}});
                    } else {
                        const auto c = check_cbc_factor(d, p, ev, tau, tau_p, exact_options(o));
                        worst = std::min(worst, c.rigorous_margin);
                        per.push_back({{"event", ev.name},
                                       {"factor", c.factor},
                                       {"margin", c.margin},
                                       {"special_factor", c.special_factor},
                                       {"rigorous_factor", c.rigorous_factor},
                                       {"rigorous_margin", c.rigorous_margin},
                                       {"p_tau", c.p_tau},
                                       {"p_tau_prime", c.p_tau_prime}});
                    }
                }
                const bool ok = worst >= -kTol;
                r.update({{"domain", domain_spec(*d)}, {"bc_prime", o.bc_prime}, {"events", per}, {"min_margin", worst},
                          {"regime_supported", supported}, {"holds", ok}});
                row(domain_spec(*d), worst, ok ? "ok" : (supported ? "violated" : "outside-regime"));
            } else if (check == "smp") {
                const DomainPtr inner = require_domain(o, "hexagon:1");
                const DomainPtr outer = o.outer.empty() ? default_outer(*inner) : parse_domain(o.outer);
                const BoundaryCondition bc = parse_boundary(o.bc);
                double worst = 0;
                json per = json::array();
                for (const auto& ev : canonical_events(inner)) {
                    const auto s = check_smp(inner, outer, p, bc, ev, exact_options(o));
                    worst = std::max(worst, s.max_deviation);
                    per.push_back({{"event", ev.name}, {"max_deviation", s.max_deviation}, {"outside_configs", s.outside_configs}});
                }
                // Exact only at n = 1; elsewhere the deviation is reported, not judged.
                const bool judged = p.n == 1.0;
                const bool ok = worst <= kTol;
                r.update({{"domain", domain_spec(*inner)}, {"outer", domain_spec(*outer)}, {"events", per},
                          {"max_deviation", worst}, {"holds", ok}});
                row(domain_spec(*inner), worst, ok ? "ok" : (judged ? "violated" : "nonlocal"));
            } else if (check == "complementarity") {
                const DomainPtr d = require_domain(o, "box:3x3");
                const auto c = check_complementarity(d, p, exact_options(o));
                const bool ok = c.deviation <= 1e-10 && c.dichotomy_failures == 0;
                r.update({{"domain", domain_spec(*d)}, {"deviation", c.deviation}, {"p_horizontal", c.p_horizontal},
                          {"p_vertical", c.p_vertical}, {"dichotomy_failures", c.dichotomy_failures}, {"holds", ok}});
                row(domain_spec(*d), c.deviation, ok ? "ok" : "violated");
            } else if (check == "normalization") {
                const DomainPtr d = require_domain(o, "hexagon:1");
                EnumerationTable table(d, parse_boundary(o.bc), {}, exact_options(o));
                const auto m = table.measure(p);
                const double total = m.total_probability();
                const bool ok = std::abs(total - 1) <= kTol;
                r.update({{"domain", domain_spec(*d)}, {"sum", total}, {"log_partition", m.log_partition()}, {"holds", ok}});
                row(domain_spec(*d), total - 1, ok ? "ok" : "violated");
            } else if (check == "union-bound") {
                const auto u = check_union_bound(o.side, o.delta, o.cells, p, parse_boundary(o.bc), o.lambda, exact_options(o));
                json probs = json::object();
                for (const auto& [name, v] : u.probabilities) probs[name] = v;
                r.update({{"side", u.side}, {"delta", u.delta}, {"cells", u.cells}, {"faces", u.faces},
                          {"mu_vertical", u.mu_vertical}, {"best", u.best}, {"threshold", u.threshold},
                          {"margin", u.margin}, {"holds", u.holds}, {"mu_c0", u.mu_c0}, {"c_fit", u.c_fit},
                          {"probabilities", probs}});
                row("six-arm:" + std::to_string(o.side) + "," + std::to_string(o.delta) + "," + std::to_string(o.cells),
                    u.margin, u.holds ? "ok" : "violated");
            } else {
                throw ConfigError("unknown check '" + check + "'");
            }
            rep.results.push_back(r);
        }
    }
    return rep;
}

// ---- output --------------------------------------------------------------

std::string render_csv(const std::string& run_id, const std::string& command, const Report& rep) {
    std::ostringstream out;
    out << "run_id,command,n,x,h,h_prime,bc,domain,size,rho,estimate,std_error,flag\n";
    for (const Row& r : rep.rows)
        out << run_id << ',' << command << ',' << fmt(r.params.n) << ',' << fmt(r.params.x) << ',' << fmt(r.params.h) << ','
            << fmt(r.params.h_prime) << ',' << csv_field(r.bc) << ',' << csv_field(r.domain) << ',' << r.size << ','
            << r.rho << ',' << fmt(r.estimate) << ',' << fmt(r.std_error) << ',' << csv_field(r.flag) << '\n';
    return out.str();
}

std::string render_json(const std::string& run_id, const std::string& command, const json& config, const Report& rep) {
    json doc;
    doc["run_id"] = run_id;
    doc["command"] = command;
    doc["engine_version"] = HEXCROSS_VERSION;
    doc["engine_hash"] = engine_hash();
    doc["run_config"] = config;
    doc["flagged"] = rep.flagged;
    doc["results"] = rep.results;
    // Infinite margins have no JSON number form.
    return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

int run(const std::string& command, const Options& o) {
    const json config = options_to_json(command, o);
    const std::string run_id = hex64(fnv1a(config.dump()));
    if (o.format != "json" && o.format != "csv") throw ConfigError("format must be csv or json");

    Report rep;
    if (command == "enumerate") rep = cmd_enumerate(o);
    else if (command == "verify") rep = cmd_verify(o);
    else if (command == "sample") rep = cmd_sample(o);
    else if (command == "crossing-prob") rep = cmd_crossing(o);
    else if (command == "strip-density") rep = cmd_strip(o);
    else if (command == "push-probe") rep = cmd_push(o);
    else if (command == "phase-scan") rep = cmd_phase(o);
    else if (command == "annulus-volumes") rep = cmd_annulus(o);

    const std::string body = o.format == "csv" ? render_csv(run_id, command, rep) : render_json(run_id, command, config, rep);
    std::filesystem::create_directories(o.output_dir);
    const auto path = std::filesystem::path(o.output_dir) / (command + "." + o.format);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << body;
    if (o.format == "csv") {
        // The RunConfig travels next to the table.
        std::ofstream meta(std::filesystem::path(o.output_dir) / (command + ".config.json"), std::ios::binary);
        meta << json{{"run_id", run_id}, {"engine_hash", engine_hash()}, {"run_config", config}}.dump(2) << "\n";
    }
    std::cout << body;
    return rep.flagged ? kExitFlagged : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-measure simulation and verification on the hexagonal lattice"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help and exit");
    app.set_version_flag("--version", std::string(HEXCROSS_VERSION) + " (" + engine_hash() + ", kernels " +
                                          simd::kernels().name + ")");

    Options o;
    std::string config_path;
    const std::vector<std::string> commands{"enumerate", "verify", "sample", "crossing-prob",
                                            "strip-density", "push-probe", "phase-scan", "annulus-volumes"};
    // Config values land in `o` before parsing so that flags override them.
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    std::string command;
    for (int i = 1; i < argc; ++i)
        if (std::find(commands.begin(), commands.end(), argv[i]) != commands.end()) {
            command = argv[i];
            break;
        }
    if (!config_path.empty()) {
        try {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot read config file " + config_path);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw ConfigError(std::string("malformed config file: ") + e.what());
            }
            apply_config(j, command, o);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfig;
        }
    }

    for (const std::string& name : commands) {
        static const std::map<std::string, std::string> about{
            {"enumerate", "exact log Z and canonical event probabilities"},
            {"verify", "exact checks: fkg, cbc, cbc-factor, smp, complementarity, normalization, union-bound"},
            {"sample", "MCMC estimates of canonical events and magnetisation"},
            {"crossing-prob", "horizontal and vertical crossing probabilities"},
            {"strip-density", "strip crossing densities and their inequalities"},
            {"push-probe", "push primal / dual rates"},
            {"phase-scan", "finite-size phase classification"},
            {"annulus-volumes", "component-volume tail in an annulus"}};
        CLI::App* sub = app.add_subcommand(name, about.at(name));
        sub->set_help_flag("--help", "print this help and exit");
        sub->add_option("--config", config_path, "flat JSON file of option values");
        sub->add_option("--domain", o.domain, "hexagon:J | box:WxH | strip:TxL | annulus:J,D");
        sub->add_option("--n", o.n, "loop weight(s)")->delimiter(',');
        sub->add_option("--x", o.x, "edge weight(s); default x_c(n)")->delimiter(',');
        sub->add_option("--h", o.h, "field(s) on spins")->delimiter(',');
        sub->add_option("--hp", o.hp, "field(s) on monochromatic triangles")->delimiter(',');
        sub->add_option("--bc", o.bc, "free | wired | mixed | mixed-dual | dobrushin:a,b | arcs:...");
        sub->add_option("--seed", o.seed, "run seed");
        sub->add_option("--sweeps", o.sweeps, "recorded sweeps per chain");
        sub->add_option("--burn-in", o.burn_in, "discarded sweeps per chain");
        sub->add_option("--thin", o.thin, "record every k-th sweep");
        sub->add_option("--chains", o.chains, "independent chains");
        sub->add_option("--threads", o.threads, "worker threads (HEXCROSS_THREADS overrides 0)");
        sub->add_option("--update", o.update, "heatbath | wolff");
        sub->add_option("--output-dir", o.output_dir, "directory for <command>.json|csv");
        sub->add_option("--format", o.format, "csv | json");
        sub->add_option("--cap", o.cap, "largest enumerated domain (faces)");
        if (name == "verify") {
            sub->add_option("--check", o.check, "fkg, cbc, cbc-factor, smp, complementarity, normalization, union-bound")
                ->delimiter(',');
            sub->add_option("--bc-prime", o.bc_prime, "larger boundary condition for cbc checks");
            sub->add_option("--outer", o.outer, "outer domain for the smp check");
        }
        if (name == "strip-density" || name == "push-probe") {
            sub->add_option("--scale", o.scale, "strip scale n");
            sub->add_option("--rho", o.rho, "aspect lengths")->delimiter(',');
            sub->add_option("--stretch", o.stretch, "box height multiplier");
            sub->add_option("--height", o.height, "rows; default lambda * stretch");
        }
        if (name == "strip-density" || name == "push-probe" || name == "verify") sub->add_option("--lambda", o.lambda, "strip height factor");
        if (name == "strip-density") {
            sub->add_option("--mode", o.mode, "free-horizontal | wired-vertical-complement | both");
            sub->add_flag("--renorm", o.renorm, "also compare scales n and 3n");
        }
        if (name == "push-probe") sub->add_option("--kind", o.kind, "primal | dual | strip-primal | both");
        if (name == "phase-scan" || name == "crossing-prob") sub->add_option("--sizes", o.sizes, "box sizes")->delimiter(',');
        if (name == "phase-scan") sub->add_flag("--probes", o.probes, "add the connectivity and dual probes");
        if (name == "annulus-volumes" || name == "verify") {
            sub->add_option("--side", o.side, "hexagon side");
            sub->add_option("--delta", o.delta, "translate shift (six-arm) or annulus width");
        }
        if (name == "verify") sub->add_option("--cells", o.cells, "partition cells of the bottom arc");
        if (name == "annulus-volumes") {
            sub->add_option("--spin", o.spin, "+ | -");
            sub->add_option("--min-hits", o.min_hits, "least expected hits for a fitted volume");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        return run(app.get_subcommands().front()->get_name(), o);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
    } catch (const SizeError& e) {
        std::cerr << "size error: " << e.what() << "\n";
    } catch (const PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
    } catch (const std::domain_error& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
    }
    return kExitConfig;
}
