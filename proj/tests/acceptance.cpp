// Acceptance run: one PASS/FAIL line per criterion.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hexcross/crossing.hpp"
#include "hexcross/density.hpp"
#include "hexcross/exact.hpp"
#include "hexcross/sampler.hpp"
#include "hexcross/serialize.hpp"
#include "hexcross/simd/kernels.hpp"

using namespace hexcross;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& summary, double seconds) {
    std::printf("criterion %d: %s  %s  (%.1fs)\n", id, pass ? "PASS" : "FAIL", summary.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <class F>
void timed(int id, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string summary;
    const bool pass = body(summary);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    verdict(id, pass, summary, s);
}

std::string fmt(const char* f, double a) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<EventPredicate> crossings(const DomainPtr& d) {
    return {as_predicate(*d, horizontal_crossing(*d)), as_predicate(*d, vertical_crossing(*d))};
}

std::vector<int> all_faces(const HexDomain& d) {
    std::vector<int> v(static_cast<std::size_t>(d.size()));
    for (int i = 0; i < d.size(); ++i) v[static_cast<std::size_t>(i)] = i;
    return v;
}

// Centre face joined to the boundary arcs by a + path.
EventPredicate centre_to_boundary(const DomainPtr& d) {
    std::vector<int> boundary;
    for (Arc a : d->arc_labels())
        for (int f : d->arc(a)) boundary.push_back(f);
    int centre = 0;
    const auto c = d->centroid();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d->size(); ++i) {
        const auto p = face_center(d->coord(i));
        const double r = std::hypot(p[0] - c[0], p[1] - c[1]);
        if (r < best - 1e-9) {
            best = r;
            centre = i;
        }
    }
    return as_predicate(*d, {"centre<->boundary", {centre}, boundary, all_faces(*d), Spin::plus});
}

std::vector<ModelParams> fkg_grid() {
    std::vector<ModelParams> out;
    for (double n : {1.0, 1.5, 2.0})
        for (double hp : {0.0, -0.5}) {
            const double xmax = std::sqrt(std::exp(-std::abs(hp)) / n);
            for (double x : {0.3, std::min(nienhuis_xc(n), xmax)})
                for (double h : {0.0, 0.3}) out.push_back({n, x, h, hp});
        }
    return out;
}

// ---- criteria --------------------------------------------------------------

bool criterion1(std::string& summary) {
    const std::vector<std::string> fixtures{"hexagon:1", "box:3x2", "box:3x3", "box:4x3"};
    const std::vector<BoundaryCondition> bcs{BoundaryCondition::dobrushin(0.0, 0.5), BoundaryCondition::dobrushin(0.25, 0.75)};
    std::vector<ModelParams> grid;
    for (double n : {1.0, 1.5, 2.0})
        for (double x : {0.3, nienhuis_xc(n)}) grid.push_back({n, x, 0, 0});

    int cells = 0, within = 0;
    std::uint64_t job = 0;
    for (const auto& spec : fixtures) {
        const DomainPtr d = parse_domain(spec);
        const auto events = crossings(d);
        for (const auto& bc : bcs) {
            const EnumerationTable table(d, bc, events);
            for (const ModelParams& p : grid) {
                const auto m = table.measure(p);
                Schedule s;
                s.burn_in = 2000;
                s.sweeps = 20000;
                s.chains = 3;
                s.seed = job_seed(2024, job++);
                const auto est = estimate_events(d, p, bc, events, s);
                for (std::size_t i = 0; i < events.size(); ++i) {
                    const double diff = std::abs(est[i].mean - m.event(i));
                    const bool ok = diff <= 3 * est[i].std_error;
                    ++cells;
                    within += ok;
                    if (!ok)
                        std::printf("  c1 miss: %s %s %s n=%.2f x=%.4f exact=%.6f est=%.6f se=%.6f\n", spec.c_str(),
                                    bc.describe().c_str(), events[i].name.c_str(), p.n, p.x, m.event(i), est[i].mean,
                                    est[i].std_error);
                }
            }
        }
    }
    const double frac = static_cast<double>(within) / cells;
    summary = std::to_string(within) + "/" + std::to_string(cells) + " cells within 3 SE" + fmt(" (%.3f, need >= 0.95)", frac);
    return frac >= 0.95;
}

bool criterion2(std::string& summary) {
    double worst_norm = 0, worst_comp = 0;
    std::uint64_t dichotomy = 0;
    const std::vector<ModelParams> grid{{1, 0.5, 0, 0}, {1.5, nienhuis_xc(1.5), 0.2, -0.3}, {2, 0.7, -0.4, 0.1},
                                        {0.5, 0.9, 0.3, 0.3}};
    for (const std::string spec : {"hexagon:1", "hexagon:2", "box:3x3", "box:4x4", "annulus:1,1"})
        for (const auto& bc : {BoundaryCondition::free(), BoundaryCondition::wired(), BoundaryCondition::dobrushin(0.1, 0.6)}) {
            const EnumerationTable t(parse_domain(spec), bc);
            for (const auto& p : grid) {
                const auto m = t.measure(p);
                const double total = m.total_probability();
                worst_norm = std::max(worst_norm, std::abs(total - 1));
            }
        }
    for (auto [w, h] : {std::pair{2, 2}, {3, 3}, {4, 3}, {3, 4}, {4, 4}, {5, 3}})
        for (const auto& p : grid) {
            const auto c = check_complementarity(build_hex_box(w, h), p);
            worst_comp = std::max(worst_comp, c.deviation);
            dichotomy += c.dichotomy_failures;
        }
    summary = fmt("max |sum-1| = %.2e", worst_norm) + fmt(", max complementarity deviation = %.2e", worst_comp) +
              ", dichotomy failures = " + std::to_string(dichotomy);
    return worst_norm <= 1e-12 && worst_comp <= 1e-10 && dichotomy == 0;
}

struct Fixture {
    DomainPtr d;
    std::vector<EventPredicate> events;
};

std::vector<Fixture> fkg_fixtures() {
    std::vector<Fixture> out;
    for (const std::string spec : {"hexagon:1", "box:3x3", "box:4x4", "hexagon:2"}) {
        const DomainPtr d = parse_domain(spec);
        auto ev = crossings(d);
        auto face = EventPredicate::face_is(d->size() / 2);
        ev.push_back(face);
        ev.push_back(centre_to_boundary(d));
        out.push_back({d, ev});
    }
    const DomainPtr ann = annulus(1, 1);
    out.push_back({ann,
                   {as_predicate(*ann, {"inner<->outer", ann->arc(Arc::Inner), ann->arc(Arc::Outer), all_faces(*ann), Spin::plus}),
                    EventPredicate::face_is(0), EventPredicate::face_is(5), centre_to_boundary(ann)}});
    return out;
}

const std::vector<std::pair<std::string, BoundaryCondition>>& fkg_bcs() {
    static const std::vector<std::pair<std::string, BoundaryCondition>> v{
        {"free", BoundaryCondition::free()},
        {"mixed", BoundaryCondition::push_mixed()},
        {"dobrushin", BoundaryCondition::dobrushin(0.0, 0.5)},
        {"wired", BoundaryCondition::wired()}};
    return v;
}

bool criterion3(std::string& summary) {
    double worst = std::numeric_limits<double>::infinity();
    long pairs = 0;
    for (const auto& fx : fkg_fixtures())
        for (const auto& [name, bc] : fkg_bcs()) {
            if (fx.d->size() <= 12) {
                // The checker itself on the small fixtures.
                for (const auto& p : fkg_grid())
                    for (std::size_t a = 0; a < fx.events.size(); ++a)
                        for (std::size_t b = a + 1; b < fx.events.size(); ++b) {
                            worst = std::min(worst, check_fkg(fx.d, p, bc, fx.events[a], fx.events[b]).margin);
                            ++pairs;
                        }
                continue;
            }
            // One table for all pairs and parameters; monotonicity verified once.
            const EnumerationTable t(fx.d, bc, fx.events);
            for (std::size_t e = 0; e < fx.events.size(); ++e)
                if (!t.is_increasing(e)) {
                    summary = "event " + fx.events[e].name + " is not increasing";
                    return false;
                }
            for (const auto& p : fkg_grid()) {
                const auto m = t.measure(p);
                for (std::size_t a = 0; a < fx.events.size(); ++a)
                    for (std::size_t b = a + 1; b < fx.events.size(); ++b) {
                        const double margin = m.probability(EnumerationTable::bit(a) | EnumerationTable::bit(b)) -
                                              m.event(a) * m.event(b);
                        worst = std::min(worst, margin);
                        ++pairs;
                    }
            }
        }
    summary = std::to_string(pairs) + " (domain, bc, params, pair) checks" + fmt(", min margin = %.3e", worst);
    return worst >= -1e-12;
}

bool criterion4(std::string& summary) {
    double worst = std::numeric_limits<double>::infinity();
    long checks = 0;
    const std::vector<std::pair<int, int>> order{{0, 1}, {1, 3}, {0, 3}, {0, 2}, {2, 3}};
    for (const auto& fx : fkg_fixtures()) {
        std::vector<EnumerationTable> tables;
        for (const auto& [name, bc] : fkg_bcs()) tables.emplace_back(fx.d, bc, fx.events);
        for (const auto& [lo, hi] : order)
            if (!boundary_leq(*fx.d, fkg_bcs()[static_cast<std::size_t>(lo)].second, fkg_bcs()[static_cast<std::size_t>(hi)].second)) {
                summary = "boundary conditions not ordered on " + domain_spec(*fx.d);
                return false;
            }
        for (const auto& p : fkg_grid()) {
            std::vector<ExactMeasure> ms;
            for (const auto& t : tables) ms.push_back(t.measure(p));
            for (const auto& [lo, hi] : order)
                for (std::size_t e = 0; e < fx.events.size(); ++e) {
                    worst = std::min(worst, ms[static_cast<std::size_t>(hi)].event(e) - ms[static_cast<std::size_t>(lo)].event(e));
                    ++checks;
                }
        }
    }
    // Factor bound on 2- and 7-face domains, inside and outside the positive regime.
    double worst_factor = std::numeric_limits<double>::infinity();
    std::vector<ModelParams> wide = fkg_grid();
    for (const ModelParams p : {ModelParams{0.5, 0.8, 0.2, 0}, ModelParams{3, 0.9, -0.5, 0.4}, ModelParams{1.2, 1.3, 0, -1}})
        wide.push_back(p);
    for (const DomainPtr& d : {build_hex_box(2, 1), build_regular_hexagon(1)}) {
        std::vector<EventPredicate> ev{EventPredicate::all_plus(), EventPredicate::face_is(0), centre_to_boundary(d)};
        for (const auto& p : wide)
            for (const auto& a : ev) {
                const auto r = check_cbc_factor(d, p, a, BoundaryCondition::free(), BoundaryCondition::wired());
                worst_factor = std::min(worst_factor, r.rigorous_margin);
                ++checks;
            }
    }
    summary = std::to_string(checks) + " checks" + fmt(", min CBC margin = %.3e", worst) +
              fmt(", min factor margin = %.3e", worst_factor);
    return worst >= -1e-12 && worst_factor >= -1e-12;
}

bool criterion5(std::string& summary) {
    bool all = true;
    double min_margin = std::numeric_limits<double>::infinity();
    int reports = 0;
    for (int cells : {1, 2})
        for (double n : {1.0, 1.5, 2.0})
            for (double x : {0.3, nienhuis_xc(n)}) {
                const auto r = check_union_bound(1, 2, cells, {n, x, 0, 0}, BoundaryCondition::free());
                all = all && r.holds;
                min_margin = std::min(min_margin, r.margin);
                ++reports;
                if (!r.holds) std::printf("  c5 miss: I=%d n=%.2f x=%.4f best=%.6g threshold=%.6g\n", cells, n, x, r.best, r.threshold);
            }
    summary = std::to_string(reports) + " side-1 triples (I in {1,2})" + fmt(", min margin = %.3e", min_margin);
    return all;
}

bool criterion6(std::string& summary) {
    const std::vector<int> sizes{6, 9, 12, 18};
    const double xc = nienhuis_xc(1);
    struct Point {
        const char* label;
        ModelParams p;
    };
    const std::vector<Point> points{{"subcritical x=0.1xc", {1, 0.1 * xc, 0, 0}},
                                    {"supercritical x=xc h=1", {1, xc, 1, 0}},
                                    {"critical x=xc", {1, xc, 0, 0}}};
    Schedule base;
    base.burn_in = 1000;
    base.sweeps = 4000;
    base.chains = 3;
    base.seed = 606;
    Schedule doubled = base;
    doubled.sweeps *= 2;
    doubled.burn_in *= 2;
    doubled.seed = 607;

    std::vector<PhaseVerdict> v1, v2;
    for (const auto& pt : points) {
        v1.push_back(classify_phase(pt.p, sizes, base));
        v2.push_back(classify_phase(pt.p, sizes, doubled));
        const auto& v = v1.back();
        std::printf("  c6 %-24s verdict=%s (doubled: %s)\n", pt.label, to_string(v.regime).c_str(),
                    to_string(v2.back().regime).c_str());
        std::printf("     wired:");
        for (const auto& e : v.wired) std::printf(" %.4f", e.mean);
        std::printf("  free:");
        for (const auto& e : v.free) std::printf(" %.4f", e.mean);
        std::printf("\n     subcritical slope=%.3f R2=%.3f passed=%d | supercritical passed=%d saturated=%d | bounded=%d\n",
                    v.subcritical.fit.slope, v.subcritical.fit.r_squared, v.subcritical.passed, v.supercritical.passed,
                    v.supercritical.saturated, v.bounded);
    }
    const bool sub = v1[0].subcritical.passed;
    const bool sup = v1[1].supercritical.passed;
    const bool crit = v1[2].bounded;
    bool stable = true;
    for (std::size_t i = 0; i < points.size(); ++i) stable = stable && v1[i].regime == v2[i].regime;
    summary = std::string("subcritical clause ") + (sub ? "passed" : "failed") + ", supercritical clause " +
              (sup ? "passed" : "failed") + ", critical bounded " + (crit ? "yes" : "no") + ", verdicts stable " +
              (stable ? "yes" : "no");
    return sub && sup && crit && stable;
}

bool criterion7(std::string& summary) {
    Schedule s;
    s.burn_in = 500;
    s.sweeps = 5000;
    int points = 0, held = 0;
    for (double n : {1.0, 1.5, 2.0})
        for (double x : {0.3, nienhuis_xc(n)}) {
            const auto d = push_disjunction({n, x, 0, 0}, 1, {1, 2, 3, 4}, s);
            ++points;
            held += d.holds;
            std::printf("  c7 n=%.2f x=%.4f  c1(primal)=%.4f c1(dual)=%.4f\n", n, x, d.primal.c1, d.dual.c1);
        }
    summary = std::to_string(held) + "/" + std::to_string(points) + " grid points with a positive c1";
    return held == points;
}

int run_cli(const std::string& args) {
#ifdef HEXCROSS_CLI_PATH
    const std::string cmd = std::string(HEXCROSS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
    (void)args;
    return -1;
#endif
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool criterion8(std::string& summary) {
    // Library level: full estimate records.
    const DomainPtr d = build_regular_hexagon(2);
    Schedule s;
    s.burn_in = 200;
    s.sweeps = 3000;
    s.seed = 7;
    auto once = [&] {
        json j = json::array();
        for (const auto& e : estimate_events(d, {1.5, 0.6, 0.1, 0}, BoundaryCondition::free(), crossings(d), s))
            j.push_back(estimate_to_json(e));
        return j.dump();
    };
    const bool lib = once() == once();

    bool cli = true;
    std::string cli_note = "cli not built";
#ifdef HEXCROSS_CLI_PATH
    const auto dir = std::filesystem::temp_directory_path() / "hexcross_acceptance";
    const std::string args = "sample --seed 7 --domain hexagon:2 --sweeps 2000 --burn-in 200 --output-dir " + dir.string();
    std::string outputs[2];
    for (auto& out : outputs) {
        cli = cli && run_cli(args) <= 1;
        out = slurp(dir / "sample.json");
    }
    cli = cli && !outputs[0].empty() && outputs[0] == outputs[1];
    cli_note = cli ? "cli outputs byte-identical" : "cli outputs differ";
#endif
    summary = std::string(lib ? "library estimates identical" : "library estimates differ") + ", " + cli_note;
    return lib && cli;
}

bool criterion9(std::string& summary) {
    Schedule s;
    s.burn_in = 1000;
    s.sweeps = 100000;
    s.chains = 3;
    s.seed = 909;
    const auto t = annulus_tail({1, 0.3, 0, 0}, 2, 2, Spin::plus, BoundaryCondition::free(), s);
    std::printf("  c9 annulus(2,2) faces=%d samples=%lld tail:", t.faces, static_cast<long long>(t.samples));
    for (std::size_t i = 0; i < t.tail.size() && i < 8; ++i) std::printf(" %.3g", t.tail[i].mean);
    std::printf("\n     fit over N=%d..%d slope=%.3f R2=%.3f\n", t.fit_volume.empty() ? 0 : t.fit_volume.front(),
                t.fit_volume.empty() ? 0 : t.fit_volume.back(), t.fit.slope, t.fit.r_squared);
    summary = std::string("monotone ") + (t.monotone ? "yes" : "no") + fmt(", fitted slope = %.3f", t.fit.slope) +
              " over " + std::to_string(t.fit_volume.size()) + " volumes";
    return t.monotone && t.fit_volume.size() >= 2 && t.fit.slope < 0;
}

}  // namespace

int main() {
    std::printf("kernels: %s\n", simd::kernels().name);
    const std::vector<std::function<bool(std::string&)>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                                  criterion6, criterion7, criterion8, criterion9};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            timed(static_cast<int>(i + 1), criteria[i]);
        } catch (const std::exception& e) {
            verdict(static_cast<int>(i + 1), false, std::string("threw: ") + e.what(), 0);
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
