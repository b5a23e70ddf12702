#pragma once

#include <string>
#include <vector>

#include "hexcross/fit.hpp"
#include "hexcross/model.hpp"
#include "hexcross/sampler.hpp"

namespace hexcross {

enum class StripMode {
    FreeHorizontal,           // mu^0 of the horizontal + crossing
    WiredVerticalComplement,  // mu^1 of "no vertical + crossing"
};
std::string to_string(StripMode m);

struct DensityOptions {
    int lambda = 2;
    int stretch = 1;
    int height_override = 0;  // > 0 replaces lambda * stretch rows
    int exact_cap = 16;       // boxes up to this many faces are enumerated
    int tail = 3;             // points used for the extrapolation
};

struct DensityCurve {
    int n = 1;
    int stretch = 1;
    int lambda = 2;
    int height = 2;
    StripMode mode = StripMode::FreeHorizontal;
    std::vector<int> rho;
    std::vector<Estimate> raw;
    std::vector<double> densities;  // raw^{1/rho}
    double extrapolated = 0;
    double extrapolated_error = 0;
    bool flagged = false;
};

// Builds densities and the extrapolation from given probabilities. The limit
// is exp of the slope of log P against rho over the last `tail` points,
// clamped to [0, 1]; a zero probability in the window gives 0.
DensityCurve density_curve(int n, int stretch, int lambda, StripMode mode, std::vector<int> rho,
                           std::vector<Estimate> raw, int tail = 3);

DensityCurve strip_density(const ModelParams& params, int n, StripMode mode, const std::vector<int>& rho,
                           const Schedule& schedule, const DensityOptions& opts = {});

struct StripInequalityReport {
    double c_p = 0;  // smallest C with p >= lambda^-C q^{S + S/lambda}
    double c_q = 0;  // smallest C with q >= lambda^-C p^{S + S/lambda}
    bool finite = true;
    bool flagged = false;
};
StripInequalityReport check_strip_inequality(const DensityCurve& p, const DensityCurve& q, int lambda);

struct RenormReport {
    double c = 0;            // smallest C with v_3n <= lambda^C v_n^{3 - 9/lambda}
    double displayed_c_max = 0;  // largest C with v >= lambda^C v^{S - nS/lambda}
    bool finite = true;
    bool flagged = false;
};
RenormReport check_renorm_inequality(const DensityCurve& curve_n, const DensityCurve& curve_3n, int lambda);

enum class PushKind {
    Primal,       // wired left/top/right, horizontal + crossing
    Dual,         // + bottom only, no vertical + crossing
    StripPrimal,  // strip domain, + bottom only, horizontal + crossing
};
std::string to_string(PushKind k);

struct PushReport {
    PushKind kind = PushKind::Primal;
    std::vector<int> rho;
    std::vector<Estimate> raw;
    double c1 = 0;  // min over rho of raw^{1/rho}
    bool flagged = false;
};
PushReport push_probe(const ModelParams& params, PushKind kind, int n, const std::vector<int>& rho,
                      const Schedule& schedule, const DensityOptions& opts = {});

struct PushDisjunction {
    PushReport primal;
    PushReport dual;
    bool holds = false;
};
PushDisjunction push_disjunction(const ModelParams& params, int n, const std::vector<int>& rho,
                                 const Schedule& schedule, const DensityOptions& opts = {});

enum class Regime { Subcritical, Supercritical, ContinuousCritical, DiscontinuousCritical, Undetermined };
std::string to_string(Regime r);

struct PhaseThresholds {
    double epsilon = 0.02;
    double p_value = 0.01;
    double r_squared = 0.9;
};

// Decay of a sequence of probabilities in the size.
struct DecayClause {
    bool passed = false;
    bool saturated = false;  // every estimate is exactly zero
    LinearFit fit;
    std::vector<double> values;
};
DecayClause decay_clause(const std::vector<int>& sizes, const std::vector<double>& values,
                         const std::vector<std::int64_t>& samples, const PhaseThresholds& t = {});

struct PhaseVerdict {
    Regime regime = Regime::Undetermined;
    ModelParams params;
    std::vector<int> sizes;
    std::vector<Estimate> wired;  // mu^1[H] per size
    std::vector<Estimate> free;   // mu^0[H] per size
    DecayClause subcritical;      // mu^1[H] decays
    DecayClause supercritical;    // 1 - mu^0[H] decays
    DecayClause discontinuous_wired;  // 1 - mu^1[H] decays
    DecayClause discontinuous_free;   // mu^0[H] decays
    bool bounded = false;             // all estimates in [eps, 1 - eps]
    bool converged = true;
};
PhaseVerdict classify_phase(const ModelParams& params, const std::vector<int>& sizes, const Schedule& schedule,
                            const PhaseThresholds& t = {});

struct PropAReport {
    std::vector<int> sizes;
    std::vector<Estimate> connectivity;  // centre joined to the boundary by - faces, wired
    DecayClause decay;
    double c = 0;
    bool frozen = false;
    std::vector<Estimate> m_free, m_wired;  // centre magnetisation
    std::vector<double> gap;
    bool gap_decreasing = false;
};
PropAReport decay_probe_propA(const ModelParams& params, const std::vector<int>& sizes, const Schedule& schedule);

struct PropBReport {
    std::vector<int> sizes;
    std::vector<Estimate> failure;  // + cluster of H_n misses the boundary of H_2n, free
    DecayClause decay;
    double c = 0;
    bool precondition_violated = false;
};
PropBReport dual_probe_propB(const ModelParams& params, const std::vector<int>& sizes, const Schedule& schedule);

struct AnnulusTail {
    int faces = 0;
    std::vector<int> volume;       // N = 1 .. faces
    std::vector<Estimate> tail;    // P[max component volume >= N]
    std::vector<int> fit_volume;   // N with enough observations
    LinearFit fit;                 // log tail against N
    bool monotone = false;
    std::int64_t samples = 0;
};
AnnulusTail annulus_tail(const ModelParams& params, int side, int delta, Spin spin, const BoundaryCondition& bc,
                         const Schedule& schedule, int min_hits = 5);

}  // namespace hexcross
