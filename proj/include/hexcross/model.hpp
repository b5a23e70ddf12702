#pragma once

#include <cstdint>
#include <limits>
#include <string>

namespace hexcross {

enum class Spin : std::int8_t { minus = -1, plus = 1 };

constexpr int value(Spin s) { return static_cast<int>(s); }
constexpr Spin opposite(Spin s) { return s == Spin::plus ? Spin::minus : Spin::plus; }
constexpr Spin spin_of(int v) { return v > 0 ? Spin::plus : Spin::minus; }

// Parameters of the spin measure n^k x^e exp(h r + h'/2 r').
struct ModelParams {
    double n = 1.0;
    double x = 1.0;
    double h = 0.0;
    double h_prime = 0.0;

    // n >= 1 and n x^2 <= exp(-|h'|): the regime in which positive
    // association and boundary monotonicity are known to hold.
    bool is_fkg_regime() const;
    // Parameters of the spin-flipped measure (fields negated).
    ModelParams flipped() const { return {n, x, -h, -h_prime}; }
    std::string describe() const;
};

// Sufficient statistics of a spin configuration under a boundary condition.
struct SpinStats {
    std::int64_t e = 0;        // disagreement edges, domain-exterior edges included
    std::int64_t k = 0;        // constant-spin components, exterior merged per sign
    std::int64_t r = 0;        // sum of domain spins
    std::int64_t r_prime = 0;  // sum over monochromatic triangles of their spin

    bool operator==(const SpinStats&) const = default;
};

// Coefficients of the log-weight as an affine form in (k, e, r, r').
struct LogCoeffs {
    double ln_n = 0;
    double ln_x = 0;  // -inf when x == 0
    double h = 0;
    double half_h_prime = 0;

    static LogCoeffs from(const ModelParams& p);
};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// k ln n + e ln x + h r + (h'/2) r', with x = 0 and e > 0 mapped to -inf.
double log_weight(const SpinStats& s, const LogCoeffs& c);
double log_weight(const SpinStats& s, const ModelParams& p);

// 1 / sqrt(2 + sqrt(2 - n)) for n in [0, 2]; throws std::domain_error outside.
double nienhuis_xc(double n);

// 1 - c0^{-c0} + c0^{-c0} v, the increasing map relating horizontal and
// vertical crossing probabilities. Throws std::domain_error for c0 <= 0.
double homeomorphism_f(double c0, double v);

}  // namespace hexcross
