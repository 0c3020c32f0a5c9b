#ifndef MOSQGAME_STABILITY_HPP
#define MOSQGAME_STABILITY_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cubic.hpp"
#include "equilibria.hpp"
#include "model.hpp"

namespace mosqgame {

using Jacobian3 = Matrix3;

/// Analytic Jacobian of the variant's right-hand side at `s`.
inline Jacobian3 jacobian(const ModelParams& p, const State& s) {
    check_state(p, s);
    const auto& e = p.ento();
    const auto& bp = p.behavior();
    const auto& h = p.habitat();
    const double K = carrying_capacity(std::clamp(s.w, 0.0, 1.0), h);
    const double rb = e.r * e.b;
    Jacobian3 J;
    J(0, 0) = -rb * s.A_v / K - (e.nu_L + e.mu_L);
    J(0, 1) = rb * (1.0 - s.L_v / K);
    J(0, 2) = -rb * s.A_v * s.L_v * (h.K_max - h.K_min) / (K * K);
    J(1, 0) = e.nu_L;
    J(1, 1) = -e.mu_A;
    J(1, 2) = 0.0;
    J(2, 0) = 0.0;
    J(2, 1) = 0.0;
    J(2, 2) = bp.k * payoff_gain(p, s.A_v) * (1.0 - 2.0 * s.w);
    switch (p.variant()) {
    case ModelVariant::ConstantPayoff: break;
    case ModelVariant::ConstantPayoffWithIntervention: J(2, 2) -= bp.gamma; break;
    case ModelVariant::PrevalenceDependent: J(2, 1) = bp.k * s.w * (1.0 - s.w) * bp.r_d * bp.m; break;
    }
    return J;
}

/// lambda^3 + a2 lambda^2 + a1 lambda + a0 at E05.
struct CharPolyCoeffs {
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;

    /// a2 a1 - a0; positive together with a0 > 0 means Routh-Hurwitz stable.
    [[nodiscard]] double hurwitz_gap() const noexcept { return a2 * a1 - a0; }
};

namespace detail {

inline void require_e05_model(const ModelParams& p, double N) {
    if (p.variant() != ModelVariant::PrevalenceDependent)
        throw InvalidParameter("E05 analysis requires the prevalence-dependent variant");
    if (!(N > 1.0)) throw InvalidParameter("E05 analysis requires N > 1");
}

} // namespace detail

/// Closed-form characteristic coefficients at E05. a0 is negative when
/// r_c/r_d lies outside the existence interval and zero on its endpoints.
inline CharPolyCoeffs char_poly_coeffs_e05(const ModelParams& p) {
    const auto [N, alpha] = derived(p);
    detail::require_e05_model(p, N);
    const auto& e = p.ento();
    const auto& bp = p.behavior();
    const auto& h = p.habitat();
    const double f = 1.0 - 1.0 / N;
    const double growth = e.r * e.b * e.nu_L * f;
    const double P = bp.k * e.r * e.b * bp.r_d * e.mu_A / (bp.m * (h.K_max - h.K_min));
    const double x = p.risk_ratio();
    CharPolyCoeffs c;
    c.a2 = growth / e.mu_A + (e.nu_L + e.mu_L + e.mu_A);
    c.a1 = growth;
    c.a0 = P * (alpha * f * h.K_max - x) * (x - alpha * f * h.K_min);
    return c;
}

/// Quantities describing where E05 loses stability.
struct HopfAnalysis {
    double B = 0.0;
    double C = 0.0;
    double discriminant = 0.0; ///< B^2 - 4C
    std::optional<double> x1;  ///< lower root of x^2 - Bx + C (only when discriminant > 0)
    std::optional<double> x2;
    /// Critical imitation rate for the configured r_c/r_d, when one exists.
    std::optional<double> k_c;
    /// Split C(k) = C0 + D / k.
    double C0 = 0.0;
    double D = 0.0;
    /// discriminant == 0: the roots coincide and the instability window is empty.
    bool double_root = false;
};

namespace detail {

struct HopfPieces {
    double B, C0, D;
};

inline HopfPieces hopf_pieces(const ModelParams& p) {
    const auto [N, alpha] = derived(p);
    require_e05_model(p, N);
    const auto& e = p.ento();
    const auto& h = p.habitat();
    const double f = 1.0 - 1.0 / N;
    const double rbnu = e.r * e.b * e.nu_L;
    HopfPieces out;
    out.B = alpha * f * (h.K_max + h.K_min);
    out.C0 = alpha * alpha * f * f * h.K_max * h.K_min;
    out.D = (e.mu_A * e.mu_A + rbnu) / (e.mu_A * p.behavior().r_d) * alpha * (h.K_max - h.K_min) * f;
    return out;
}

} // namespace detail

/// Critical imitation rate solving x^2 - Bx + C0 + D/k = 0 for the ratio x;
/// empty when Bx - x^2 - C0 <= 0 (no k destabilizes E05 at this ratio).
inline std::optional<double> critical_imitation_rate(const ModelParams& p, double x) {
    const auto hp = detail::hopf_pieces(p);
    const double denom = hp.B * x - x * x - hp.C0;
    if (!(denom > 0.0)) return std::nullopt;
    return hp.D / denom;
}

inline HopfAnalysis hopf_analysis(const ModelParams& p) {
    const auto hp = detail::hopf_pieces(p);
    HopfAnalysis out;
    out.B = hp.B;
    out.C0 = hp.C0;
    out.D = hp.D;
    out.C = hp.C0 + hp.D / p.behavior().k;
    out.discriminant = out.B * out.B - 4.0 * out.C;
    if (out.discriminant > 0.0) {
        const double s = std::sqrt(out.discriminant);
        // x1 x2 = C; take the well-conditioned root first.
        out.x2 = (out.B + s) / 2.0;
        out.x1 = out.C / *out.x2;
    } else if (out.discriminant == 0.0) {
        out.double_root = true;
    }
    out.k_c = critical_imitation_rate(p, p.risk_ratio());
    return out;
}

/// Angular frequency sqrt(a1) of the purely imaginary pair at the Hopf point.
inline double hopf_frequency(const ModelParams& p) {
    return std::sqrt(char_poly_coeffs_e05(p).a1);
}

inline double hopf_onset_period(const ModelParams& p) {
    return 2.0 * std::numbers::pi / hopf_frequency(p);
}

/// d Re(lambda)/dk at k = k_c for the configured ratio: a0'(k) / (2 (a1 + a2^2)).
/// Empty when no k_c exists.
inline std::optional<double> transversality_rate(const ModelParams& p) {
    const auto k_c = critical_imitation_rate(p, p.risk_ratio());
    if (!k_c) return std::nullopt;
    auto bp = p.behavior();
    bp.k = *k_c;
    const auto c = char_poly_coeffs_e05(p.with(bp));
    const double da0_dk = c.a0 / *k_c; // a0 is linear in k
    return da0_dk / (2.0 * (c.a1 + c.a2 * c.a2));
}

enum class StabilityLabel { LAS, Unstable, Marginal };
enum class VerdictMethod { Analytic, Eigenvalue, Both };

inline std::string_view to_string(StabilityLabel l) {
    switch (l) {
    case StabilityLabel::LAS: return "LAS";
    case StabilityLabel::Unstable: return "Unstable";
    case StabilityLabel::Marginal: return "Marginal";
    }
    return "?";
}

inline std::string_view to_string(VerdictMethod m) {
    switch (m) {
    case VerdictMethod::Analytic: return "analytic";
    case VerdictMethod::Eigenvalue: return "eigenvalue";
    case VerdictMethod::Both: return "both";
    }
    return "?";
}

struct AnalyticVerdict {
    StabilityLabel label = StabilityLabel::Marginal;
    std::string reason;
};

struct StabilityVerdict {
    StabilityLabel label = StabilityLabel::Marginal;
    VerdictMethod method = VerdictMethod::Both;
    std::array<Complex, 3> eigenvalues{};
    double max_real_part = 0.0;
    double tolerance = 0.0;
    AnalyticVerdict analytic;
    StabilityLabel numeric = StabilityLabel::Marginal;
};

/// Relative eigenvalue tolerance for the Marginal band.
inline constexpr double kEigenTolerance = 1e-9;

/// Marginal band for the rightmost eigenvalue. The scale is that root's
/// condition number sum|c_i||z|^i / |p'(z)|, capped by the overall root
/// scale, so a huge decoupled root (k r_c) does not swamp the slow ones.
inline double eigen_tolerance(const Jacobian3& J) {
    const auto poly = characteristic_polynomial(J);
    const auto ev = eigenvalues3(J);
    const Complex z = *std::max_element(ev.begin(), ev.end(),
                                        [](const Complex& a, const Complex& b) { return a.real() < b.real(); });
    const double r = std::abs(z);
    const double terms = r * r * r + std::abs(poly.c2) * r * r + std::abs(poly.c1) * r + std::abs(poly.c0);
    const double slope = std::abs(poly.derivative(z));
    double scale = poly.root_scale();
    if (slope > 0.0) scale = std::min(scale, terms / slope);
    return kEigenTolerance * std::max(1.0, scale);
}

inline StabilityLabel eigenvalue_label(const std::array<Complex, 3>& ev, double tol) {
    double mx = ev[0].real();
    for (const auto& z : ev) mx = std::max(mx, z.real());
    if (mx > tol) return StabilityLabel::Unstable;
    if (mx < -tol) return StabilityLabel::LAS;
    return StabilityLabel::Marginal;
}

namespace detail {

/// Signed quantities, each the sign of one eigenvalue (or Routh-Hurwitz
/// condition): negative means stable in that direction.
struct SignConditions {
    std::vector<std::pair<double, std::string>> items;

    void add(double s, std::string what) { items.emplace_back(s, std::move(what)); }

    [[nodiscard]] AnalyticVerdict verdict() const {
        AnalyticVerdict v{StabilityLabel::LAS, {}};
        std::string stable, unstable, flat;
        for (const auto& [s, what] : items) {
            auto& dst = s > 0.0 ? unstable : (s < 0.0 ? stable : flat);
            if (!dst.empty()) dst += "; ";
            dst += what;
        }
        if (!unstable.empty()) {
            v.label = StabilityLabel::Unstable;
            v.reason = "violated: " + unstable;
        } else if (!flat.empty()) {
            v.label = StabilityLabel::Marginal;
            v.reason = "condition not strict: " + flat;
        } else {
            v.reason = "holds: " + stable;
        }
        return v;
    }
};

} // namespace detail

/// Stability of an existing equilibrium from the closed-form theorem conditions.
inline AnalyticVerdict analytic_verdict(const ModelParams& p, const Equilibrium& eq) {
    using L = EquilibriumLabel;
    const auto& bp = p.behavior();
    const double N = basic_offspring_number(p.ento());
    detail::SignConditions sc;
    switch (p.variant()) {
    case ModelVariant::ConstantPayoff: {
        const double diff = bp.r_c - bp.r_d;
        switch (eq.label) {
        case L::E01: sc.add(N - 1.0, "N < 1"); sc.add(-diff, "r_c - r_d > 0"); break;
        case L::E02: sc.add(N - 1.0, "N < 1"); sc.add(diff, "r_c - r_d < 0"); break;
        case L::E03: sc.add(1.0 - N, "N > 1"); sc.add(-diff, "r_c - r_d > 0"); break;
        case L::E04: sc.add(1.0 - N, "N > 1"); sc.add(diff, "r_c - r_d < 0"); break;
        default: throw InvalidParameter("label not defined for the constant-payoff variant");
        }
        break;
    }
    case ModelVariant::ConstantPayoffWithIntervention: {
        const double excess = (bp.r_c - bp.r_d) - bp.gamma / bp.k;
        switch (eq.label) {
        case L::E01_tilde: sc.add(N - 1.0, "N < 1"); sc.add(-excess, "r_c - r_d > gamma/k"); break;
        case L::E02: sc.add(N - 1.0, "N < 1"); sc.add(excess, "r_c - r_d < gamma/k"); break;
        case L::E03_tilde: sc.add(1.0 - N, "N > 1"); sc.add(-excess, "r_c - r_d > gamma/k"); break;
        case L::E04: sc.add(1.0 - N, "N > 1"); sc.add(excess, "r_c - r_d < gamma/k"); break;
        default: throw InvalidParameter("label not defined for the intervention variant");
        }
        break;
    }
    case ModelVariant::PrevalenceDependent: {
        const double x = p.risk_ratio();
        switch (eq.label) {
        case L::E01: sc.add(N - 1.0, "N < 1"); break;
        case L::E02: sc.add(bp.k * bp.r_c, "k r_c < 0 (never)"); break;
        case L::E03: {
            const double hi = derived(p).alpha * p.habitat().K_max * (1.0 - 1.0 / N);
            sc.add(1.0 - N, "N > 1");
            sc.add(hi - x, "r_c/r_d > alpha K_max (1 - 1/N)");
            break;
        }
        case L::E04: {
            const double lo = derived(p).alpha * p.habitat().K_min * (1.0 - 1.0 / N);
            sc.add(1.0 - N, "N > 1");
            sc.add(x - lo, "r_c/r_d < alpha K_min (1 - 1/N)");
            break;
        }
        case L::E05: {
            const auto c = char_poly_coeffs_e05(p);
            sc.add(-c.a2, "a2 > 0");
            sc.add(-c.a1, "a1 > 0");
            sc.add(-c.a0, "a0 > 0");
            sc.add(-c.hurwitz_gap(), "a2 a1 > a0");
            break;
        }
        default: throw InvalidParameter("label not defined for the prevalence-dependent variant");
        }
        break;
    }
    }
    return sc.verdict();
}

/// Analytic and eigenvalue-based classification of an existing equilibrium.
///
/// Throws AnalyticNumericMismatch when the two routes give different definite
/// verdicts. A numeric Marginal (|max Re| within tolerance) is reported as
/// Marginal rather than raised.
inline StabilityVerdict classify_equilibrium(const ModelParams& p, const Equilibrium& eq) {
    if (!eq.exists)
        throw InvalidParameter(std::string("cannot classify non-existent ") +
                               std::string(to_string(eq.label)));
    StabilityVerdict v;
    v.analytic = analytic_verdict(p, eq);
    const auto J = jacobian(p, eq.state);
    v.eigenvalues = eigenvalues3(J);
    v.max_real_part = v.eigenvalues[0].real();
    v.tolerance = eigen_tolerance(J);
    v.numeric = eigenvalue_label(v.eigenvalues, v.tolerance);
    if (v.numeric == v.analytic.label) {
        v.label = v.numeric;
        v.method = VerdictMethod::Both;
    } else if (v.numeric == StabilityLabel::Marginal) {
        v.label = StabilityLabel::Marginal;
        v.method = VerdictMethod::Eigenvalue;
    } else {
        throw AnalyticNumericMismatch(
            std::string(to_string(eq.label)) + ": analytic " +
            std::string(to_string(v.analytic.label)) + " (" + v.analytic.reason + ") vs eigenvalue " +
            std::string(to_string(v.numeric)) + " (max Re = " + std::to_string(v.max_real_part) + ")");
    }
    return v;
}

} // namespace mosqgame

#endif
