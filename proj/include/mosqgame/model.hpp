#ifndef MOSQGAME_MODEL_HPP
#define MOSQGAME_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "params.hpp"

namespace mosqgame {

/// Relative slack allowed outside the invariant box (integrator overshoot).
inline constexpr double kStateTolerance = 1e-9;

/// Basic offspring number N = nu_L r b / ((nu_L + mu_L) mu_A).
inline double basic_offspring_number(const EntomologicalParams& p) {
    using detail::positive_finite;
    if (!(positive_finite(p.r) && p.r <= 1.0 && positive_finite(p.b) && positive_finite(p.nu_L) &&
          positive_finite(p.mu_L) && positive_finite(p.mu_A)))
        throw InvalidParameter("entomological parameters must be positive (and r <= 1)");
    return p.nu_L * p.r * p.b / ((p.nu_L + p.mu_L) * p.mu_A);
}

struct DerivedQuantities {
    double N = 0.0;     ///< basic offspring number
    double alpha = 0.0; ///< m nu_L / mu_A
};

inline DerivedQuantities derived(const ModelParams& p) {
    return {basic_offspring_number(p.ento()), p.behavior().m * p.ento().nu_L / p.ento().mu_A};
}

/// K_v(w) = K_max - w (K_max - K_min).
inline double carrying_capacity(double w, const HabitatParams& h) {
    if (!(w >= 0.0 && w <= 1.0)) throw InvalidState("w must lie in [0, 1]");
    return h.K_max - w * (h.K_max - h.K_min);
}

/// Perceived payoff f_d for households not performing control.
inline double payoff_not_control(ModelVariant variant, double A_v, const BehaviorParams& bp) {
    if (!(A_v >= 0.0)) throw InvalidState("A_v must be >= 0");
    if (variant == ModelVariant::PrevalenceDependent) return -bp.r_d * bp.m * A_v;
    return -bp.r_d;
}

/// Payoff difference f_c - f_d driving the imitation dynamics.
inline double payoff_gain(const ModelParams& p, double A_v) noexcept {
    const auto& bp = p.behavior();
    if (p.variant() == ModelVariant::PrevalenceDependent) return bp.r_d * bp.m * A_v - bp.r_c;
    return bp.r_d - bp.r_c;
}

/// Throws InvalidState unless `s` lies in the box
/// [0, K_max] x [0, (nu_L/mu_A) K_max] x [0, 1], up to `tol` relative slack.
inline void check_state(const ModelParams& p, const State& s, double tol = kStateTolerance) {
    const double Lmax = p.habitat().K_max;
    const double Amax = p.adult_bound();
    auto in = [](double x, double hi, double slack) {
        return std::isfinite(x) && x >= -slack && x <= hi + slack;
    };
    if (!in(s.L_v, Lmax, tol * Lmax))
        throw InvalidState("L_v = " + std::to_string(s.L_v) + " outside [0, K_max]");
    if (!in(s.A_v, Amax, tol * Amax))
        throw InvalidState("A_v = " + std::to_string(s.A_v) + " outside [0, (nu_L/mu_A) K_max]");
    if (!in(s.w, 1.0, tol)) throw InvalidState("w = " + std::to_string(s.w) + " outside [0, 1]");
}

namespace detail {

/// Mosquito equations only; `K` is the carrying capacity already evaluated at w.
inline void entomological_rates(const EntomologicalParams& e, double L, double A, double K,
                                double& dL, double& dA) noexcept {
    dL = e.r * e.b * A * (1.0 - L / K) - (e.nu_L + e.mu_L) * L;
    dA = e.nu_L * L - e.mu_A * A;
}

/// Right-hand side without domain checks (used inside Runge-Kutta stages).
inline Rates rhs_unchecked(const ModelParams& p, const State& s) noexcept {
    const auto& h = p.habitat();
    const double K = h.K_max - s.w * (h.K_max - h.K_min);
    Rates out;
    entomological_rates(p.ento(), s.L_v, s.A_v, K, out.dL_v, out.dA_v);
    const auto& bp = p.behavior();
    out.dw = bp.k * s.w * (1.0 - s.w) * payoff_gain(p, s.A_v);
    if (p.variant() == ModelVariant::ConstantPayoffWithIntervention)
        out.dw += bp.gamma * (1.0 - s.w);
    return out;
}

} // namespace detail

/// Right-hand side of the selected model variant at `s`.
inline Rates rhs(const ModelParams& p, const State& s) {
    check_state(p, s);
    const auto& h = p.habitat();
    const double w = std::clamp(s.w, 0.0, 1.0);
    if (!(h.K_max - w * (h.K_max - h.K_min) > 0.0))
        throw InvalidParameter("carrying capacity is not positive");
    return detail::rhs_unchecked(p, s);
}

/// max_i |rate_i| / max(1, |x_i|): the fixed-point residual used for equilibria.
inline double scaled_residual(const State& s, const Rates& f) noexcept {
    auto term = [](double rate, double x) { return std::abs(rate) / std::max(1.0, std::abs(x)); };
    return std::max({term(f.dL_v, s.L_v), term(f.dA_v, s.A_v), term(f.dw, s.w)});
}

} // namespace mosqgame

#endif
