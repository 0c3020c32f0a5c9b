#ifndef MOSQGAME_EQUILIBRIA_HPP
#define MOSQGAME_EQUILIBRIA_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "model.hpp"

namespace mosqgame {

enum class EquilibriumLabel { E01, E02, E03, E04, E05, E01_tilde, E03_tilde };

inline std::string_view to_string(EquilibriumLabel l) {
    switch (l) {
    case EquilibriumLabel::E01: return "E01";
    case EquilibriumLabel::E02: return "E02";
    case EquilibriumLabel::E03: return "E03";
    case EquilibriumLabel::E04: return "E04";
    case EquilibriumLabel::E05: return "E05";
    case EquilibriumLabel::E01_tilde: return "E01_tilde";
    case EquilibriumLabel::E03_tilde: return "E03_tilde";
    }
    return "?";
}

struct Equilibrium {
    EquilibriumLabel label = EquilibriumLabel::E01;
    State state;
    bool exists = false;
    std::string existence_reason;
    /// Exists, but sits on an endpoint of its closed existence interval.
    bool on_boundary = false;
};

/// Closed-form steady states of one variant, including the ones that do not exist.
struct EquilibriumSet {
    std::vector<Equilibrium> items;
    /// r_c == r_d in a constant-payoff variant: every w solves the behaviour
    /// equation, so the listed states are not the full steady-state set.
    bool degenerate_continuum = false;

    [[nodiscard]] const Equilibrium* find(EquilibriumLabel l) const noexcept {
        for (const auto& e : items)
            if (e.label == l) return &e;
        return nullptr;
    }
};

/// Interval [lo, hi] of r_c / r_d on which E05 exists.
inline std::pair<double, double> e05_existence_interval(const ModelParams& p) {
    const auto [N, alpha] = derived(p);
    if (!(N > 1.0)) throw InvalidParameter("E05 existence interval requires N > 1");
    if (!(alpha > 0.0)) throw InvalidParameter("E05 existence interval requires m > 0");
    const double f = 1.0 - 1.0 / N;
    return {alpha * p.habitat().K_min * f, alpha * p.habitat().K_max * f};
}

/// Partial-control equilibrium of the prevalence-dependent model.
inline Equilibrium e05(const ModelParams& p) {
    if (p.variant() != ModelVariant::PrevalenceDependent)
        throw InvalidParameter("E05 is defined only for the prevalence-dependent variant");
    const auto& e = p.ento();
    const auto& bp = p.behavior();
    const double x = p.risk_ratio();
    Equilibrium eq;
    eq.label = EquilibriumLabel::E05;
    eq.state.A_v = x / bp.m;
    eq.state.L_v = e.mu_A * x / (bp.m * e.nu_L);
    const double N = basic_offspring_number(e);
    if (!(N > 1.0)) {
        eq.existence_reason = "N <= 1";
        eq.state.w = 0.0;
        return eq;
    }
    const auto [lo, hi] = e05_existence_interval(p);
    // w* = (hi - x) / (hi - lo): the K_v(w*) = L*/(1 - 1/N) condition, divided
    // through by alpha (1 - 1/N). In this form w* in [0,1] <=> x in [lo,hi] holds
    // exactly in floating point.
    eq.state.w = (hi - x) / (hi - lo);
    if (x < lo || x > hi) {
        eq.existence_reason = "r_c/r_d outside existence interval [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]";
        return eq;
    }
    eq.exists = true;
    eq.on_boundary = (x == lo || x == hi);
    eq.existence_reason = eq.on_boundary ? "N > 1 and r_c/r_d on an endpoint of the existence interval"
                                         : "N > 1 and r_c/r_d inside the existence interval";
    return eq;
}

/// Behaviour fraction w* = gamma / (k (r_c - r_d)) of the intervention model;
/// empty when r_c <= r_d.
inline std::optional<double> intervention_w_star(const ModelParams& p) {
    const auto& bp = p.behavior();
    const double diff = bp.r_c - bp.r_d;
    if (!(diff > 0.0)) return std::nullopt;
    return bp.gamma / (bp.k * diff);
}

namespace detail {

inline Equilibrium make_equilibrium(EquilibriumLabel l, State s, bool exists, std::string reason) {
    Equilibrium e;
    e.label = l;
    e.state = s;
    e.exists = exists;
    e.existence_reason = std::move(reason);
    return e;
}

/// Mosquito-positive state at fixed w: L = K_v(w)(1 - 1/N), A = (nu_L/mu_A) L.
inline Equilibrium positive_at(const ModelParams& p, EquilibriumLabel l, double w, double N) {
    const auto& e = p.ento();
    if (!(N > 1.0)) return make_equilibrium(l, State{0.0, 0.0, w}, false, "N <= 1");
    const double L = carrying_capacity(w, p.habitat()) * (1.0 - 1.0 / N);
    return make_equilibrium(l, State{L, e.nu_L / e.mu_A * L, w}, true, "N > 1");
}

} // namespace detail

/// Every closed-form steady state of the configured variant, in label order.
inline EquilibriumSet enumerate_equilibria(const ModelParams& p) {
    using L = EquilibriumLabel;
    using detail::make_equilibrium;
    using detail::positive_at;
    const double N = basic_offspring_number(p.ento());
    EquilibriumSet out;
    switch (p.variant()) {
    case ModelVariant::ConstantPayoff:
        out.items.push_back(make_equilibrium(L::E01, {0, 0, 0}, true, "always"));
        out.items.push_back(make_equilibrium(L::E02, {0, 0, 1}, true, "always"));
        out.items.push_back(positive_at(p, L::E03, 0.0, N));
        out.items.push_back(positive_at(p, L::E04, 1.0, N));
        out.degenerate_continuum = p.behavior().r_c == p.behavior().r_d;
        break;
    case ModelVariant::ConstantPayoffWithIntervention: {
        const auto ws = intervention_w_star(p);
        const bool w_ok = ws && *ws >= 0.0 && *ws <= 1.0;
        const std::string w_reason =
            ws ? "gamma/(k(r_c - r_d)) = " + std::to_string(*ws) + " outside [0, 1]"
               : std::string("gamma/(k(r_c - r_d)) outside [0, 1] (r_c <= r_d)");
        const double w = w_ok ? *ws : 0.0;
        out.items.push_back(make_equilibrium(L::E01_tilde, {0, 0, w}, w_ok,
                                             w_ok ? "gamma/(k(r_c - r_d)) in [0, 1]" : w_reason));
        out.items.push_back(make_equilibrium(L::E02, {0, 0, 1}, true, "always"));
        if (w_ok) {
            out.items.push_back(positive_at(p, L::E03_tilde, w, N));
        } else {
            auto e3 = positive_at(p, L::E03_tilde, 0.0, N);
            e3.exists = false;
            e3.state = State{0, 0, 0};
            e3.existence_reason = N > 1.0 ? w_reason : "N <= 1; " + w_reason;
            out.items.push_back(std::move(e3));
        }
        out.items.push_back(positive_at(p, L::E04, 1.0, N));
        break;
    }
    case ModelVariant::PrevalenceDependent:
        out.items.push_back(make_equilibrium(L::E01, {0, 0, 0}, true, "always"));
        out.items.push_back(make_equilibrium(L::E02, {0, 0, 1}, true, "always"));
        out.items.push_back(positive_at(p, L::E03, 0.0, N));
        out.items.push_back(positive_at(p, L::E04, 1.0, N));
        out.items.push_back(e05(p));
        break;
    }
    return out;
}

} // namespace mosqgame

#endif
