#ifndef MOSQGAME_PARAMS_HPP
#define MOSQGAME_PARAMS_HPP

#include <cmath>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace mosqgame {

// Rates are per day, populations are absolute mosquito counts.

struct EntomologicalParams {
    double r = 0.5;      ///< female sex ratio, (0, 1]
    double b = 10.0;     ///< eggs per female per day
    double nu_L = 0.067; ///< aquatic -> adult transition rate
    double mu_L = 0.62;  ///< aquatic death rate
    double mu_A = 0.04;  ///< adult death rate
};

struct BehaviorParams {
    double k = 0.8;     ///< imitation rate
    double r_c = 1.5;   ///< perceived risk of control cost
    double r_d = 1.0;   ///< perceived risk of infection
    double m = 0.3;     ///< sensitivity per mosquito (prevalence-dependent payoff only)
    double gamma = 0.0; ///< public-health action rate (intervention variant only)
};

struct HabitatParams {
    double K_max = 2e6;
    double K_min = 1e6;
};

enum class ModelVariant { ConstantPayoff, ConstantPayoffWithIntervention, PrevalenceDependent };

inline std::string_view to_string(ModelVariant v) {
    switch (v) {
    case ModelVariant::ConstantPayoff: return "constant_payoff";
    case ModelVariant::ConstantPayoffWithIntervention: return "constant_payoff_intervention";
    case ModelVariant::PrevalenceDependent: return "prevalence_dependent";
    }
    return "unknown";
}

inline ModelVariant variant_from_string(std::string_view s) {
    if (s == "constant_payoff") return ModelVariant::ConstantPayoff;
    if (s == "constant_payoff_intervention") return ModelVariant::ConstantPayoffWithIntervention;
    if (s == "prevalence_dependent") return ModelVariant::PrevalenceDependent;
    throw InvalidParameter("unknown model variant '" + std::string(s) + "'");
}

/// One point (L_v, A_v, w) of phase space.
struct State {
    double L_v = 0.0;
    double A_v = 0.0;
    double w = 0.0;

    friend bool operator==(const State&, const State&) = default;
};

/// Time derivatives of a State, per day.
struct Rates {
    double dL_v = 0.0;
    double dA_v = 0.0;
    double dw = 0.0;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter(what);
}

inline bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

} // namespace detail

/// Complete, validated parameter bundle for one model variant.
///
/// Every sub-bundle is checked once at construction; downstream code may
/// assume all invariants hold. Use `with()` to derive a modified copy,
/// which is re-validated.
class ModelParams {
public:
    ModelParams(ModelVariant variant, EntomologicalParams ento, BehaviorParams behavior,
                HabitatParams habitat)
        : variant_(variant), ento_(ento), behavior_(behavior), habitat_(habitat) {
        validate();
    }

    [[nodiscard]] ModelVariant variant() const noexcept { return variant_; }
    [[nodiscard]] const EntomologicalParams& ento() const noexcept { return ento_; }
    [[nodiscard]] const BehaviorParams& behavior() const noexcept { return behavior_; }
    [[nodiscard]] const HabitatParams& habitat() const noexcept { return habitat_; }

    /// Ratio r_c / r_d, the quantity most stability thresholds depend on.
    [[nodiscard]] double risk_ratio() const noexcept { return behavior_.r_c / behavior_.r_d; }

    /// Upper bound of the invariant box for A_v: (nu_L / mu_A) K_max.
    [[nodiscard]] double adult_bound() const noexcept {
        return ento_.nu_L / ento_.mu_A * habitat_.K_max;
    }

    [[nodiscard]] ModelParams with_variant(ModelVariant v) const {
        return {v, ento_, behavior_, habitat_};
    }
    [[nodiscard]] ModelParams with(EntomologicalParams e) const {
        return {variant_, e, behavior_, habitat_};
    }
    [[nodiscard]] ModelParams with(BehaviorParams b) const {
        return {variant_, ento_, b, habitat_};
    }
    [[nodiscard]] ModelParams with(HabitatParams h) const {
        return {variant_, ento_, behavior_, h};
    }

private:
    void validate() const {
        using detail::positive_finite;
        using detail::require;
        require(positive_finite(ento_.r) && ento_.r <= 1.0, "sex ratio r must lie in (0, 1]");
        require(positive_finite(ento_.b), "egg-laying rate b must be > 0");
        require(positive_finite(ento_.nu_L), "nu_L must be > 0");
        require(positive_finite(ento_.mu_L), "mu_L must be > 0");
        require(positive_finite(ento_.mu_A), "mu_A must be > 0");
        require(positive_finite(behavior_.k), "imitation rate k must be > 0");
        require(positive_finite(behavior_.r_c), "r_c must be > 0");
        require(positive_finite(behavior_.r_d), "r_d must be > 0");
        require(std::isfinite(behavior_.m) && behavior_.m >= 0.0, "m must be >= 0");
        require(std::isfinite(behavior_.gamma) && behavior_.gamma >= 0.0, "gamma must be >= 0");
        if (variant_ == ModelVariant::PrevalenceDependent)
            require(behavior_.m > 0.0, "m must be > 0 for the prevalence-dependent variant");
        if (variant_ == ModelVariant::ConstantPayoffWithIntervention)
            require(behavior_.gamma > 0.0, "gamma must be > 0 for the intervention variant");
        require(positive_finite(habitat_.K_min), "K_min must be > 0");
        require(positive_finite(habitat_.K_max), "K_max must be > 0");
        require(habitat_.K_min < habitat_.K_max, "K_min must be strictly below K_max");
    }

    ModelVariant variant_;
    EntomologicalParams ento_;
    BehaviorParams behavior_;
    HabitatParams habitat_;
};

} // namespace mosqgame

#endif
