#include <gtest/gtest.h>

#include <random>

#include "draws.hpp"
#include "mosqgame/model.hpp"

using namespace mosqgame;

namespace {

ModelParams fig2(double b = 10.0) {
    return {ModelVariant::ConstantPayoff, {0.5, b, 0.067, 0.62, 0.04}, {0.8, 2.5, 2.0, 0.3, 0.0}, {2e6, 1e6}};
}

} // namespace

TEST(OffspringNumber, CaptionValues) {
    // Hand-computed: 0.5 * 10 * 0.067 / (0.687 * 0.04).
    EXPECT_NEAR(basic_offspring_number({0.5, 10.0, 0.067, 0.62, 0.04}), 0.335 / 0.02748, 1e-12);
    EXPECT_NEAR(basic_offspring_number({0.5, 1.4, 0.04, 0.03, 0.2}), 2.0, 1e-14);
    EXPECT_LT(basic_offspring_number({0.5, 0.5, 0.067, 0.62, 0.04}), 1.0);
}

TEST(OffspringNumber, DerivedAlpha) {
    const ModelParams p{ModelVariant::PrevalenceDependent, {0.5, 1.4, 0.04, 0.03, 0.2}, {0.8, 9000, 1, 0.3, 0},
                        {2e6, 1e5}};
    const auto d = derived(p);
    EXPECT_NEAR(d.alpha, 0.3 * 0.04 / 0.2, 1e-15);
    EXPECT_NEAR(d.N, 2.0, 1e-14);
}

TEST(Params, RejectsInvalidValues) {
    const EntomologicalParams e{0.5, 10.0, 0.067, 0.62, 0.04};
    const BehaviorParams b{0.8, 2.5, 2.0, 0.3, 0.0};
    const HabitatParams h{2e6, 1e6};
    const auto v = ModelVariant::ConstantPayoff;
    EXPECT_THROW((ModelParams{v, {0.0, 10, 0.067, 0.62, 0.04}, b, h}), InvalidParameter);
    EXPECT_THROW((ModelParams{v, {1.5, 10, 0.067, 0.62, 0.04}, b, h}), InvalidParameter);
    EXPECT_THROW((ModelParams{v, {0.5, -1, 0.067, 0.62, 0.04}, b, h}), InvalidParameter);
    EXPECT_THROW((ModelParams{v, e, {0.0, 2.5, 2.0, 0.3, 0.0}, h}), InvalidParameter);
    EXPECT_THROW((ModelParams{v, e, {0.8, 2.5, 2.0, 0.3, 0.0}, {1e6, 1e6}}), InvalidParameter);
    EXPECT_THROW((ModelParams{v, e, {0.8, 2.5, 2.0, 0.3, 0.0}, {1e6, 2e6}}), InvalidParameter);
    EXPECT_THROW((ModelParams{v, e, {0.8, std::nan(""), 2.0, 0.3, 0.0}, h}), InvalidParameter);
    EXPECT_THROW((ModelParams{ModelVariant::PrevalenceDependent, e, {0.8, 2.5, 2.0, 0.0, 0.0}, h}),
                 InvalidParameter);
    EXPECT_THROW((ModelParams{ModelVariant::ConstantPayoffWithIntervention, e, b, h}), InvalidParameter);
    EXPECT_NO_THROW((ModelParams{v, e, b, h}));
}

TEST(Params, VariantNamesRoundTrip) {
    for (auto v : {ModelVariant::ConstantPayoff, ModelVariant::ConstantPayoffWithIntervention,
                   ModelVariant::PrevalenceDependent})
        EXPECT_EQ(variant_from_string(to_string(v)), v);
}

TEST(CarryingCapacity, LinearInW) {
    const HabitatParams h{2e6, 1e6};
    EXPECT_DOUBLE_EQ(carrying_capacity(0.0, h), 2e6);
    EXPECT_DOUBLE_EQ(carrying_capacity(1.0, h), 1e6);
    EXPECT_DOUBLE_EQ(carrying_capacity(0.25, h), 1.75e6);
}

TEST(Rhs, HandComputedValues) {
    const auto p = fig2();
    const State s{1e5, 2e5, 0.5};
    const auto f = rhs(p, s);
    const double K = 1.5e6;
    EXPECT_NEAR(f.dL_v, 0.5 * 10 * 2e5 * (1 - 1e5 / K) - 0.687 * 1e5, 1e-6);
    EXPECT_NEAR(f.dA_v, 0.067 * 1e5 - 0.04 * 2e5, 1e-9);
    EXPECT_NEAR(f.dw, 0.8 * 0.25 * (2.0 - 2.5), 1e-15);
}

TEST(Rhs, VariantBehaviourTerms) {
    const EntomologicalParams e{0.5, 10.0, 0.067, 0.62, 0.04};
    const State s{1e5, 2e5, 0.4};
    const ModelParams inter{ModelVariant::ConstantPayoffWithIntervention, e, {0.8, 2.5, 2.0, 0.3, 0.4},
                            {2e6, 1e6}};
    EXPECT_NEAR(rhs(inter, s).dw, 0.8 * 0.24 * (2.0 - 2.5) + 0.4 * 0.6, 1e-15);
    const ModelParams prev{ModelVariant::PrevalenceDependent, e, {0.8, 9000, 1.0, 0.3, 0.0}, {2e6, 1e5}};
    EXPECT_NEAR(rhs(prev, s).dw, 0.8 * 0.24 * (1.0 * 0.3 * 2e5 - 9000), 1e-9);
}

TEST(Rhs, RejectsStatesOutsideBox) {
    const auto p = fig2();
    EXPECT_THROW(rhs(p, State{-10, 0, 0.5}), InvalidState);
    EXPECT_THROW(rhs(p, State{0, 0, 1.1}), InvalidState);
    EXPECT_THROW(rhs(p, State{3e6, 0, 0.5}), InvalidState);
    EXPECT_THROW(rhs(p, State{0, 0, std::nan("")}), InvalidState);
    EXPECT_NO_THROW(rhs(p, State{2e6, p.adult_bound(), 1.0}));
}

TEST(Rhs, PayoffNotControlRejectsNegativeAdults) {
    EXPECT_THROW(payoff_not_control(ModelVariant::PrevalenceDependent, -1.0, BehaviorParams{}), InvalidState);
    EXPECT_DOUBLE_EQ(payoff_not_control(ModelVariant::ConstantPayoff, 5.0, BehaviorParams{}), -1.0);
}

// The box [0, K_max] x [0, (nu_L/mu_A) K_max] x [0, 1] is forward invariant:
// on every face the field points inward or along the face.
TEST(Rhs, FieldPointsIntoBoxOnEveryFace) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 3000; ++i) {
        const auto p = draws::random_params(rng, draws::variant_at(i));
        const double Lm = p.habitat().K_max, Am = p.adult_bound();
        const State s{u(rng) * Lm, u(rng) * Am, u(rng)};
        EXPECT_GE(rhs(p, State{0.0, s.A_v, s.w}).dL_v, 0.0);
        EXPECT_LE(rhs(p, State{Lm, s.A_v, s.w}).dL_v, 1e-12 * Lm);
        EXPECT_GE(rhs(p, State{s.L_v, 0.0, s.w}).dA_v, 0.0);
        EXPECT_LE(rhs(p, State{s.L_v, Am, s.w}).dA_v, 1e-12 * Am);
        EXPECT_GE(rhs(p, State{s.L_v, s.A_v, 0.0}).dw, 0.0);
        EXPECT_LE(rhs(p, State{s.L_v, s.A_v, 1.0}).dw, 0.0);
    }
}

TEST(Rhs, ScaledResidualIsZeroAtRest) {
    const auto p = fig2(0.5);
    EXPECT_EQ(scaled_residual(State{0, 0, 0}, rhs(p, State{0, 0, 0})), 0.0);
}
