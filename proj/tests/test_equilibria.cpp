#include <gtest/gtest.h>

#include <random>

#include "draws.hpp"
#include "mosqgame/equilibria.hpp"

using namespace mosqgame;

namespace {

ModelParams fig4(double x = 9000.0) {
    return {ModelVariant::PrevalenceDependent, {0.5, 1.4, 0.04, 0.03, 0.2}, {0.8, x, 1.0, 0.3, 0.0}, {2e6, 1e5}};
}

} // namespace

TEST(Equilibria, ConstantPayoffStates) {
    const ModelParams p{ModelVariant::ConstantPayoff, {0.5, 10, 0.067, 0.62, 0.04}, {0.8, 2.5, 2.0, 0.3, 0},
                        {2e6, 1e6}};
    const auto eqs = enumerate_equilibria(p);
    ASSERT_EQ(eqs.items.size(), 4u);
    const double f = 1.0 - 0.02748 / 0.335;
    const auto* e3 = eqs.find(EquilibriumLabel::E03);
    ASSERT_TRUE(e3 && e3->exists);
    EXPECT_NEAR(e3->state.L_v, 2e6 * f, 1e-6);
    EXPECT_NEAR(e3->state.A_v, 0.067 / 0.04 * 2e6 * f, 1e-6);
    EXPECT_EQ(e3->state.w, 0.0);
    const auto* e4 = eqs.find(EquilibriumLabel::E04);
    EXPECT_NEAR(e4->state.L_v, 1e6 * f, 1e-6);
    EXPECT_EQ(e4->state.w, 1.0);
    EXPECT_FALSE(eqs.degenerate_continuum);
}

TEST(Equilibria, NoMosquitoStatesBelowThreshold) {
    const ModelParams p{ModelVariant::ConstantPayoff, {0.5, 0.5, 0.067, 0.62, 0.04}, {0.8, 2.5, 2.0, 0.3, 0},
                        {2e6, 1e6}};
    const auto eqs = enumerate_equilibria(p);
    EXPECT_TRUE(eqs.find(EquilibriumLabel::E01)->exists);
    EXPECT_TRUE(eqs.find(EquilibriumLabel::E02)->exists);
    EXPECT_FALSE(eqs.find(EquilibriumLabel::E03)->exists);
    EXPECT_FALSE(eqs.find(EquilibriumLabel::E04)->exists);
}

TEST(Equilibria, EqualRisksFlagContinuum) {
    const ModelParams p{ModelVariant::ConstantPayoff, {0.5, 10, 0.067, 0.62, 0.04}, {0.8, 2.0, 2.0, 0.3, 0},
                        {2e6, 1e6}};
    EXPECT_TRUE(enumerate_equilibria(p).degenerate_continuum);
}

TEST(Equilibria, E05ReferenceValues) {
    const auto p = fig4();
    const auto eq = e05(p);
    ASSERT_TRUE(eq.exists);
    // A* = x/m, L* = mu_A x / (m nu_L), w* from the interval (3000, 60000).
    EXPECT_NEAR(eq.state.A_v, 30000.0, 1e-9);
    EXPECT_NEAR(eq.state.L_v, 0.2 * 9000 / (0.3 * 0.04), 1e-9);
    EXPECT_NEAR(eq.state.w, (60000.0 - 9000.0) / 57000.0, 1e-14);
    const auto [lo, hi] = e05_existence_interval(p);
    EXPECT_NEAR(lo, 3000.0, 1e-9);
    EXPECT_NEAR(hi, 60000.0, 1e-9);
}

TEST(Equilibria, E05RequiresPrevalenceVariantAndThreshold) {
    const ModelParams c{ModelVariant::ConstantPayoff, {0.5, 10, 0.067, 0.62, 0.04}, {0.8, 2.5, 2.0, 0.3, 0},
                        {2e6, 1e6}};
    EXPECT_THROW(e05(c), InvalidParameter);
    auto low = fig4();
    low = low.with(EntomologicalParams{0.5, 0.5, 0.04, 0.03, 0.2});
    EXPECT_FALSE(e05(low).exists);
    EXPECT_THROW(e05_existence_interval(low), InvalidParameter);
}

TEST(Equilibria, E05EndpointsAreBoundary) {
    const auto [lo, hi] = e05_existence_interval(fig4());
    const auto at_lo = e05(fig4(lo));
    EXPECT_TRUE(at_lo.exists);
    EXPECT_TRUE(at_lo.on_boundary);
    EXPECT_EQ(at_lo.state.w, 1.0);
    const auto at_hi = e05(fig4(hi));
    EXPECT_TRUE(at_hi.on_boundary);
    EXPECT_EQ(at_hi.state.w, 0.0);
    EXPECT_FALSE(e05(fig4(2999.0)).exists);
    EXPECT_FALSE(e05(fig4(60001.0)).exists);
}

// Every existing steady state is a fixed point of the vector field.
TEST(EquilibriaProperty, ResidualsVanish) {
    std::mt19937_64 rng(3);
    int checked = 0;
    for (int i = 0; i < 3000; ++i) {
        const auto p = draws::random_params(rng, draws::variant_at(i));
        for (const auto& e : enumerate_equilibria(p).items) {
            if (!e.exists) continue;
            const auto f = rhs(p, e.state);
            const auto& en = p.ento();
            // Rates against the size of their own terms.
            const double scaleL = en.r * en.b * e.state.A_v + (en.nu_L + en.mu_L) * e.state.L_v;
            const double scaleA = en.nu_L * e.state.L_v + en.mu_A * e.state.A_v;
            EXPECT_LE(std::abs(f.dL_v), 1e-12 * std::max(1.0, scaleL));
            EXPECT_LE(std::abs(f.dA_v), 1e-12 * std::max(1.0, scaleA));
            const auto& b = p.behavior();
            EXPECT_LE(std::abs(f.dw), 1e-12 * std::max(1.0, b.k * (b.r_c + b.r_d * (1.0 + b.m * e.state.A_v)) + b.gamma));
            ++checked;
        }
    }
    EXPECT_GT(checked, 5000);
}

// w* lies in [0, 1] exactly when r_c/r_d lies in the existence interval.
TEST(EquilibriaProperty, E05WeightInUnitIntervalIffRatioInside) {
    std::mt19937_64 rng(5);
    int inside = 0;
    for (int i = 0; i < 5000; ++i) {
        const auto p = draws::random_params(rng, ModelVariant::PrevalenceDependent);
        if (!(basic_offspring_number(p.ento()) > 1.0)) continue;
        const auto [lo, hi] = e05_existence_interval(p);
        const double x = p.risk_ratio();
        const auto eq = e05(p);
        const bool w_ok = eq.state.w >= 0.0 && eq.state.w <= 1.0;
        const bool x_ok = x >= lo && x <= hi;
        EXPECT_EQ(w_ok, x_ok);
        EXPECT_EQ(eq.exists, x_ok);
        inside += x_ok;
    }
    EXPECT_GT(inside, 100);
}

// Control lowers the carrying capacity, so the full-control state carries fewer mosquitoes.
TEST(EquilibriaProperty, FullControlHasFewerMosquitoes) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
        const auto p = draws::random_params(rng, ModelVariant::ConstantPayoff);
        const auto eqs = enumerate_equilibria(p);
        const auto* e3 = eqs.find(EquilibriumLabel::E03);
        const auto* e4 = eqs.find(EquilibriumLabel::E04);
        if (!e3->exists) continue;
        EXPECT_GT(e3->state.L_v, e4->state.L_v);
        EXPECT_GT(e3->state.A_v, e4->state.A_v);
    }
}

TEST(Equilibria, InterventionWeight) {
    const ModelParams p{ModelVariant::ConstantPayoffWithIntervention, {0.5, 10, 0.067, 0.62, 0.04},
                        {0.8, 3.0, 2.0, 0.3, 0.4}, {2e6, 1e6}};
    ASSERT_TRUE(intervention_w_star(p));
    EXPECT_DOUBLE_EQ(*intervention_w_star(p), 0.5);
    const auto eqs = enumerate_equilibria(p);
    const auto* e3 = eqs.find(EquilibriumLabel::E03_tilde);
    ASSERT_TRUE(e3 && e3->exists);
    EXPECT_DOUBLE_EQ(e3->state.w, 0.5);
    EXPECT_NEAR(e3->state.L_v, 1.5e6 * (1.0 - 0.02748 / 0.335), 1e-6);
    EXPECT_TRUE(eqs.find(EquilibriumLabel::E01_tilde)->exists);

    const ModelParams neg{ModelVariant::ConstantPayoffWithIntervention, {0.5, 10, 0.067, 0.62, 0.04},
                          {0.8, 1.5, 2.0, 0.3, 0.4}, {2e6, 1e6}};
    EXPECT_FALSE(intervention_w_star(neg));
    EXPECT_FALSE(enumerate_equilibria(neg).find(EquilibriumLabel::E03_tilde)->exists);
    // gamma/k exceeds r_c - r_d: w* > 1, no interior state.
    const ModelParams big{ModelVariant::ConstantPayoffWithIntervention, {0.5, 10, 0.067, 0.62, 0.04},
                          {0.8, 2.2, 2.0, 0.3, 0.4}, {2e6, 1e6}};
    EXPECT_GT(*intervention_w_star(big), 1.0);
    EXPECT_FALSE(enumerate_equilibria(big).find(EquilibriumLabel::E01_tilde)->exists);
}
