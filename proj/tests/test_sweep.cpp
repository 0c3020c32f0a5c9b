#include <gtest/gtest.h>

#include "mosqgame/io.hpp"
#include "mosqgame/sweep.hpp"

using namespace mosqgame;

namespace {

ModelParams dengue(ModelVariant v = ModelVariant::ConstantPayoff) {
    return {v, {0.5, 10.0, 0.067, 0.62, 0.04}, {0.8, 2.5, 2.0, 0.3, 0.0}, {2e6, 1e6}};
}

ModelParams fig4(double k = 0.8, double x = 9000.0) {
    return {ModelVariant::PrevalenceDependent, {0.5, 1.4, 0.04, 0.03, 0.2}, {k, x, 1.0, 0.3, 0.0}, {2e6, 1e5}};
}

SweepSpec fig4_spec() {
    SweepSpec s;
    s.base = fig4();
    s.s0 = {2e4, 2e4, 0.3};
    s.t1 = 1000.0;
    return s;
}

} // namespace

TEST(SweepAxis, LinearAndLogValues) {
    const SweepAxis lin{"b", 1.0, 3.0, 3, false};
    EXPECT_EQ(lin.values(), (std::vector<double>{1.0, 2.0, 3.0}));
    const SweepAxis lg{"rc_over_rd", 10.0, 1000.0, 3, true};
    EXPECT_NEAR(lg.value(1), 100.0, 1e-12);
    EXPECT_NEAR(lg.value(2), 1000.0, 1e-10);
    EXPECT_DOUBLE_EQ((SweepAxis{"k", 0.5, 9.0, 1, false}).value(0), 0.5);
}

TEST(SweepAxis, Validation) {
    EXPECT_THROW(validate_axis({"q", 0, 1, 2, false}), InvalidParameter);
    EXPECT_THROW(validate_axis({"b", 0, 1, 0, false}), InvalidParameter);
    EXPECT_THROW(validate_axis({"b", 1, 1, 2, false}), InvalidParameter);
    EXPECT_THROW(validate_axis({"b", 0, 1, 2, true}), InvalidParameter);
    EXPECT_NO_THROW(validate_axis({"b", 2, 2, 1, false}));
}

TEST(ApplyAxis, OffspringNumberSetsFecundity) {
    const auto p = apply_axis(dengue(), "N", 2.0);
    EXPECT_NEAR(basic_offspring_number(p.ento()), 2.0, 1e-14);
    EXPECT_NEAR(apply_axis(dengue(), "rc_over_rd", 3.0).behavior().r_c, 6.0, 0.0);
    EXPECT_NEAR(apply_axis(dengue(), "rc_minus_rd", -0.5).behavior().r_c, 1.5, 0.0);
    EXPECT_THROW(apply_axis(dengue(), "rc_minus_rd", -3.0), InvalidParameter);
    EXPECT_THROW(apply_axis(dengue(), "nope", 1.0), InvalidParameter);
}

TEST(Sweep, SingleCellMatchesDirectRun) {
    SweepSpec s;
    s.base = dengue();
    s.s0 = {2e4, 2e4, 0.5};
    s.t1 = 500.0;
    s.axis1 = {"b", 10.0, 10.0, 1, false};
    s.axis2 = {"rc_minus_rd", 0.5, 0.5, 1, false};
    const auto r = sweep_regions(s);
    ASSERT_EQ(r.cells.size(), 1u);
    const auto& c = r.at(0, 0);
    const auto p = *c.params;
    const auto out = detect_attractor(integrate(p, s.s0, 0.0, 500.0), enumerate_equilibria(p), p);
    EXPECT_EQ(c.simulated_label, out.label());
    EXPECT_EQ(c.simulated_label, "E03");
    EXPECT_EQ(c.analytic_label, "E03");
    EXPECT_DOUBLE_EQ(c.ratio, 1.25);
    EXPECT_DOUBLE_EQ(c.horizon, 500.0);
}

TEST(Sweep, ResultIndependentOfThreadCount) {
    auto s = fig4_spec();
    s.axis1 = {"N", 1.6, 2.4, 3, false};
    s.axis2 = {"rc_over_rd", 5000.0, 20000.0, 3, true};
    s.threads = 1;
    const auto a = sweep_oscillations(s);
    s.threads = 4;
    const auto b = sweep_oscillations(s);
    ASSERT_EQ(a.cells.size(), b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        const auto& x = a.cells[i];
        const auto& y = b.cells[i];
        EXPECT_EQ(x.simulated_label, y.simulated_label);
        EXPECT_EQ(x.horizon, y.horizon);
        ASSERT_EQ(x.metrics.has_value(), y.metrics.has_value());
        if (x.metrics)
            for (std::size_t k = 0; k < 3; ++k) {
                EXPECT_EQ(x.metrics->components[k].amplitude, y.metrics->components[k].amplitude);
                EXPECT_EQ(x.metrics->components[k].period, y.metrics->components[k].period);
            }
    }
}

// Baseline model: every simulated cell lands on the analytically stable state.
TEST(Sweep, BaselineGridAgrees) {
    SweepSpec s;
    s.base = dengue();
    s.s0 = {2e4, 2e4, 0.5};
    s.t1 = 500.0;
    s.axis1 = {"b", 0.25, 15.0, 8, false};
    s.axis2 = {"rc_minus_rd", -1.0, 1.0, 8, false};
    const auto r = sweep_regions(s);
    for (const auto& c : r.cells) {
        EXPECT_TRUE(c.error.empty()) << c.error;
        EXPECT_EQ(c.analytic_label, c.simulated_label) << "b=" << c.axis1 << " diff=" << c.axis2;
    }
}

// Prevalence model on a coarse grid: decided cells agree with the theorems.
TEST(Sweep, PrevalenceGridAgrees) {
    SweepSpec s;
    s.base = dengue(ModelVariant::PrevalenceDependent).with(HabitatParams{2e6, 1e5});
    s.base = s.base.with(BehaviorParams{0.8, 2e5, 1.0, 0.3, 0.0});
    s.s0 = {2e4, 2e4, 0.3};
    s.t1 = 300.0;
    s.axis1 = {"b", 0.25, 15.0, 10, false};
    s.axis2 = {"rc_over_rd", 1e3, 3e6, 10, true};
    const auto r = sweep_regions(s);
    std::size_t decided = 0, mismatched = 0;
    for (const auto& c : r.cells) {
        if (c.simulated_label == "undecided") continue;
        ++decided;
        if (c.analytic_label != c.simulated_label) ++mismatched;
    }
    EXPECT_GT(decided, 90u);
    EXPECT_LE(mismatched * 50, decided);
}

TEST(Sweep, OscillationModeSkipsStableCells) {
    auto s = fig4_spec();
    s.axis1 = {"N", 2.0, 2.0, 1, false};
    s.axis2 = {"rc_over_rd", 1000.0, 9000.0, 2, false};
    const auto r = sweep_oscillations(s);
    EXPECT_EQ(r.at(0, 0).analytic_label, "E04");
    EXPECT_EQ(r.at(0, 0).simulated_label, "skipped");
    EXPECT_FALSE(r.at(0, 0).metrics);
    EXPECT_EQ(r.at(0, 1).simulated_label, "oscillation");
    ASSERT_TRUE(r.at(0, 1).metrics);
    EXPECT_TRUE(r.at(0, 1).metrics->sustained);
}

// Slow behaviour change keeps the interior state stable.
TEST(Sweep, SmallRateGivesStableInteriorState) {
    EXPECT_EQ(analytic_region(fig4(3e-5)), "E05");
    EXPECT_EQ(analytic_region(fig4(0.8)), "oscillation");
    // Below the existence interval everyone controls; above it nobody does.
    EXPECT_EQ(analytic_region(fig4(0.8, 1000.0)), "E04");
    EXPECT_EQ(analytic_region(fig4(0.8, 70000.0)), "E03");
}

TEST(Sweep, OscillationTrendsAlongN) {
    auto s = fig4_spec();
    s.base = fig4(0.8, 19000.0);
    s.axis1 = {"N", 1.4, 2.8, 5, false};
    s.axis2 = {"rc_over_rd", 19000.0, 19000.0, 1, false};
    const auto rows = oscillation_trends(sweep_oscillations(s));
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].cells, 5u);
    EXPECT_DOUBLE_EQ(rows[0].spearman_amplitude, 1.0);
    EXPECT_DOUBLE_EQ(rows[0].spearman_period, -1.0);
}

// Periods inside the Hopf window stay within a 40 to 180 day band.
TEST(Sweep, InteriorPeriodsWithinBand) {
    auto s = fig4_spec();
    s.axis1 = {"N", 1.6, 2.6, 3, false};
    s.axis2 = {"rc_over_rd", 6000.0, 30000.0, 3, true};
    const auto r = sweep_oscillations(s);
    for (const auto& c : r.cells) {
        ASSERT_TRUE(c.metrics) << c.error;
        for (const auto& m : c.metrics->components) {
            EXPECT_GT(m.period, 40.0);
            EXPECT_LT(m.period, 180.0);
        }
    }
}

TEST(Overlay, CurvesFollowOffspringNumber) {
    auto s = fig4_spec();
    s.axis1 = {"N", 0.5, 2.5, 5, false};
    const auto oc = overlay_curves(s);
    ASSERT_EQ(oc.N.size(), 5u);
    EXPECT_EQ(oc.n_equals_one, 1.0);
    EXPECT_EQ(oc.behaviour_threshold, 0.0);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_NEAR(oc.N[i], oc.axis1[i], 1e-12);
        const bool above = oc.N[i] > 1.0;
        EXPECT_EQ(oc.lo[i].has_value(), above);
        if (oc.x1[i] && oc.x2[i]) {
            EXPECT_LE(*oc.lo[i], *oc.x1[i]);
            EXPECT_LT(*oc.x1[i], *oc.x2[i]);
            EXPECT_LE(*oc.x2[i], *oc.hi[i]);
        }
    }
    // The base set at N = 2 gives the (3000, 60000) interval.
    EXPECT_NEAR(*oc.lo[3], 3000.0, 1e-9);
    EXPECT_NEAR(*oc.hi[3], 60000.0, 1e-9);

    SweepSpec si;
    si.base = ModelParams{ModelVariant::ConstantPayoffWithIntervention, dengue().ento(), {0.8, 3.0, 2.0, 0.3, 0.4},
                          {2e6, 1e6}};
    si.axis1 = {"b", 0.25, 15.0, 3, false};
    const auto oi = overlay_curves(si);
    EXPECT_DOUBLE_EQ(oi.behaviour_threshold, 0.5);
    EXPECT_NEAR(*oi.n_equals_one, 0.687 * 0.04 / (0.067 * 0.5), 1e-12);
}

TEST(Sweep, RejectsBadSpecs) {
    auto s = fig4_spec();
    s.axis1 = {"N", 1, 2, 0, false};
    EXPECT_THROW(run_sweep(s), InvalidParameter);
    s = fig4_spec();
    s.t1 = 0.0;
    EXPECT_THROW(run_sweep(s), InvalidParameter);
    s = fig4_spec();
    s.max_horizon_factor = 0.5;
    EXPECT_THROW(run_sweep(s), InvalidParameter);
}

// Cells whose parameters are invalid record an error instead of aborting the grid.
TEST(Sweep, InvalidCellRecordsError) {
    SweepSpec s;
    s.base = dengue();
    s.s0 = {2e4, 2e4, 0.5};
    s.t1 = 200.0;
    s.axis1 = {"b", 10.0, 10.0, 1, false};
    s.axis2 = {"rc_minus_rd", -3.0, 0.5, 2, false};
    const auto r = sweep_regions(s);
    EXPECT_EQ(r.at(0, 0).simulated_label, "error");
    EXPECT_FALSE(r.at(0, 0).error.empty());
    EXPECT_EQ(r.at(0, 1).simulated_label, "E03");
}
