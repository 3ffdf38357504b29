#include <hommap/pipelines.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace hommap;

namespace {

const ProblemFamily<Series2D>& planar_family()
{
    static const auto fam = make_family(MapParams2D{-2.5, 1.0}, ContinuationParam::delta, 100);
    return fam;
}

RootParams<Series2D> unit_seed()
{
    static const auto root = planar_root(MapParams2D{-2.5, 1.0}).root_params;
    return root;
}

const std::vector<ContinuationRecord<Series2D>>& planar_run()
{
    static const auto run = continue_parameter(planar_family(), 1.0, 0.9, unit_seed());
    return run;
}

} // namespace

TEST(SqrtFit, SyntheticModel)
{
    std::vector<std::pair<double, double>> rows;
    for (int i = 0; i <= 20; ++i) {
        const double d = 0.6 + 0.02 * i;
        rows.emplace_back(d, 2.0 * std::sqrt(d - 0.5));
    }
    auto fit = fit_sqrt_law(rows);
    EXPECT_NEAR(fit.amplitude_a, 2.0, 1e-12);
    EXPECT_NEAR(fit.delta_c, 0.5, 1e-12);
    EXPECT_LT(fit.residual_rms, 1e-12);
    EXPECT_EQ(fit.points_used, 21);
    // The sign of det does not matter.
    for (auto& r : rows)
        r.second = -r.second;
    EXPECT_NEAR(fit_sqrt_law(rows).delta_c, 0.5, 1e-12);
}

TEST(SqrtFit, InvalidInputs)
{
    EXPECT_THROW(fit_sqrt_law({{1.0, 1.0}, {0.9, 0.5}}), FitInvalidError);
    EXPECT_THROW(fit_sqrt_law({{1.0, 1.0}, {0.9, 0.0}, {0.8, 0.5}}), FitInvalidError);
    EXPECT_THROW(fit_sqrt_law({{1.0, 1.0}, {1.0, 0.9}, {1.0, 0.5}}), FitInvalidError);
    EXPECT_THROW(fit_sqrt_law({{1.0, 0.1}, {0.9, 0.5}, {0.8, 1.0}}), FitInvalidError);
}

TEST(Continuation, Validation)
{
    EXPECT_THROW(with_param(MapParams2D{}, ContinuationParam::b, 0.1), ConfigError);
    EXPECT_EQ(with_param(MapParams4D{}, ContinuationParam::b, 0.3).b, 0.3);
    EXPECT_EQ(with_param(MapParams4D{}, ContinuationParam::delta, 0.9).delta, 0.9);
    ContinuationOptions opt;
    opt.min_step = 1e-2;
    EXPECT_THROW(continue_parameter(planar_family(), 1.0, 0.9, unit_seed(), opt), ConfigError);
    EXPECT_THROW(continue_parameter(planar_family(), 0.96, 0.9, unit_seed()), CannotBeginError);
}

TEST(Continuation, PlanarTangency)
{
    const auto& run = planar_run();
    ASSERT_GE(run.size(), 3u);
    EXPECT_EQ(run.front().param_value, 1.0);
    EXPECT_TRUE(run.front().solution);
    EXPECT_FALSE(run.back().solution);
    for (std::size_t i = 1; i < run.size(); ++i)
        EXPECT_LT(run[i].param_value, run[i - 1].param_value);
    const double last = last_success(run);
    EXPECT_NEAR(last, 0.971397, 1e-5);
    // Failure is only declared once the step has shrunk below min_step.
    EXPECT_LT(last - run.back().param_value, 2.0 * ContinuationOptions{}.min_step);
}

TEST(Continuation, DeterminantShrinksNearTangency)
{
    double prev = INFINITY;
    int seen = 0;
    for (const auto& r : planar_run()) {
        if (!r.solution || r.param_value > 0.99)
            continue;
        const double d = std::abs(r.solution->transversality_det);
        EXPECT_LT(d, prev) << r.param_value;
        prev = d;
        ++seen;
    }
    EXPECT_GE(seen, 10);
}

TEST(Continuation, FinerMinStepNarrowsBracket)
{
    ContinuationOptions fine;
    fine.min_step = ContinuationOptions{}.min_step / 10.0;
    auto run = continue_parameter(planar_family(), 1.0, 0.9, unit_seed(), fine);
    const double coarse = last_success(planar_run());
    const double refined = last_success(run);
    EXPECT_LE(refined, coarse);
    EXPECT_NEAR(refined, 0.971397, 1e-5);
}

TEST(Continuation, ReachesEndWhenRootPersists)
{
    auto run = continue_parameter(planar_family(), 1.0, 0.995, unit_seed());
    EXPECT_EQ(run.back().param_value, 0.995);
    ASSERT_TRUE(run.back().solution);
    EXPECT_EQ(last_success(run), 0.995);
}

TEST(TangencyFit, PlanarCriticalParameter)
{
    const auto& run = planar_run();
    auto rows = tangency_table(planar_family(), run);
    ASSERT_EQ(rows.size(), static_cast<std::size_t>(default_fit_points));
    const double last = last_success(run);
    EXPECT_DOUBLE_EQ(rows.back().first, last);
    EXPECT_NEAR(rows.front().first, last + default_fit_window, 1e-15);
    auto fit = fit_sqrt_law(rows);
    EXPECT_NEAR(fit.delta_c, 0.9713965579, 1e-5);
    EXPECT_LE(fit.delta_c, last);
    EXPECT_GT(fit.amplitude_a, 0.0);
}

TEST(SampleBranch, StopsAtFirstFailure)
{
    auto rows = sample_branch(planar_family(), {1.0, 0.999, 0.5, 0.998}, unit_seed());
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_TRUE(rows[0].solution);
    EXPECT_TRUE(rows[1].solution);
    EXPECT_FALSE(rows[2].solution);
}
