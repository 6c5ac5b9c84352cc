#include <filesystem>

#include "anyplace/bench.hpp"
#include "anyplace/solver.hpp"
#include "helpers.hpp"

namespace anyplace {
namespace {

const std::filesystem::path kScenes = std::filesystem::path(ANYPLACE_ASSET_DIR) / "scenes";

struct Fixture {
    ArmModel arm = default_arm();
    CostNet pce = CostNet::create(61);
    QModel q = QModel::create(62);
    SolveTask task(const std::string& name)
    {
        return make_solve_task(arm, load_scene(kScenes / (name + ".txt")));
    }
};

void expect_monotone(const SolveTrace& t)
{
    for (std::size_t i = 1; i < t.points.size(); ++i) {
        EXPECT_LT(t.points[i].best_cost, t.points[i - 1].best_cost);
        EXPECT_GE(t.points[i].t, t.points[i - 1].t);
    }
    if (t.success()) {
        ASSERT_FALSE(t.points.empty());
        EXPECT_EQ(t.points.back().best_cost, t.best.total_cost);
        EXPECT_EQ(t.points.front().t, t.time_to_first);
        double sum = 0.0;
        for (const auto& p : t.best.chain) {
            EXPECT_TRUE(p.success);
            sum += p.cost;
        }
        EXPECT_NEAR(sum, t.best.total_cost, 1e-9);
    } else {
        EXPECT_TRUE(t.points.empty());
        EXPECT_TRUE(std::isinf(t.best_at(1e9)));
    }
}

TEST(Solver, ExhaustedMethodsAgreeWithTheOracle)
{
    Fixture f;
    const SolveTask task = f.task("scene_5");
    SolveOptions o;
    o.budget = 0.0;
    const auto es = solve(Method::Es, task, o);
    const auto esce = solve(Method::Esce, task, o, &f.pce);
    const auto ours = solve(Method::Ours, task, o, &f.pce, &f.q);
    for (const auto* t : {&es, &esce, &ours}) {
        expect_monotone(*t);
        EXPECT_TRUE(t->exhausted);
        EXPECT_EQ(t->combinations, es.combinations);
    }
    ASSERT_TRUE(es.success());
    // Segment seeds depend on the query only, so every order finds the same minimum.
    EXPECT_EQ(esce.best.total_cost, es.best.total_cost);
    EXPECT_EQ(ours.best.total_cost, es.best.total_cost);
}

TEST(Solver, PruningKeepsTheOptimum)
{
    Fixture f;
    const SolveTask task = f.task("scene_6");
    SolveOptions o;
    o.budget = 0.0;
    const auto pruned = solve(Method::Es, task, o);
    o.prune = false;
    const auto full = solve(Method::Es, task, o);
    EXPECT_EQ(pruned.best.total_cost, full.best.total_cost);
    EXPECT_LE(pruned.plans, full.plans);
}

TEST(Solver, RegraspSceneNeedsAnIntermediatePose)
{
    Fixture f;
    const SolveTask task = f.task("scene_0");
    SolveOptions o;
    o.budget = 0.0;
    o.goal_only = true;
    EXPECT_FALSE(solve(Method::Es, task, o).success());
    o.goal_only = false;
    o.stop_at_first = true;
    const auto t = solve(Method::Ours, task, o, &f.pce, &f.q);
    ASSERT_TRUE(t.success());
    EXPECT_FALSE(t.best.direct);
    EXPECT_EQ(t.best.chain.size(), 4u);
    EXPECT_FALSE(t.exhausted);
}

TEST(Solver, TinyBudgetFails)
{
    Fixture f;
    SolveOptions o;
    o.budget = 1e-9;
    const auto t = solve(Method::Ours, f.task("scene_5"), o, &f.pce, &f.q);
    EXPECT_FALSE(t.success());
    EXPECT_TRUE(std::isinf(t.best.total_cost));
    expect_monotone(t);
}

TEST(Solver, WorkClockIsReproducible)
{
    Fixture f;
    const SolveTask task = f.task("scene_7");
    SolveOptions o;
    o.budget = 5.0;
    o.seed = 4;
    const auto a = solve(Method::Ours, task, o, &f.pce, &f.q);
    const auto b = solve(Method::Ours, task, o, &f.pce, &f.q);
    EXPECT_EQ(trace_to_csv(a), trace_to_csv(b));
}

TEST(Solver, MissingModelsAreRejected)
{
    Fixture f;
    const SolveTask task = f.task("scene_5");
    EXPECT_THROW(solve(Method::Esce, task, SolveOptions{}), std::invalid_argument);
    EXPECT_THROW(solve(Method::Ours, task, SolveOptions{}, &f.pce), std::invalid_argument);
    EXPECT_THROW(parse_method("dfs"), std::invalid_argument);
}

TEST(Solver, TraceCsvFormat)
{
    SolveTrace t;
    EXPECT_EQ(trace_to_csv(t), "t_seconds,best_cost\n# success,time_to_first,total_cost\n0,inf,inf\n");
    t.points = {{0.5, 3.0}, {1.0, 2.5}};
    t.best.found = true;
    t.best.total_cost = 2.5;
    t.time_to_first = 0.5;
    EXPECT_EQ(trace_to_csv(t, "p"), "# p\nt_seconds,best_cost\n0.5,3\n1,2.5\n# success,time_to_first,total_cost\n1,0.5,2.5\n");
    EXPECT_EQ(t.best_at(0.4), INFINITY);
    EXPECT_EQ(t.best_at(0.7), 3.0);
    EXPECT_EQ(t.best_at(2.0), 2.5);
}

TEST(Bench, SummaryAndCurves)
{
    std::vector<BenchRun> runs(3);
    runs[0].method = Method::Ours;
    runs[0].trace.best.found = true;
    runs[0].trace.best.total_cost = 4.0;
    runs[0].trace.time_to_first = 1.0;
    runs[0].trace.points = {{1.0, 5.0}, {2.0, 4.0}};
    runs[1].method = Method::Ours;
    runs[2].method = Method::Es;
    runs[2].trace.best.found = true;
    runs[2].trace.best.total_cost = 2.0;
    runs[2].trace.time_to_first = 3.0;
    runs[2].trace.points = {{3.0, 2.0}};
    const auto rows = summarize(runs, {Method::Es, Method::Ours});
    EXPECT_DOUBLE_EQ(rows[0].success_rate, 1.0);
    EXPECT_DOUBLE_EQ(rows[1].success_rate, 0.5);
    EXPECT_DOUBLE_EQ(rows[1].mean_time_to_first, 1.0);
    EXPECT_DOUBLE_EQ(rows[1].mean_total_cost, 4.0);
    const auto curve = reciprocal_curve(runs, Method::Ours, {0.5, 1.5, 2.5});
    EXPECT_DOUBLE_EQ(curve[0].mean, 0.0);
    EXPECT_DOUBLE_EQ(curve[1].mean, 0.1);   // (1/5 + 0) / 2
    EXPECT_DOUBLE_EQ(curve[2].mean, 0.125); // failure counts as 0
    EXPECT_NE(summary_csv(rows).find("method,success_pct,mean_time_to_first,mean_total_cost\nes,100,3,2\n"),
              std::string::npos);
}

}  // namespace
}  // namespace anyplace
