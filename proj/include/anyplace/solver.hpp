#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "anyplace/ipp.hpp"

namespace anyplace {

enum class Method { Es, Esce, Ours };

Method parse_method(std::string_view s);
std::string method_name(Method m);

/// One manipulation problem: move the scene's target from p_0 (its pose in
/// the scene) to p_T, starting with the arm at the zero configuration.
struct SolveTask {
    const ArmModel* arm = nullptr;
    SceneSpec scene;
    TaskObjectPtr object;
    Pose p_T;
    std::string name;

    Pose p_0() const { return scene.objects[scene.target].pose; }
};

SolveTask make_solve_task(const ArmModel& arm, const SceneFile& sf, const GraspOptions& grasp = {});

struct Solution {
    bool found = false;
    std::size_t candidate = 0;
    bool direct = false;
    Pose p_I;
    GraspPair pair;
    std::vector<PathResult> chain;
    double total_cost = std::numeric_limits<double>::infinity();
    double found_at = 0.0;
};

struct TracePoint {
    double t = 0.0;
    double best_cost = std::numeric_limits<double>::infinity();
};

struct SolveTrace {
    Method method = Method::Es;
    std::vector<TracePoint> points;  ///< one per improvement
    Solution best;
    double time_to_first = std::numeric_limits<double>::infinity();
    double elapsed = 0.0;
    std::size_t combinations = 0;  ///< valid (candidate, pair) combinations
    std::size_t evaluated = 0;     ///< combinations whose chain was planned (possibly pruned)
    std::size_t plans = 0;         ///< planner invocations (cache misses)
    bool exhausted = false;

    bool success() const { return best.found; }
    /// Best cost known at time t (+inf before the first solution).
    double best_at(double t) const;
};

struct SolveOptions {
    double budget = 60.0;  ///< seconds on the chosen clock; <= 0 means unlimited
    ClockKind clock = ClockKind::Work;
    std::uint64_t seed = 0;
    CandidateOptions candidates;
    PlanOptions plan;
    bool prune = true;        ///< stop a chain once its partial cost reaches the incumbent
    bool goal_only = false;   ///< consider the goal candidate only (direct manipulation)
    bool stop_at_first = false;
};

/// ES plans every combination in enumeration order; ESCE plans them in
/// ascending estimated chain cost; Ours orders candidates by descending Q
/// and pairs within a candidate by ascending estimate. Per-segment plans use
/// seeds derived from the query, so a chain costs the same under every
/// method and planned segments are shared across combinations.
SolveTrace solve(Method method, const SolveTask& task, const SolveOptions& opts, const CostNet* pce = nullptr,
                 const QModel* q = nullptr);

std::string trace_to_csv(const SolveTrace& trace, const std::string& provenance = {});

}  // namespace anyplace
