#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anyplace/solver.hpp"

namespace anyplace {

struct BenchRun {
    std::size_t scene = 0;
    Method method = Method::Es;
    std::uint64_t seed = 0;
    SolveTrace trace;
};

/// Runs every method x scene x seed combination. The solve seed of a run is
/// mix_seed(seed, scene) so methods see the same planner seeds on the same
/// scene. Results are in grid order whatever the worker count.
std::vector<BenchRun> run_bench(const std::vector<SolveTask>& tasks, const std::vector<Method>& methods,
                                const std::vector<std::uint64_t>& seeds, const SolveOptions& base,
                                const CostNet* pce, const QModel* q, int workers = 1);

struct MethodSummary {
    Method method = Method::Es;
    std::size_t runs = 0;
    double success_rate = 0.0;         ///< fraction of runs with a solution
    double mean_time_to_first = 0.0;   ///< over successful runs (nan if none)
    double mean_total_cost = 0.0;      ///< over successful runs (nan if none)
    double median_time_to_first = 0.0; ///< over successful runs
};

std::vector<MethodSummary> summarize(const std::vector<BenchRun>& runs, const std::vector<Method>& methods);
/// method,success_pct,mean_time_to_first,mean_total_cost
std::string summary_csv(const std::vector<MethodSummary>& rows, const std::string& provenance = {});

/// Reciprocal best cost 1 / best_at(t) per run, 0 before the first
/// solution, averaged over runs of one method at each time in `times`.
struct CurvePoint {
    double t = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};
std::vector<CurvePoint> reciprocal_curve(const std::vector<BenchRun>& runs, Method method,
                                         const std::vector<double>& times);
/// method,t_seconds,mean_reciprocal_cost,std_reciprocal_cost
std::string curves_csv(const std::vector<BenchRun>& runs, const std::vector<Method>& methods,
                       const std::vector<double>& times, const std::string& provenance = {});

}  // namespace anyplace
