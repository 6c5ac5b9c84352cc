#include "anyplace/solver.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <iterator>
#include <tuple>

#include "anyplace/text_io.hpp"

namespace anyplace {

Method parse_method(std::string_view s)
{
    if (s == "es") {
        return Method::Es;
    }
    if (s == "esce") {
        return Method::Esce;
    }
    if (s == "ours") {
        return Method::Ours;
    }
    throw std::invalid_argument("unknown method '" + std::string(s) + "' (expected es, esce or ours)");
}

std::string method_name(Method m)
{
    switch (m) {
    case Method::Es:
        return "es";
    case Method::Esce:
        return "esce";
    case Method::Ours:
        return "ours";
    }
    return "?";
}

SolveTask make_solve_task(const ArmModel& arm, const SceneFile& sf, const GraspOptions& grasp)
{
    SolveTask t;
    t.arm = &arm;
    t.scene = sf.scene;
    t.p_T = sf.goal;
    t.name = sf.name;
    t.object = make_task_objects({sf.scene.objects[sf.scene.target].model}, arm, grasp).front();
    return t;
}

double SolveTrace::best_at(double t) const
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        if (p.t <= t) {
            best = p.best_cost;
        }
    }
    return best;
}

namespace {

struct Combo {
    std::size_t candidate = 0;
    GraspPair pair;
    double estimate = 0.0;  ///< summed segment estimates (unused by ES)
};

using SegKey = std::tuple<int, int, int, int>;

class ChainEvaluator {
public:
    ChainEvaluator(const SolveTask& task, const TaskContext& ctx, const SolveOptions& opts)
        : task_(task), ctx_(ctx), opts_(opts)
    {
    }

    struct Outcome {
        bool success = false;
        bool pruned = false;
        double cost = 0.0;
        std::vector<PathResult> chain;
    };

    Outcome evaluate(std::size_t c, const GraspPair& pair, double bound)
    {
        const Pose& p_I = ctx_.candidates.candidates[c];
        const auto segs = chain_segments(ctx_.g_cur, pair, ctx_.p_0, p_I, ctx_.p_T);
        Outcome out;
        JointConfig q = JointConfig::Zero();
        SceneSpec scene = task_.scene;
        for (std::size_t k = 0; k < segs.size(); ++k) {
            const SegKey key = key_for(static_cast<int>(k), pair, c);
            if (segs[k].carry) {
                attach_target(scene, segs[k].from);
            }
            const PathResult& r = lookup(key, scene, q, segs[k].to);
            out.chain.push_back(r);
            out.cost += r.cost;
            if (!r.success) {
                return out;
            }
            q = r.waypoints.back();
            if (segs[k].carry) {
                const Pose placed = segs[k].to * segs[k].from.inverse() * scene.objects[scene.target].pose;
                detach(scene);
                set_object_pose(scene, scene.target, placed);
            }
            if (opts_.prune && out.cost >= bound) {
                out.pruned = true;
                return out;
            }
        }
        out.success = true;
        return out;
    }

    std::size_t plans() const { return plans_; }

private:
    static SegKey key_for(int k, const GraspPair& pair, std::size_t c)
    {
        const int cc = static_cast<int>(c);
        switch (k) {
        case 0:
            return {0, pair.i0, -1, -1};
        case 1:
            return {1, pair.i0, cc, -1};
        default:
            return {k, pair.i0, cc, pair.iI};
        }
    }

    const PathResult& lookup(const SegKey& key, const SceneSpec& scene, const JointConfig& start, const Pose& goal)
    {
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            return it->second;
        }
        const auto [k, a, c, b] = key;
        std::uint64_t h = static_cast<std::uint64_t>(k);
        for (int v : {a, c, b}) {
            h = h * 1000003ULL + static_cast<std::uint64_t>(v + 1);
        }
        ++plans_;
        auto r = plan_from(*task_.arm, scene, start, goal, mix_seed(opts_.seed, h), opts_.plan);
        return cache_.emplace(key, std::move(r)).first->second;
    }

    const SolveTask& task_;
    const TaskContext& ctx_;
    const SolveOptions& opts_;
    std::map<SegKey, PathResult> cache_;
    std::size_t plans_ = 0;
};

}  // namespace

SolveTrace solve(Method method, const SolveTask& task, const SolveOptions& opts, const CostNet* pce, const QModel* q)
{
    if (!task.arm || !task.object) {
        throw std::invalid_argument("solve needs an arm and a target object");
    }
    if ((method == Method::Esce || method == Method::Ours) && !pce) {
        throw std::invalid_argument(method_name(method) + " needs a trained cost estimator");
    }
    if (method == Method::Ours && !q) {
        throw std::invalid_argument("ours needs a trained Q model");
    }
    const ArmModel& arm = *task.arm;
    auto clock = make_clock(opts.clock);
    SolveTrace trace;
    trace.method = method;

    const TaskContext ctx =
        make_context(task.object, arm, task.scene, home_pose(arm), task.p_0(), task.p_T, opts.candidates);
    std::vector<std::size_t> cands;
    for (std::size_t c = 0; c < ctx.candidates.size(); ++c) {
        if (!opts.goal_only || ctx.candidates.is_goal(c)) {
            cands.push_back(c);
        }
    }
    // Valid pairs of one candidate, in quality order, with chain estimates
    // when a cost estimator is in use.
    auto enumerate = [&](std::size_t c) {
        std::vector<Combo> out;
        std::vector<GraspPair> valid;
        for (auto& p : candidate_pairs(ctx, c, arm, opts.candidates)) {
            if (p.valid) {
                valid.push_back(std::move(p));
            }
        }
        for (auto& p : valid) {
            Combo cb{c, std::move(p), 0.0};
            if (method != Method::Es) {
                const auto est = estimate_chain(
                    *pce, chain_segments(ctx.g_cur, cb.pair, ctx.p_0, ctx.candidates.candidates[c], ctx.p_T));
                cb.estimate = std::accumulate(est.begin(), est.end(), 0.0);
            }
            out.push_back(std::move(cb));
        }
        trace.combinations += out.size();
        return out;
    };
    auto by_estimate = [](const Combo& a, const Combo& b) { return a.estimate < b.estimate; };

    // ES and Ours enumerate one candidate at a time, so their first plans
    // start before the remaining candidates are even looked at. ESCE needs
    // every estimate before it can pick the global minimum.
    std::vector<std::size_t> order = cands;
    std::vector<std::vector<Combo>> batches;
    if (method == Method::Esce) {
        std::vector<Combo> all;
        for (std::size_t c : cands) {
            auto part = enumerate(c);
            std::move(part.begin(), part.end(), std::back_inserter(all));
        }
        std::stable_sort(all.begin(), all.end(), by_estimate);
        batches.push_back(std::move(all));
        order.clear();
    } else if (method == Method::Ours) {
        const auto values = q->q_all(candidate_features(ctx, q->scales));
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (values[a] != values[b]) {
                return values[a] > values[b];
            }
            return ctx.candidates.probability[a] > ctx.candidates.probability[b];
        });
    }

    ChainEvaluator eval(task, ctx, opts);
    trace.exhausted = true;
    auto out_of_time = [&] {
        return (opts.budget > 0.0 && clock->elapsed() > opts.budget) || (opts.stop_at_first && trace.best.found);
    };
    auto run_batch = [&](const std::vector<Combo>& combos) {
        for (const auto& cb : combos) {
            if (out_of_time()) {
                trace.exhausted = false;
                return false;
            }
            const auto out = eval.evaluate(cb.candidate, cb.pair, trace.best.total_cost);
            ++trace.evaluated;
            if (out.success && out.cost < trace.best.total_cost) {
                const double t = clock->elapsed();
                trace.best.found = true;
                trace.best.candidate = cb.candidate;
                trace.best.direct = ctx.candidates.is_goal(cb.candidate);
                trace.best.p_I = ctx.candidates.candidates[cb.candidate];
                trace.best.pair = cb.pair;
                trace.best.chain = out.chain;
                trace.best.total_cost = out.cost;
                trace.best.found_at = t;
                if (trace.points.empty()) {
                    trace.time_to_first = t;
                }
                if (!trace.points.empty() && !(out.cost < trace.points.back().best_cost)) {
                    throw std::logic_error("solve trace must be non-increasing");
                }
                trace.points.push_back(TracePoint{t, out.cost});
            }
        }
        return true;
    };
    bool more = true;
    for (const auto& b : batches) {
        more = more && run_batch(b);
    }
    for (std::size_t c : order) {
        if (!more) {
            break;
        }
        if (out_of_time()) {
            trace.exhausted = false;
            break;
        }
        auto combos = enumerate(c);
        if (method == Method::Ours) {
            std::stable_sort(combos.begin(), combos.end(), by_estimate);
        }
        more = run_batch(combos);
    }
    trace.plans = eval.plans();
    trace.elapsed = clock->elapsed();
    return trace;
}

std::string trace_to_csv(const SolveTrace& trace, const std::string& provenance)
{
    std::ostringstream os;
    if (!provenance.empty()) {
        os << "# " << provenance << "\n";
    }
    os << "t_seconds,best_cost\n";
    for (const auto& p : trace.points) {
        os << format_double(p.t) << ',' << format_double(p.best_cost) << "\n";
    }
    os << "# success,time_to_first,total_cost\n";
    os << (trace.success() ? 1 : 0) << ',' << (trace.success() ? format_double(trace.time_to_first) : "inf") << ','
       << (trace.success() ? format_double(trace.best.total_cost) : "inf") << "\n";
    return os.str();
}

}  // namespace anyplace
