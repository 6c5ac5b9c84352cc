#include "anyplace/planner.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "anyplace/text_io.hpp"
#include "anyplace/work.hpp"

namespace anyplace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double path_length(const std::vector<JointConfig>& path)
{
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        len += (path[i] - path[i - 1]).norm();
    }
    return len;
}

std::vector<JointConfig> resample(const std::vector<JointConfig>& path, double interval)
{
    std::vector<JointConfig> out;
    if (path.empty()) {
        return out;
    }
    out.push_back(path.front());
    double carried = 0.0;  // arc length since the last emitted waypoint
    for (std::size_t i = 1; i < path.size(); ++i) {
        const JointConfig a = path[i - 1];
        const JointConfig d = path[i] - a;
        const double len = d.norm();
        double s = interval - carried;  // position along this edge of the next waypoint
        while (s < len - 1e-9) {
            out.push_back(a + d * (s / len));
            s += interval;
        }
        carried = len - (s - interval);
    }
    // Always end exactly at the goal; also gives [q, q] for a zero-length path.
    if (out.size() == 1 || (out.back() - path.back()).norm() > 1e-12) {
        out.push_back(path.back());
    }
    return out;
}

double path_cost(const std::vector<JointConfig>& waypoints)
{
    return kCostPerWaypoint * static_cast<double>(waypoints.size());
}

bool edge_free(const ArmModel& arm, const SceneSpec& scene, const JointConfig& a, const JointConfig& b,
               double resolution)
{
    const double len = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / resolution - 1e-9)));
    for (int k = 1; k <= n; ++k) {
        const JointConfig q = a + (b - a) * (static_cast<double>(k) / n);
        if (in_collision(arm, q, scene)) {
            return false;
        }
    }
    return true;
}

namespace {

PathResult failure(const WorkClock& clock)
{
    PathResult r;
    r.success = false;
    r.cost = kFailureCost;
    r.wall_time = clock.elapsed();
    return r;
}

void shortcut(const ArmModel& arm, const SceneSpec& scene, std::vector<JointConfig>& path, std::mt19937_64& rng,
              const PlanOptions& opts)
{
    for (int k = 0; k < opts.shortcut_iterations && path.size() > 2; ++k) {
        std::uniform_int_distribution<std::size_t> pick(0, path.size() - 1);
        std::size_t i = pick(rng);
        std::size_t j = pick(rng);
        if (i > j) {
            std::swap(i, j);
        }
        if (j < i + 2) {
            continue;
        }
        if (edge_free(arm, scene, path[i], path[j], opts.resolution)) {
            path.erase(path.begin() + static_cast<std::ptrdiff_t>(i) + 1, path.begin() + static_cast<std::ptrdiff_t>(j));
        }
    }
}

}  // namespace

PathResult plan_from(const ArmModel& arm, const SceneSpec& scene, const JointConfig& start, const Pose& goal_pose,
                     std::uint64_t seed, const PlanOptions& opts)
{
    work::charge(work::Op::PlanCall);
    WorkClock clock;
    std::mt19937_64 rng(seed);
    if (!arm.within_limits(start) || in_collision(arm, start, scene)) {
        return failure(clock);
    }
    auto free_config = [&](const JointConfig& q) { return !in_collision(arm, q, scene); };
    auto goal_q = ik(arm, goal_pose, rng, opts.ik, &start, free_config);
    if (!goal_q) {
        return failure(clock);
    }
    const JointConfig goal = *goal_q;

    std::vector<JointConfig> path;
    if ((goal - start).norm() < 1e-12 || (opts.try_direct && edge_free(arm, scene, start, goal, opts.resolution))) {
        path = {start, goal};
    } else {
        std::vector<JointConfig> nodes{start};
        std::vector<int> parent{-1};
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        int reached = -1;
        for (int it = 0; it < opts.max_iterations; ++it) {
            if (clock.elapsed() > opts.budget) {
                break;
            }
            const JointConfig sample = unit(rng) < opts.goal_bias ? goal : arm.random_config(rng);
            int nearest = 0;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
                const double d = (nodes[i] - sample).squaredNorm();
                if (d < best) {
                    best = d;
                    nearest = i;
                }
            }
            const JointConfig& from = nodes[nearest];
            const JointConfig dir = sample - from;
            const double d = dir.norm();
            if (d < 1e-12) {
                continue;
            }
            const JointConfig q_new = d <= opts.step ? sample : JointConfig(from + dir * (opts.step / d));
            if (!edge_free(arm, scene, from, q_new, opts.resolution)) {
                continue;
            }
            nodes.push_back(q_new);
            parent.push_back(nearest);
            const int id = static_cast<int>(nodes.size()) - 1;
            const double to_goal = (goal - q_new).norm();
            if (to_goal < 1e-12) {
                reached = id;
                break;
            }
            if (to_goal <= opts.step && edge_free(arm, scene, q_new, goal, opts.resolution)) {
                nodes.push_back(goal);
                parent.push_back(id);
                reached = id + 1;
                break;
            }
        }
        if (reached < 0) {
            return failure(clock);
        }
        for (int i = reached; i >= 0; i = parent[i]) {
            path.push_back(nodes[i]);
        }
        std::reverse(path.begin(), path.end());
        shortcut(arm, scene, path, rng, opts);
    }

    PathResult r;
    r.waypoints = resample(path, opts.waypoint_interval);
    for (const auto& q : r.waypoints) {
        if (in_collision(arm, q, scene)) {
            return failure(clock);
        }
    }
    r.success = true;
    r.cost = path_cost(r.waypoints);
    r.wall_time = clock.elapsed();
    return r;
}

PathResult plan(const ArmModel& arm, const SceneSpec& scene, const Pose& from, const Pose& to, std::uint64_t seed,
                const PlanOptions& opts)
{
    std::mt19937_64 rng(mix_seed(seed, 0x5157));
    auto free_config = [&](const JointConfig& q) { return !in_collision(arm, q, scene); };
    auto start = ik(arm, from, rng, opts.ik, nullptr, free_config);
    if (!start) {
        work::charge(work::Op::PlanCall);
        PathResult r;
        return r;
    }
    return plan_from(arm, scene, *start, to, seed, opts);
}

ChainResult plan_segment_chain(const ArmModel& arm, const SceneSpec& base, const std::vector<Segment>& segments,
                               std::uint64_t seed, const PlanOptions& opts, const std::optional<JointConfig>& start)
{
    if (segments.empty()) {
        throw std::invalid_argument("plan_segment_chain needs at least one segment");
    }
    ChainResult out;
    SceneSpec scene = base;
    detach(scene);
    std::optional<JointConfig> q = start;
    if (!q) {
        std::mt19937_64 rng(mix_seed(seed, 0x5157));
        auto free_config = [&](const JointConfig& c) { return !in_collision(arm, c, scene); };
        q = ik(arm, segments.front().from, rng, opts.ik, nullptr, free_config);
    }
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const auto& seg = segments[k];
        if (seg.carry) {
            attach_target(scene, seg.from);
        }
        PathResult r;
        if (q) {
            r = plan_from(arm, scene, *q, seg.to, mix_seed(seed, k), opts);
        }
        out.total_cost += r.cost;
        out.segments.push_back(r);
        if (!r.success) {
            out.success = false;
            out.total_cost += kFailureCost * static_cast<double>(segments.size() - k - 1);
            return out;
        }
        q = r.waypoints.back();
        if (seg.carry) {
            const Pose placed = seg.to * seg.from.inverse() * scene.objects[scene.target].pose;
            detach(scene);
            set_object_pose(scene, scene.target, placed);
        }
    }
    out.success = true;
    return out;
}

std::string path_to_text(const std::vector<JointConfig>& waypoints)
{
    std::ostringstream os;
    for (const auto& q : waypoints) {
        for (int i = 0; i < kDof; ++i) {
            os << (i ? " " : "") << format_double(q[i]);
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace anyplace
