#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anyplace/arm.hpp"
#include "anyplace/scene.hpp"

namespace anyplace {

/// Label of a failed plan.
inline constexpr double kFailureCost = 20.0;
/// Label per resampled waypoint of a successful plan.
inline constexpr double kCostPerWaypoint = 0.1;

struct PlanOptions {
    double budget = 2.0;          ///< seconds on the work clock
    int max_iterations = 3000;    ///< RRT extensions
    double goal_bias = 0.1;
    double step = 0.2;            ///< rad, extension length
    double resolution = 0.05;     ///< rad, edge collision checking
    int shortcut_iterations = 100;
    double waypoint_interval = 0.05;  ///< rad, resampling of the final path
    bool try_direct = true;       ///< take the straight start-goal edge when it is free
    IkOptions ik;
};

struct PathResult {
    bool success = false;
    std::vector<JointConfig> waypoints;
    double cost = kFailureCost;
    double wall_time = 0.0;  ///< seconds on the work clock
};

/// Joint-space path length (Euclidean norm per edge).
double path_length(const std::vector<JointConfig>& path);
/// Evenly spaced waypoints at `interval` along the polyline (last interval
/// may be shorter); a zero-length path still yields its two endpoints.
std::vector<JointConfig> resample(const std::vector<JointConfig>& path, double interval);
double path_cost(const std::vector<JointConfig>& waypoints);

/// Straight joint-space edge checked at `resolution`.
bool edge_free(const ArmModel& arm, const SceneSpec& scene, const JointConfig& a, const JointConfig& b,
               double resolution);

/// RRT from a known start configuration to the IK solution of `goal`
/// (seeded from the start). Deterministic for a given seed.
PathResult plan_from(const ArmModel& arm, const SceneSpec& scene, const JointConfig& start, const Pose& goal,
                     std::uint64_t seed, const PlanOptions& opts = {});

/// Both endpoints solved by IK (start seeded from the zero configuration).
PathResult plan(const ArmModel& arm, const SceneSpec& scene, const Pose& from, const Pose& to, std::uint64_t seed,
                const PlanOptions& opts = {});

struct Segment {
    Pose from;
    Pose to;
    bool carry = false;  ///< target object rigidly held during the motion
};

struct ChainResult {
    bool success = false;
    double total_cost = 0.0;
    std::vector<PathResult> segments;  ///< planned segments only (early abort)
};

/// Plans segments in order, each starting at the previous segment's final
/// configuration. Carry segments attach the target at the segment start and
/// move it with the gripper; it stays where it was released. Stops at the
/// first failure and charges each remaining segment kFailureCost.
ChainResult plan_segment_chain(const ArmModel& arm, const SceneSpec& scene, const std::vector<Segment>& segments,
                               std::uint64_t seed, const PlanOptions& opts = {},
                               const std::optional<JointConfig>& start = std::nullopt);

/// One JointConfig per line, 6 numbers.
std::string path_to_text(const std::vector<JointConfig>& waypoints);

/// SplitMix64-style mixing for deriving child seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace anyplace
