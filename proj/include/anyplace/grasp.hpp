#pragma once

#include <vector>

#include "anyplace/arm.hpp"
#include "anyplace/object_model.hpp"
#include "anyplace/scene.hpp"

namespace anyplace {

struct GraspCandidate {
    Pose pose;            ///< TCP pose in the world (or object frame for object_grasps)
    double quality = 0.0; ///< in (0, 1]
    double width = 0.0;   ///< jaw separation at contact, meters
};

struct GraspOptions {
    double friction_half_angle = 15.0 * M_PI / 180.0;
    double standoff = 0.005;  ///< TCP pulled back from the contact midpoint along the approach
    int approach_count = 8;   ///< approach directions per antipodal face pair
    bool check_self = true;   ///< drop grasps whose gripper cuts the object's own hull
    int k = 16;
    double alpha = 0.4;
};

/// Antipodal grasps in the object frame, sorted by descending quality.
/// Every face pair whose antipodal axis lies within the friction cone of
/// both faces and whose gap fits the gripper contributes approach_count
/// grasps spun about the axis, each in both finger orders. Grasps whose gripper capsules cut the hull
/// itself are dropped.
std::vector<GraspCandidate> object_grasps(const ConvexHull& hull, const Gripper& gripper,
                                          const GraspOptions& opts = {});

/// Intrinsic grasp quality cos(t1) cos(t2) (1 - width / max_opening / 2),
/// clamped to (0, 1].
double grasp_quality(double theta1, double theta2, double width, double max_opening);

/// World grasps for the object at pose p: object grasps moved to p, filtered
/// by gripper_collision_free and quality > alpha, top k.
std::vector<GraspCandidate> sample_grasps(const ObjectModel& model, const Pose& p, const ArmModel& arm,
                                          const SceneSpec& scene, int k, double alpha,
                                          const GraspOptions& opts = {});
/// Same from precomputed object-frame grasps.
std::vector<GraspCandidate> sample_grasps(const std::vector<GraspCandidate>& object_frame, const Pose& p,
                                          const ArmModel& arm, const SceneSpec& scene, int k, double alpha);

struct GraspPair {
    GraspCandidate g0;  ///< at p_0
    GraspCandidate gI;  ///< at p_I (for a direct pair: g0 retargeted to p_T)
    bool valid = false;
    int i0 = -1;  ///< index into G_0
    int iI = -1;  ///< index into G_I (-1 for a direct pair)

    double quality() const { return g0.quality * gI.quality; }
};

/// Every (g_0, g_I) combination with the four gripper checks of a regrasp
/// through p_I: g_0 at p_0, g_0 moved to p_I, g_I at p_I and g_I moved to
/// p_T. Valid pairs come first, by descending quality product (stable).
std::vector<GraspPair> grasp_pairs(const std::vector<GraspCandidate>& G0, const std::vector<GraspCandidate>& GI,
                                   const Pose& p_0, const Pose& p_I, const Pose& p_T, const ArmModel& arm,
                                   const SceneSpec& scene);

/// Pairs for direct manipulation (p_I = p_T): gI is g_0 moved to p_T.
std::vector<GraspPair> direct_pairs(const std::vector<GraspCandidate>& G0, const Pose& p_0, const Pose& p_T,
                                    const ArmModel& arm, const SceneSpec& scene);

}  // namespace anyplace
