#pragma once

#include <cstddef>
#include <vector>

#include "anyplace/hull.hpp"
#include "anyplace/mesh.hpp"

namespace anyplace {

/// Resting placement of an object on the z = 0 table plane.
struct StablePose {
    Pose pose;                          ///< object frame -> world; centroid over the world origin
    double probability = 0.0;
    Vec3 support_normal = Vec3::Zero(); ///< outward normal of the support face, object frame
    int face = -1;                      ///< index into ConvexHull::faces
};

inline constexpr double kStabilityMargin = 1e-9;

/// One pose per stable hull face. A face's probability is the solid angle it
/// subtends at the centroid over 4 pi; faces whose centroid projection falls
/// outside the polygon are dropped and the rest renormalized. Sorted by
/// descending probability (ties within 1e-9 keep face order).
std::vector<StablePose> stable_poses(const ConvexHull& hull, const Vec3& centroid);
std::vector<StablePose> stable_poses(const TriMesh& mesh);

/// Lifts a rotated object so its lowest hull vertex touches z = 0.
double resting_height(const ConvexHull& hull, const Quat& rotation);

/// Intermediate pose candidates: top-m stable poses, each spun n times about
/// the vertical with step 2 pi / n, all at the (x, y) of p_0; the goal p_T is
/// appended last. m is clamped to the number of stable poses.
struct CandidateSet {
    std::vector<Pose> candidates;
    std::vector<double> probability;  ///< stable-pose probability; 1 for the goal
    std::size_t goal_index = 0;

    std::size_t size() const { return candidates.size(); }
    bool is_goal(std::size_t i) const { return i == goal_index; }
};

CandidateSet candidate_set(const ConvexHull& hull, const std::vector<StablePose>& stable,
                           const Pose& p_0, const Pose& p_T, int m, int n);

}  // namespace anyplace
