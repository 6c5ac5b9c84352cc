#include "anyplace/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anyplace {

double resting_height(const ConvexHull& hull, const Quat& rotation)
{
    const Mat3 r = rotation.toRotationMatrix();
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& p : hull.points) {
        lo = std::min(lo, (r * p).z());
    }
    return -lo;
}

std::vector<StablePose> stable_poses(const ConvexHull& hull, const Vec3& centroid)
{
    std::vector<StablePose> out;
    double total = 0.0;
    for (std::size_t f = 0; f < hull.faces.size(); ++f) {
        const auto& face = hull.faces[f];
        if (!projects_inside(hull, face, centroid, kStabilityMargin)) {
            continue;
        }
        std::vector<Vec3> poly;
        for (int id : face.polygon) {
            poly.push_back(hull.points[id]);
        }
        StablePose sp;
        sp.face = static_cast<int>(f);
        sp.support_normal = face.normal;
        sp.probability = polygon_solid_angle(poly, centroid) / (4.0 * M_PI);
        const Quat q = Quat::FromTwoVectors(face.normal, -Vec3::UnitZ());
        const Vec3 c = q * centroid;
        sp.pose = Pose(Vec3(-c.x(), -c.y(), resting_height(hull, q)), q);
        total += sp.probability;
        out.push_back(sp);
    }
    if (out.empty()) {
        throw FormatError("mesh has no stable resting face");
    }
    for (auto& sp : out) {
        sp.probability /= total;
    }
    std::stable_sort(out.begin(), out.end(), [](const StablePose& a, const StablePose& b) {
        return a.probability > b.probability + 1e-9;
    });
    return out;
}

std::vector<StablePose> stable_poses(const TriMesh& mesh)
{
    return stable_poses(convex_hull(mesh.vertices), mesh.centroid);
}

CandidateSet candidate_set(const ConvexHull& hull, const std::vector<StablePose>& stable,
                           const Pose& p_0, const Pose& p_T, int m, int n)
{
    if (stable.empty()) {
        throw FormatError("candidate_set needs at least one stable pose");
    }
    m = std::clamp(m, 1, static_cast<int>(stable.size()));
    n = std::max(n, 1);
    CandidateSet set;
    for (int i = 0; i < m; ++i) {
        const auto& sp = stable[i];
        for (int k = 0; k < n; ++k) {
            const Quat spin(Eigen::AngleAxisd(2.0 * M_PI * k / n, Vec3::UnitZ()));
            const Quat q = (spin * sp.pose.rotation()).normalized();
            const Vec3 t(p_0.translation().x(), p_0.translation().y(), resting_height(hull, q));
            set.candidates.emplace_back(t, q);
            set.probability.push_back(sp.probability);
        }
    }
    set.goal_index = set.candidates.size();
    set.candidates.push_back(p_T);
    set.probability.push_back(1.0);
    return set;
}

}  // namespace anyplace
