#include "anyplace/grasp.hpp"

#include <algorithm>
#include <cmath>

namespace anyplace {

namespace {

using Vec2 = Eigen::Vector2d;

double signed_area(const std::vector<Vec2>& poly)
{
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Sutherland-Hodgman clip of a convex polygon by a convex CCW polygon.
std::vector<Vec2> clip_convex(std::vector<Vec2> subject, const std::vector<Vec2>& clip)
{
    for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
        const Vec2 a = clip[e];
        const Vec2 b = clip[(e + 1) % clip.size()];
        auto side = [&](const Vec2& p) { return cross2(b - a, p - a); };
        std::vector<Vec2> out;
        for (std::size_t i = 0; i < subject.size(); ++i) {
            const Vec2 p = subject[i];
            const Vec2 q = subject[(i + 1) % subject.size()];
            const double sp = side(p);
            const double sq = side(q);
            if (sp >= 0.0) {
                out.push_back(p);
            }
            if ((sp >= 0.0) != (sq >= 0.0)) {
                out.push_back(p + (q - p) * (sp / (sp - sq)));
            }
        }
        subject = std::move(out);
    }
    return subject;
}

std::vector<Vec2> project(const ConvexHull& hull, const HullFace& f, const Vec3& u, const Vec3& v)
{
    std::vector<Vec2> out;
    for (int i : f.polygon) {
        out.emplace_back(hull.points[i].dot(u), hull.points[i].dot(v));
    }
    if (signed_area(out) < 0.0) {
        std::reverse(out.begin(), out.end());
    }
    return out;
}

Vec3 least_aligned_axis(const Vec3& d)
{
    int best = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(d[i]) < std::abs(d[best]) - 1e-12) {
            best = i;
        }
    }
    return Vec3::Unit(best);
}

bool gripper_cuts(const Gripper& g, const Pose& tcp, const ConvexPoints& body)
{
    if (capsule_distance(g.palm.transformed(tcp), body) < 0.0) {
        return true;
    }
    for (const auto& f : g.fingers) {
        if (capsule_distance(f.transformed(tcp), body) < 0.0) {
            return true;
        }
    }
    return false;
}

void sort_by_quality(std::vector<GraspCandidate>& gs)
{
    std::stable_sort(gs.begin(), gs.end(),
                     [](const GraspCandidate& a, const GraspCandidate& b) { return a.quality > b.quality; });
}

}  // namespace

double grasp_quality(double theta1, double theta2, double width, double max_opening)
{
    const double q = std::cos(theta1) * std::cos(theta2) * (1.0 - 0.5 * width / max_opening);
    return std::clamp(q, 1e-12, 1.0);
}

std::vector<GraspCandidate> object_grasps(const ConvexHull& hull, const Gripper& gripper, const GraspOptions& opts)
{
    std::vector<GraspCandidate> out;
    const double cos_fric = std::cos(opts.friction_half_angle);
    const ConvexPoints self(hull.points);
    for (std::size_t i = 0; i < hull.faces.size(); ++i) {
        for (std::size_t j = i + 1; j < hull.faces.size(); ++j) {
            const HullFace& f1 = hull.faces[i];
            const HullFace& f2 = hull.faces[j];
            const Vec3 sum = f1.normal - f2.normal;
            if (sum.norm() < 1e-9) {
                continue;
            }
            const Vec3 d = sum.normalized();  // from face 2 towards face 1
            const double c1 = f1.normal.dot(d);
            const double c2 = -f2.normal.dot(d);
            if (c1 < cos_fric || c2 < cos_fric) {
                continue;
            }
            const Vec3 u = least_aligned_axis(d).cross(d).normalized();
            const Vec3 v = d.cross(u);
            auto overlap = clip_convex(project(hull, f1, u, v), project(hull, f2, u, v));
            if (overlap.size() < 3) {
                continue;
            }
            const double area = signed_area(overlap);
            if (area < 1e-10) {
                continue;
            }
            Vec2 c = Vec2::Zero();
            for (std::size_t k = 0; k < overlap.size(); ++k) {
                const Vec2& p = overlap[k];
                const Vec2& q = overlap[(k + 1) % overlap.size()];
                c += (p + q) * cross2(p, q);
            }
            c /= 6.0 * area;
            const Vec3 x0 = c.x() * u + c.y() * v;
            const double t1 = (f1.offset - f1.normal.dot(x0)) / f1.normal.dot(d);
            const double t2 = (f2.offset - f2.normal.dot(x0)) / f2.normal.dot(d);
            const double width = t1 - t2;
            if (width <= 0.0 || width > gripper.max_opening) {
                continue;
            }
            const Vec3 mid = x0 + 0.5 * (t1 + t2) * d;
            const double quality = grasp_quality(std::acos(std::min(1.0, c1)), std::acos(std::min(1.0, c2)), width,
                                                 gripper.max_opening);
            const Vec3 a0 = least_aligned_axis(d).cross(d).normalized().cross(d);
            for (int k = 0; k < opts.approach_count; ++k) {
                const double ang = 2.0 * M_PI * k / opts.approach_count;
                const Vec3 approach = Eigen::AngleAxisd(ang, d) * a0;
                for (double side : {1.0, -1.0}) {
                    Mat3 r;
                    r.col(0) = side * d.cross(approach);
                    r.col(1) = side * d;
                    r.col(2) = approach;
                    const Pose pose(mid - opts.standoff * approach, Quat(r));
                    if (opts.check_self && gripper_cuts(gripper, pose, self)) {
                        continue;
                    }
                    out.push_back(GraspCandidate{pose, quality, width});
                }
            }
        }
    }
    sort_by_quality(out);
    return out;
}

std::vector<GraspCandidate> sample_grasps(const std::vector<GraspCandidate>& object_frame, const Pose& p,
                                          const ArmModel& arm, const SceneSpec& scene, int k, double alpha)
{
    if (k < 1 || alpha <= 0.0 || alpha >= 1.0) {
        throw std::invalid_argument("sample_grasps needs k >= 1 and 0 < alpha < 1");
    }
    std::vector<GraspCandidate> out;
    for (const auto& g : object_frame) {
        if (static_cast<int>(out.size()) >= k) {
            break;
        }
        if (g.quality <= alpha) {
            continue;
        }
        const Pose world = p * g.pose;
        if (!gripper_collision_free(arm, world, scene)) {
            continue;
        }
        out.push_back(GraspCandidate{world, g.quality, g.width});
    }
    sort_by_quality(out);
    return out;
}

std::vector<GraspCandidate> sample_grasps(const ObjectModel& model, const Pose& p, const ArmModel& arm,
                                          const SceneSpec& scene, int k, double alpha, const GraspOptions& opts)
{
    return sample_grasps(object_grasps(model.hull, arm.gripper, opts), p, arm, scene, k, alpha);
}

namespace {

void order_pairs(std::vector<GraspPair>& pairs)
{
    std::stable_sort(pairs.begin(), pairs.end(), [](const GraspPair& a, const GraspPair& b) {
        if (a.valid != b.valid) {
            return a.valid;
        }
        return a.valid && a.quality() > b.quality();
    });
}

}  // namespace

std::vector<GraspPair> grasp_pairs(const std::vector<GraspCandidate>& G0, const std::vector<GraspCandidate>& GI,
                                   const Pose& p_0, const Pose& p_I, const Pose& p_T, const ArmModel& arm,
                                   const SceneSpec& scene)
{
    std::vector<char> ok0(G0.size());
    for (std::size_t a = 0; a < G0.size(); ++a) {
        ok0[a] = gripper_collision_free(arm, G0[a].pose, scene) &&
                 gripper_collision_free(arm, retarget_grasp(G0[a].pose, p_0, p_I), scene);
    }
    std::vector<char> okI(GI.size());
    for (std::size_t b = 0; b < GI.size(); ++b) {
        okI[b] = gripper_collision_free(arm, GI[b].pose, scene) &&
                 gripper_collision_free(arm, retarget_grasp(GI[b].pose, p_I, p_T), scene);
    }
    std::vector<GraspPair> out;
    out.reserve(G0.size() * GI.size());
    for (std::size_t a = 0; a < G0.size(); ++a) {
        for (std::size_t b = 0; b < GI.size(); ++b) {
            out.push_back(GraspPair{G0[a], GI[b], ok0[a] && okI[b], static_cast<int>(a), static_cast<int>(b)});
        }
    }
    order_pairs(out);
    return out;
}

std::vector<GraspPair> direct_pairs(const std::vector<GraspCandidate>& G0, const Pose& p_0, const Pose& p_T,
                                    const ArmModel& arm, const SceneSpec& scene)
{
    std::vector<GraspPair> out;
    for (std::size_t a = 0; a < G0.size(); ++a) {
        const GraspCandidate& g = G0[a];
        GraspCandidate gT{retarget_grasp(g.pose, p_0, p_T), 1.0, g.width};
        const bool ok = gripper_collision_free(arm, g.pose, scene) && gripper_collision_free(arm, gT.pose, scene);
        out.push_back(GraspPair{g, gT, ok, static_cast<int>(a), -1});
    }
    order_pairs(out);
    return out;
}

}  // namespace anyplace
