#pragma once

#include <array>
#include <span>
#include <vector>

#include "anyplace/se3.hpp"

namespace anyplace {

/// Segment a-b swept by a sphere of radius r.
struct Capsule {
    Vec3 a = Vec3::Zero();
    Vec3 b = Vec3::Zero();
    double radius = 0.0;

    Capsule transformed(const Pose& p) const { return {p * a, p * b, radius}; }
};

/// Axis-aligned box obstacle.
struct Box {
    Vec3 center = Vec3::Zero();
    Vec3 half_extents = Vec3::Zero();

    std::array<Vec3, 8> corners() const;
};

/// Convex set given by its vertices (the convex hull of the points) plus a
/// bounding sphere for cheap rejection.
struct ConvexPoints {
    std::vector<Vec3> points;
    Vec3 center = Vec3::Zero();
    double bound_radius = 0.0;

    ConvexPoints() = default;
    explicit ConvexPoints(std::vector<Vec3> pts);
    static ConvexPoints from_box(const Box& b);
};

/// Euclidean distance between the convex hulls of two point sets (GJK with
/// the distance sub-algorithm). Returns 0 for overlapping sets.
double gjk_distance(std::span<const Vec3> a, std::span<const Vec3> b);

double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);

/// Signed surface-to-surface distances; negative or zero means contact.
double capsule_distance(const Capsule& c, const ConvexPoints& body);
double capsule_capsule_distance(const Capsule& x, const Capsule& y);
double convex_distance(const ConvexPoints& x, const ConvexPoints& y);
/// Height of the lowest surface point above z = 0.
double capsule_table_clearance(const Capsule& c);

}  // namespace anyplace
