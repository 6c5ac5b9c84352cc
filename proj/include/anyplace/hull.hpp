#pragma once

#include <span>
#include <vector>

#include "anyplace/mesh.hpp"

namespace anyplace {

/// A planar face of a hull: coplanar hull triangles merged together.
struct HullFace {
    Vec3 normal = Vec3::Zero();  ///< outward unit normal
    double offset = 0.0;         ///< plane: normal . x = offset
    std::vector<int> polygon;    ///< hull point indices, CCW seen from outside
    std::vector<Triangle> triangles;
    double area = 0.0;
    Vec3 center = Vec3::Zero();  ///< area centroid
};

struct ConvexHull {
    std::vector<Vec3> points;  ///< hull vertices only
    std::vector<Triangle> triangles;
    std::vector<HullFace> faces;
    double volume = 0.0;
    Vec3 bbox_min = Vec3::Zero();
    Vec3 bbox_max = Vec3::Zero();

    Vec3 support(const Vec3& dir) const;
};

/// Incremental 3-D convex hull. Triangles whose normals differ by less than
/// merge_angle radians are merged into one HullFace. Throws FormatError for
/// degenerate (flat or collinear) input.
ConvexHull convex_hull(std::span<const Vec3> points, double merge_angle = 1e-4);

/// Solid angle subtended by a planar convex polygon at apex.
double polygon_solid_angle(std::span<const Vec3> polygon, const Vec3& apex);

/// True when the projection of p onto the face plane lies inside the face
/// polygon with every edge distance greater than margin.
bool projects_inside(const ConvexHull& hull, const HullFace& face, const Vec3& p, double margin);

}  // namespace anyplace
