#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "anyplace/hull.hpp"
#include "anyplace/mesh.hpp"
#include "anyplace/stability.hpp"

namespace anyplace {

/// Object-intrinsic shape summary: hull bounding-box extents, hull volume,
/// and the centroid offset from the bounding-box center.
struct ShapeDescriptor {
    Vec3 extents = Vec3::Zero();
    double volume = 0.0;
    Vec3 centroid_offset = Vec3::Zero();

    std::array<double, 7> values() const
    {
        return {extents.x(), extents.y(), extents.z(), volume,
                centroid_offset.x(), centroid_offset.y(), centroid_offset.z()};
    }
};

/// Everything derived once from a mesh.
struct ObjectModel {
    std::string name;
    std::filesystem::path source;
    TriMesh mesh;
    ConvexHull hull;
    std::vector<StablePose> stable;
    ShapeDescriptor descriptor;
};

using ObjectModelPtr = std::shared_ptr<const ObjectModel>;

ObjectModelPtr make_object_model(TriMesh mesh, std::string name, std::filesystem::path source = {});
ObjectModelPtr load_object_model(const std::filesystem::path& path);

}  // namespace anyplace
