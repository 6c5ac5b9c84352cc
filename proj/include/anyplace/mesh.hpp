#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anyplace/se3.hpp"
#include "anyplace/text_io.hpp"

namespace anyplace {

using Triangle = std::array<int, 3>;

/// Closed triangle mesh in the object frame (meters).
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    Vec3 centroid = Vec3::Zero();  ///< volume centroid
    double volume = 0.0;
};

/// Validates the surface (indices, degenerate faces, every edge shared by
/// exactly two triangles) and computes the volume centroid with signed
/// tetrahedra. Throws FormatError naming the defect.
TriMesh make_mesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

/// OBJ (`v` and `f` lines; `f a/b/c` forms accepted) or OFF. Polygonal faces
/// are fan-triangulated. Format chosen by extension for load_mesh.
TriMesh parse_obj(std::string_view text, const std::string& source = "<obj>");
TriMesh parse_off(std::string_view text, const std::string& source = "<off>");
TriMesh load_mesh(const std::filesystem::path& path);

std::string to_obj(const TriMesh& mesh, std::string_view comment = {});

/// Applies a rigid transform to every vertex.
std::vector<Vec3> transform_points(std::span<const Vec3> pts, const Pose& pose);

}  // namespace anyplace
