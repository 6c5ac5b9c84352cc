#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "anyplace/mesh.hpp"
#include "anyplace/solver.hpp"

namespace anyplace {

/// Axis-aligned box centered on the origin.
TriMesh box_mesh(double x, double y, double z);

/// Right prism over a simple counter-clockwise polygon in the xy plane,
/// spanning z in [0, height]. Caps are ear-clipped, so the polygon may be
/// non-convex.
TriMesh extrude_polygon(const std::vector<Eigen::Vector2d>& polygon, double height);

/// Ear clipping of a simple CCW polygon; returns index triples.
std::vector<Triangle> ear_clip(const std::vector<Eigen::Vector2d>& polygon);

struct NamedMesh {
    std::string name;
    std::string split;  ///< "train" or "test"
    TriMesh mesh;
};

/// Six families (box, slab, bar, wedge, L-shape, T-shape) with six random
/// size draws each; every third draw is held out as "test".
std::vector<NamedMesh> generate_meshes(std::uint64_t seed);

struct SceneGenOptions {
    int scene_count = 10;
    int regrasp_scenes = 5;      ///< scenes whose goal needs an intermediate pose
    int distractors = 4;
    int max_attempts = 200;      ///< per scene
    SolveOptions check;          ///< solver settings of the verification runs
};

struct GeneratedScene {
    SceneFile file;
    bool needs_intermediate = false;
};

/// Benchmark scenes: target meshes taken from `targets` in turn, distractors
/// from `distractors`. A regrasp scene is kept only if goal-only ES fails and
/// full ES succeeds; a direct scene only if goal-only ES succeeds.
/// `progress` (optional) is called after each accepted scene.
std::vector<GeneratedScene> generate_scenes(const ArmModel& arm, const std::vector<std::pair<ObjectModelPtr, std::filesystem::path>>& targets,
                                            const std::vector<std::pair<ObjectModelPtr, std::filesystem::path>>& distractors,
                                            std::uint64_t seed, const SceneGenOptions& opts = {},
                                            const std::function<void(const GeneratedScene&, int attempts)>& progress = {});

}  // namespace anyplace
