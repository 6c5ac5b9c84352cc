#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "anyplace/arm.hpp"
#include "anyplace/collision.hpp"
#include "anyplace/object_model.hpp"

namespace anyplace {

struct SceneObject {
    ObjectModelPtr model;
    Pose pose;
    ConvexPoints world;  ///< hull vertices posed in the world
};

/// Object rigidly held by the gripper: object pose = TCP pose * tcp_to_object.
struct Attachment {
    int object = -1;
    Pose tcp_to_object;
};

/// Table-top environment: the half-space z <= 0, axis-aligned boxes and
/// convex objects. Build with make_scene so the caches stay consistent.
struct SceneSpec {
    std::vector<Box> boxes;
    std::vector<ConvexPoints> box_shapes;
    std::vector<SceneObject> objects;
    int target = 0;
    std::optional<Attachment> attached;
};

inline constexpr double kPenetrationTol = 1e-6;
/// A carried object may sink this far below the table plane before it
/// counts as contact; absorbs IK tolerance at pick and place.
inline constexpr double kCarriedTableTol = 4e-3;

/// Throws FormatError on interpenetrating static objects or boxes, objects
/// below the table, or a bad target index. With no objects the target is -1.
SceneSpec make_scene(std::vector<Box> boxes, const std::vector<std::pair<ObjectModelPtr, Pose>>& objects,
                     int target);

void set_object_pose(SceneSpec& scene, int index, const Pose& pose);
/// Attaches the target object at its current pose to a gripper at `grasp`.
void attach_target(SceneSpec& scene, const Pose& grasp);
void detach(SceneSpec& scene);
Pose attached_object_pose(const SceneSpec& scene, const Pose& tcp);

bool in_collision(const ArmModel& arm, const JointConfig& q, const SceneSpec& scene);
bool in_collision(const ArmModel& arm, const ArmFrames& frames, const SceneSpec& scene);

/// Gripper (palm, fingers and the wrist links rigidly behind it) posed at
/// `grasp`, rest of the arm ignored: free of the table, boxes and every
/// object except the target it straddles.
bool gripper_collision_free(const ArmModel& arm, const Pose& grasp, const SceneSpec& scene);

/// A scene file plus the manipulation task defined in it.
struct SceneFile {
    std::string name;
    std::filesystem::path arm_path;  ///< empty: default arm
    SceneSpec scene;
    Pose goal;                       ///< p_T of the target
    std::vector<std::filesystem::path> mesh_paths;

    Pose start() const { return scene.objects[scene.target].pose; }
};

SceneFile load_scene(const std::filesystem::path& path);
/// Mesh paths are written relative to the scene file's directory.
std::string to_text(const SceneFile& sf, const std::filesystem::path& scene_dir);

}  // namespace anyplace
