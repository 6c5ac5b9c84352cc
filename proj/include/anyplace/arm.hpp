#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "anyplace/collision.hpp"
#include "anyplace/se3.hpp"

namespace anyplace {

inline constexpr int kDof = 6;

using JointConfig = Eigen::Matrix<double, kDof, 1>;

struct JointLimits {
    double lo = -M_PI;
    double hi = M_PI;
};

/// Parallel-jaw gripper, all capsules in the tool-center-point frame. The
/// TCP frame has +z along the approach direction and +y along the finger
/// opening axis; fingers are modeled fully open.
struct Gripper {
    Capsule palm;
    std::array<Capsule, 2> fingers;
    double max_opening = 0.085;
};

/// 6-DoF serial arm. Joint i rotates about axes[i] (expressed in its own
/// frame) after the fixed transform offsets[i] from the previous frame; the
/// first offset places the base in the world.
struct ArmModel {
    std::string name = "arm";
    std::array<Vec3, kDof> axes;
    std::array<Pose, kDof> offsets;
    std::array<JointLimits, kDof> limits;
    std::array<Capsule, kDof> link_capsules;  ///< in each joint's frame
    Pose tcp;                                 ///< joint-6 frame -> TCP
    Gripper gripper;
    /// Non-adjacent link pairs checked for self-collision; index 5 stands
    /// for the whole gripper group (link 6 + palm + fingers).
    std::vector<std::pair<int, int>> self_pairs;

    bool within_limits(const JointConfig& q, double tol = 1e-12) const;
    JointConfig clamp(const JointConfig& q) const;
    JointConfig random_config(std::mt19937_64& rng) const;
    /// Validates limits and capsule radii; throws FormatError.
    void validate() const;
};

/// Key-value arm model file; see docs/arm_format.md.
ArmModel load_arm(const std::filesystem::path& path);
ArmModel parse_arm(std::string_view text, const std::string& source = "<arm>");
std::string to_text(const ArmModel& arm);

/// The arm shipped in assets/arm6.txt, built in code so tests do not depend
/// on the working directory.
ArmModel default_arm();

/// World frames of the six joints plus the TCP pose.
struct ArmFrames {
    std::array<Pose, kDof> joints;
    Pose tcp;
};

ArmFrames fk_frames(const ArmModel& arm, const JointConfig& q);
/// TCP pose. Throws std::out_of_range when q violates the joint limits.
Pose fk(const ArmModel& arm, const JointConfig& q);
inline Pose home_pose(const ArmModel& arm) { return fk(arm, JointConfig::Zero()); }

struct IkOptions {
    int seed_count = 8;
    int iterations = 200;
    double damping = 1e-2;
    double pos_tol = 1e-3;
    double rot_tol = 1e-2;
};

/// Pose error as [translation; rotation vector of target * current^-1].
Eigen::Matrix<double, 6, 1> pose_error(const Pose& target, const Pose& current);

/// Damped least squares on a numerical Jacobian with random restarts. The
/// seeds tried are `first_seed` (when given), the zero configuration, then
/// uniform random configurations. `accept` may reject converged solutions
/// (e.g. ones in collision), which moves on to the next seed.
std::optional<JointConfig> ik(const ArmModel& arm, const Pose& target, std::mt19937_64& rng,
                              const IkOptions& opts = {}, const JointConfig* first_seed = nullptr,
                              const std::function<bool(const JointConfig&)>& accept = {});

}  // namespace anyplace
