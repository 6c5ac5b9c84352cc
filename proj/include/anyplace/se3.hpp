#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace anyplace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Quat = Eigen::Quaterniond;

/// Translation + rotation vector (axis * angle), the 6-number encoding fed
/// to the learned models.
using PoseVec6 = Eigen::Matrix<double, 6, 1>;

/// Rigid transform in SE(3). The quaternion is renormalized by every
/// constructor and operation, so it stays unit length. One that is already
/// unit to round-off is stored as given, which keeps text round trips exact.
class Pose {
public:
    Pose() : t_(Vec3::Zero()), q_(Quat::Identity()) {}
    Pose(const Vec3& t, const Quat& q) : t_(t), q_(unit(q)) {}

    static Pose identity() { return Pose(); }
    static Pose from_translation(const Vec3& t) { return Pose(t, Quat::Identity()); }
    static Pose from_axis_angle(const Vec3& axis, double angle,
                                const Vec3& t = Vec3::Zero());
    static Pose from_matrix(const Mat4& m);

    const Vec3& translation() const { return t_; }
    const Quat& rotation() const { return q_; }
    Mat3 rotation_matrix() const { return q_.toRotationMatrix(); }
    Mat4 matrix() const;

    static Quat unit(const Quat& q)
    {
        return std::abs(q.squaredNorm() - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon() ? q : q.normalized();
    }

    /// a * b applies b first, then a.
    Pose operator*(const Pose& b) const
    {
        return Pose(t_ + q_ * b.t_, q_ * b.q_);
    }

    Vec3 operator*(const Vec3& p) const { return t_ + q_ * p; }

    Pose inverse() const
    {
        Quat qi = q_.conjugate();
        return Pose(-(qi * t_), qi);
    }

private:
    Vec3 t_;
    Quat q_;
};

inline Pose compose(const Pose& a, const Pose& b) { return a * b; }
inline Pose inverse(const Pose& p) { return p.inverse(); }

/// Carries a grasp defined at object pose p_i over to object pose p_j, so the
/// gripper keeps the same object-relative transform: p_j * p_i^-1 * g_i.
inline Pose retarget_grasp(const Pose& g_i, const Pose& p_i, const Pose& p_j)
{
    return p_j * p_i.inverse() * g_i;
}

/// Angle of the relative rotation between two quaternions, in [0, pi].
double rotation_distance(const Quat& a, const Quat& b);

/// Rotation vector of q on the canonical branch, angle in [0, pi]. At angle
/// pi the two antipodal axes are disambiguated by making the first nonzero
/// component positive.
Vec3 rotation_vector(const Quat& q);
Quat quat_from_rotation_vector(const Vec3& r);

PoseVec6 to_vec6(const Pose& p);
Pose from_vec6(const PoseVec6& v);

/// 7 numbers [tx ty tz qw qx qy qz] at full double precision.
std::string format_pose(const Pose& p);
Pose parse_pose(std::string_view text);
void write_pose(std::ostream& os, const Pose& p);

}  // namespace anyplace
