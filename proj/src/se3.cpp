#include "anyplace/se3.hpp"

#include <cmath>
#include <ostream>

#include "anyplace/text_io.hpp"

namespace anyplace {

Pose Pose::from_axis_angle(const Vec3& axis, double angle, const Vec3& t)
{
    return Pose(t, Quat(Eigen::AngleAxisd(angle, axis.normalized())));
}

Pose Pose::from_matrix(const Mat4& m)
{
    Mat3 r = m.block<3, 3>(0, 0);
    return Pose(m.block<3, 1>(0, 3), Quat(r));
}

Mat4 Pose::matrix() const
{
    Mat4 m = Mat4::Identity();
    m.block<3, 3>(0, 0) = rotation_matrix();
    m.block<3, 1>(0, 3) = t_;
    return m;
}

double rotation_distance(const Quat& a, const Quat& b)
{
    Quat d = a.conjugate() * b;
    double s = d.vec().norm();
    return 2.0 * std::atan2(s, std::abs(d.w()));
}

Vec3 rotation_vector(const Quat& qin)
{
    Quat q = qin.normalized();
    if (q.w() < 0.0) {
        q.coeffs() = -q.coeffs();
    }
    const Vec3 v = q.vec();
    const double s = v.norm();
    if (s < 1e-12) {
        // sin(a/2) ~ a/2 for tiny angles
        return 2.0 * v / q.w();
    }
    const double angle = 2.0 * std::atan2(s, q.w());
    Vec3 axis = v / s;
    if (angle >= M_PI - 1e-6) {
        for (int i = 0; i < 3; ++i) {
            if (std::abs(axis[i]) > 1e-12) {
                if (axis[i] < 0.0) {
                    axis = -axis;
                }
                break;
            }
        }
    }
    return axis * angle;
}

Quat quat_from_rotation_vector(const Vec3& r)
{
    const double angle = r.norm();
    if (angle < 1e-12) {
        Quat q(1.0, 0.5 * r.x(), 0.5 * r.y(), 0.5 * r.z());
        return q.normalized();
    }
    const double h = 0.5 * angle;
    const Vec3 v = r * (std::sin(h) / angle);
    return Quat(std::cos(h), v.x(), v.y(), v.z()).normalized();
}

PoseVec6 to_vec6(const Pose& p)
{
    PoseVec6 out;
    out.head<3>() = p.translation();
    out.tail<3>() = rotation_vector(p.rotation());
    return out;
}

Pose from_vec6(const PoseVec6& v)
{
    return Pose(v.head<3>(), quat_from_rotation_vector(v.tail<3>()));
}

std::string format_pose(const Pose& p)
{
    const auto& t = p.translation();
    const auto& q = p.rotation();
    std::string s;
    for (double x : {t.x(), t.y(), t.z(), q.w(), q.x(), q.y(), q.z()}) {
        if (!s.empty()) {
            s += ' ';
        }
        s += format_double(x);
    }
    return s;
}

Pose parse_pose(std::string_view text)
{
    auto v = parse_doubles(text);
    if (v.size() != 7) {
        throw FormatError("pose needs 7 numbers [tx ty tz qw qx qy qz], got " +
                          std::to_string(v.size()));
    }
    Quat q(v[3], v[4], v[5], v[6]);
    if (q.norm() < 1e-9) {
        throw FormatError("pose quaternion has zero norm");
    }
    return Pose(Vec3(v[0], v[1], v[2]), q);
}

void write_pose(std::ostream& os, const Pose& p) { os << format_pose(p); }

}  // namespace anyplace
