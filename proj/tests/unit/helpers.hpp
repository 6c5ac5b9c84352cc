#pragma once

#include <random>

#include <gtest/gtest.h>

#include "anyplace/arm.hpp"
#include "anyplace/assets.hpp"
#include "anyplace/se3.hpp"
#include "oracles.hpp"

namespace anyplace::testing {

inline Quat random_quat(std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    return Quat(g(rng), g(rng), g(rng), g(rng)).normalized();
}

inline Pose random_pose(std::mt19937_64& rng, double spread = 1.0)
{
    std::uniform_real_distribution<double> u(-spread, spread);
    return Pose(Vec3(u(rng), u(rng), u(rng)), random_quat(rng));
}

/// Matrix of a pose built by the oracle from the raw quaternion numbers.
inline oracle::M4 oracle_matrix(const Pose& p)
{
    const Quat& q = p.rotation();
    return oracle::rigid(oracle::quat_matrix(q.w(), q.x(), q.y(), q.z()), p.translation());
}

inline std::vector<Vec3> cube_points(double s = 1.0)
{
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i) {
        v.emplace_back((i & 1 ? 0.5 : -0.5) * s, (i & 2 ? 0.5 : -0.5) * s, (i & 4 ? 0.5 : -0.5) * s);
    }
    return v;
}

inline TriMesh tetrahedron()
{
    const double a = 1.0 / std::sqrt(2.0);
    return make_mesh({Vec3(1, 0, -a), Vec3(-1, 0, -a), Vec3(0, 1, a), Vec3(0, -1, a)},
                     {Triangle{0, 1, 2}, Triangle{0, 3, 1}, Triangle{0, 2, 3}, Triangle{1, 3, 2}});
}

}  // namespace anyplace::testing
