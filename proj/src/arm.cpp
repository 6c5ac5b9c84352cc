#include "anyplace/arm.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "anyplace/text_io.hpp"
#include "anyplace/work.hpp"

namespace anyplace {

bool ArmModel::within_limits(const JointConfig& q, double tol) const
{
    for (int i = 0; i < kDof; ++i) {
        if (!(q[i] >= limits[i].lo - tol && q[i] <= limits[i].hi + tol)) {
            return false;
        }
    }
    return true;
}

JointConfig ArmModel::clamp(const JointConfig& q) const
{
    JointConfig out;
    for (int i = 0; i < kDof; ++i) {
        out[i] = std::clamp(q[i], limits[i].lo, limits[i].hi);
    }
    return out;
}

JointConfig ArmModel::random_config(std::mt19937_64& rng) const
{
    JointConfig q;
    for (int i = 0; i < kDof; ++i) {
        std::uniform_real_distribution<double> u(limits[i].lo, limits[i].hi);
        q[i] = u(rng);
    }
    return q;
}

void ArmModel::validate() const
{
    for (int i = 0; i < kDof; ++i) {
        if (!(limits[i].lo < limits[i].hi)) {
            throw FormatError("joint " + std::to_string(i + 1) + " limits are not a proper interval");
        }
        if (!(link_capsules[i].radius > 0.0)) {
            throw FormatError("link " + std::to_string(i + 1) + " capsule radius must be > 0");
        }
        if (axes[i].norm() < 1e-9) {
            throw FormatError("joint " + std::to_string(i + 1) + " axis is zero");
        }
    }
    if (!(gripper.palm.radius > 0.0 && gripper.fingers[0].radius > 0.0 && gripper.fingers[1].radius > 0.0)) {
        throw FormatError("gripper capsule radii must be > 0");
    }
    if (!(gripper.max_opening > 0.0)) {
        throw FormatError("gripper max_opening must be > 0");
    }
    for (const auto& [a, b] : self_pairs) {
        if (a < 0 || a >= kDof || b < 0 || b >= kDof || std::abs(a - b) < 2) {
            throw FormatError("self-collision pair must name two non-adjacent links");
        }
    }
}

namespace {

Capsule parse_capsule(const KeyValueFile& kv, const std::string& key)
{
    auto v = kv.numbers(key, 7);
    return Capsule{Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5]), v[6]};
}

std::string capsule_text(const Capsule& c)
{
    std::ostringstream os;
    os << format_double(c.a.x()) << ' ' << format_double(c.a.y()) << ' ' << format_double(c.a.z()) << ' '
       << format_double(c.b.x()) << ' ' << format_double(c.b.y()) << ' ' << format_double(c.b.z()) << ' '
       << format_double(c.radius);
    return os.str();
}

}  // namespace

ArmModel parse_arm(std::string_view text, const std::string& source)
{
    auto kv = KeyValueFile::parse(text, source);
    ArmModel arm;
    arm.name = kv.get_or("name", "arm");
    for (int i = 0; i < kDof; ++i) {
        const std::string j = "joint" + std::to_string(i + 1);
        arm.offsets[i] = parse_pose(kv.get(j + ".offset"));
        auto ax = kv.numbers(j + ".axis", 3);
        arm.axes[i] = Vec3(ax[0], ax[1], ax[2]).normalized();
        auto lim = kv.numbers(j + ".limits", 2);
        arm.limits[i] = {lim[0], lim[1]};
        arm.link_capsules[i] = parse_capsule(kv, "link" + std::to_string(i + 1) + ".capsule");
    }
    arm.tcp = parse_pose(kv.get("tcp"));
    arm.gripper.palm = parse_capsule(kv, "gripper.palm");
    arm.gripper.fingers[0] = parse_capsule(kv, "gripper.finger_left");
    arm.gripper.fingers[1] = parse_capsule(kv, "gripper.finger_right");
    arm.gripper.max_opening = kv.numbers("gripper.max_opening", 1)[0];
    if (kv.has("self_collision")) {
        for (auto tok : split_ws(kv.get("self_collision"))) {
            auto parts = split(tok, ':');
            if (parts.size() != 2) {
                throw FormatError(source + ": self_collision entries look like 1:3");
            }
            arm.self_pairs.emplace_back(static_cast<int>(parse_int(parts[0])) - 1,
                                        static_cast<int>(parse_int(parts[1])) - 1);
        }
    }
    try {
        arm.validate();
    } catch (const FormatError& e) {
        throw FormatError(source + ": " + e.what());
    }
    return arm;
}

ArmModel load_arm(const std::filesystem::path& path)
{
    return parse_arm(read_file(path), path.string());
}

std::string to_text(const ArmModel& arm)
{
    std::ostringstream os;
    os << "# anyplace arm model v1\n";
    os << "# joint i: frame_i = frame_{i-1} * joint_i.offset * Rot(axis_i, q_i); frame_0 = world\n";
    os << "# capsules: ax ay az bx by bz radius (link capsules in joint frame, gripper in TCP frame)\n";
    os << "name = " << arm.name << "\n";
    for (int i = 0; i < kDof; ++i) {
        const std::string j = "joint" + std::to_string(i + 1);
        os << j << ".offset = " << format_pose(arm.offsets[i]) << "\n";
        os << j << ".axis = " << format_double(arm.axes[i].x()) << ' ' << format_double(arm.axes[i].y()) << ' '
           << format_double(arm.axes[i].z()) << "\n";
        os << j << ".limits = " << format_double(arm.limits[i].lo) << ' ' << format_double(arm.limits[i].hi)
           << "\n";
        os << "link" << i + 1 << ".capsule = " << capsule_text(arm.link_capsules[i]) << "\n";
    }
    os << "tcp = " << format_pose(arm.tcp) << "\n";
    os << "gripper.palm = " << capsule_text(arm.gripper.palm) << "\n";
    os << "gripper.finger_left = " << capsule_text(arm.gripper.fingers[0]) << "\n";
    os << "gripper.finger_right = " << capsule_text(arm.gripper.fingers[1]) << "\n";
    os << "gripper.max_opening = " << format_double(arm.gripper.max_opening) << "\n";
    if (!arm.self_pairs.empty()) {
        os << "self_collision =";
        for (const auto& [a, b] : arm.self_pairs) {
            os << ' ' << a + 1 << ':' << b + 1;
        }
        os << "\n";
    }
    return os.str();
}

ArmModel default_arm()
{
    // Anthropomorphic arm at the back edge of a 1.2 x 0.8 m table. Link
    // lengths 0.10 + 0.35 + 0.25 + 0.08 + 0.12 = 0.9 m. The zero
    // configuration is a ready pose with the gripper pointing down at
    // (0, 0.025, 0.2031).
    ArmModel arm;
    arm.name = "arm6";
    const double s60 = std::sin(M_PI / 3.0);
    arm.offsets = {
        Pose::from_translation(Vec3(0.0, -0.40, 0.0)),
        Pose::from_translation(Vec3(0.0, 0.0, 0.10)),
        Pose::from_translation(Vec3(0.0, 0.35 * 0.5, 0.35 * s60)),
        Pose::from_translation(Vec3(0.0, 0.125, 0.0)),
        Pose::from_translation(Vec3(0.0, 0.125, 0.0)),
        Pose::from_translation(Vec3(0.0, 0.0, -0.08)),
    };
    arm.axes = {Vec3::UnitZ(), Vec3::UnitX(), Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitX(), Vec3::UnitZ()};
    arm.limits = {{{-M_PI, M_PI}, {-2.0, 2.0}, {-2.6, 2.6}, {-M_PI, M_PI}, {-2.2, 2.2}, {-M_PI, M_PI}}};
    arm.link_capsules = {
        Capsule{Vec3(0, 0, 0.05), Vec3(0, 0, 0.10), 0.045},
        Capsule{Vec3(0, 0, 0), Vec3(0, 0.35 * 0.5, 0.35 * s60), 0.04},
        Capsule{Vec3(0, 0, 0), Vec3(0, 0.125, 0), 0.035},
        Capsule{Vec3(0, 0, 0), Vec3(0, 0.125, 0), 0.035},
        Capsule{Vec3(0, 0, 0), Vec3(0, 0, -0.08), 0.03},
        Capsule{Vec3(0, 0, -0.005), Vec3(0, 0, -0.05), 0.025},
    };
    arm.tcp = Pose(Vec3(0.0, 0.0, -0.12), Quat(0.0, 1.0, 0.0, 0.0));
    arm.gripper.max_opening = 0.085;
    const double fy = 0.5 * arm.gripper.max_opening + 0.008;
    arm.gripper.palm = Capsule{Vec3(0, -0.05, -0.07), Vec3(0, 0.05, -0.07), 0.012};
    arm.gripper.fingers[0] = Capsule{Vec3(0, fy, -0.065), Vec3(0, fy, -0.004), 0.008};
    arm.gripper.fingers[1] = Capsule{Vec3(0, -fy, -0.065), Vec3(0, -fy, -0.004), 0.008};
    arm.self_pairs = {{0, 2}, {0, 3}, {0, 4}, {0, 5}, {1, 3}, {1, 4}, {1, 5}, {2, 5}};
    arm.validate();
    return arm;
}

namespace {

ArmFrames fk_unchecked(const ArmModel& arm, const JointConfig& q)
{
    work::charge(work::Op::Fk);
    ArmFrames f;
    Pose cur;
    for (int i = 0; i < kDof; ++i) {
        cur = cur * arm.offsets[i] * Pose(Vec3::Zero(), Quat(Eigen::AngleAxisd(q[i], arm.axes[i])));
        f.joints[i] = cur;
    }
    f.tcp = cur * arm.tcp;
    return f;
}

}  // namespace

ArmFrames fk_frames(const ArmModel& arm, const JointConfig& q)
{
    if (!arm.within_limits(q, 1e-9)) {
        throw std::out_of_range("joint configuration violates limits");
    }
    return fk_unchecked(arm, q);
}

Pose fk(const ArmModel& arm, const JointConfig& q) { return fk_frames(arm, q).tcp; }

Eigen::Matrix<double, 6, 1> pose_error(const Pose& target, const Pose& current)
{
    Eigen::Matrix<double, 6, 1> e;
    e.head<3>() = target.translation() - current.translation();
    e.tail<3>() = rotation_vector(target.rotation() * current.rotation().conjugate());
    return e;
}

namespace {

// Full-turn joints wrap around instead of sticking at a limit.
JointConfig wrap_or_clamp(const ArmModel& arm, JointConfig q)
{
    for (int i = 0; i < kDof; ++i) {
        const double lo = arm.limits[i].lo;
        const double span = arm.limits[i].hi - lo;
        if (span >= 2.0 * M_PI - 1e-9 && (q[i] < lo || q[i] > arm.limits[i].hi)) {
            q[i] = lo + std::fmod(std::fmod(q[i] - lo, 2.0 * M_PI) + 2.0 * M_PI, 2.0 * M_PI);
        }
    }
    return arm.clamp(q);
}

// Zero configuration with the base turned towards the target, for arms
// whose first joint is a vertical axis at the base.
std::optional<JointConfig> facing_seed(const ArmModel& arm, const Pose& target)
{
    if ((arm.axes[0] - Vec3::UnitZ()).norm() > 1e-12 || rotation_distance(arm.offsets[0].rotation(), Quat::Identity()) > 1e-12) {
        return std::nullopt;
    }
    const Vec3 base = arm.offsets[0].translation();
    const Vec3 home = fk_unchecked(arm, JointConfig::Zero()).tcp.translation() - base;
    const Vec3 want = target.translation() - base;
    if (home.head<2>().norm() < 1e-6 || want.head<2>().norm() < 1e-6) {
        return std::nullopt;
    }
    JointConfig q = JointConfig::Zero();
    q[0] = std::atan2(home.x() * want.y() - home.y() * want.x(), home.head<2>().dot(want.head<2>()));
    return arm.clamp(q);
}

}  // namespace

std::optional<JointConfig> ik(const ArmModel& arm, const Pose& target, std::mt19937_64& rng,
                              const IkOptions& opts, const JointConfig* first_seed,
                              const std::function<bool(const JointConfig&)>& accept)
{
    using Mat6 = Eigen::Matrix<double, 6, 6>;
    using Vec6 = Eigen::Matrix<double, 6, 1>;
    constexpr double h = 1e-6;
    const double lambda2 = opts.damping * opts.damping;

    auto solve_from = [&](JointConfig q) -> std::optional<JointConfig> {
        q = arm.clamp(q);
        for (int it = 0; it <= opts.iterations; ++it) {
            const Pose cur = fk_unchecked(arm, q).tcp;
            const Vec6 e = pose_error(target, cur);
            const double ep = e.head<3>().norm();
            const double er = e.tail<3>().norm();
            if ((ep < 0.1 * opts.pos_tol && er < 0.1 * opts.rot_tol) || it == opts.iterations) {
                if (ep < opts.pos_tol && er < opts.rot_tol) {
                    return q;
                }
                return std::nullopt;
            }
            Mat6 jac;
            for (int j = 0; j < kDof; ++j) {
                JointConfig qh = q;
                qh[j] += h;
                jac.col(j) = pose_error(fk_unchecked(arm, qh).tcp, cur) / h;
            }
            const Mat6 jjt = jac * jac.transpose() + lambda2 * Mat6::Identity();
            Vec6 dq = jac.transpose() * jjt.ldlt().solve(e);
            const double n = dq.norm();
            if (n > 0.5) {
                dq *= 0.5 / n;
            }
            q = wrap_or_clamp(arm, q + dq);
        }
        return std::nullopt;
    };

    int tried = 0;
    auto attempt = [&](const JointConfig& seed) -> std::optional<JointConfig> {
        ++tried;
        auto sol = solve_from(seed);
        if (sol && (!accept || accept(*sol))) {
            return sol;
        }
        return std::nullopt;
    };

    // The deterministic seeds all run; the solution nearest the reference
    // (first seed, else zero) wins, which keeps planned motions short.
    const JointConfig ref = first_seed ? *first_seed : JointConfig::Zero();
    std::optional<JointConfig> best;
    auto keep = [&](const std::optional<JointConfig>& s) {
        if (s && (!best || (*s - ref).squaredNorm() < (*best - ref).squaredNorm())) {
            best = s;
        }
    };
    if (first_seed) {
        keep(attempt(*first_seed));
    }
    keep(attempt(JointConfig::Zero()));
    if (auto yaw = facing_seed(arm, target)) {
        keep(attempt(*yaw));
    }
    if (best) {
        return best;
    }
    while (tried < opts.seed_count) {
        if (auto s = attempt(arm.random_config(rng))) {
            return s;
        }
    }
    return std::nullopt;
}

}  // namespace anyplace
