#include "anyplace/scene.hpp"

#include <sstream>

#include "anyplace/text_io.hpp"
#include "anyplace/work.hpp"

namespace anyplace {

namespace {

ConvexPoints posed_hull(const ObjectModel& m, const Pose& p)
{
    return ConvexPoints(transform_points(m.hull.points, p));
}

ConvexPoints shrunk(const ConvexPoints& c, double by)
{
    std::vector<Vec3> pts;
    for (const auto& p : c.points) {
        Vec3 d = p - c.center;
        double n = d.norm();
        pts.push_back(n > by ? c.center + d * ((n - by) / n) : c.center);
    }
    return ConvexPoints(std::move(pts));
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b)
{
    const Vec3 ab = b - a;
    const double l2 = ab.squaredNorm();
    const double t = l2 > 0.0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
    return (a + t * ab - p).norm();
}

bool capsule_hits(const Capsule& c, const ConvexPoints& body)
{
    work::charge(work::Op::Broadphase);
    if (point_segment_distance(body.center, c.a, c.b) > c.radius + body.bound_radius) {
        return false;
    }
    return capsule_distance(c, body) < 0.0;
}

bool bodies_hit(const ConvexPoints& x, const ConvexPoints& y)
{
    work::charge(work::Op::Broadphase);
    if ((x.center - y.center).norm() > x.bound_radius + y.bound_radius) {
        return false;
    }
    return convex_distance(x, y) <= 0.0;
}

std::array<Capsule, 3> gripper_capsules(const ArmModel& arm, const Pose& tcp)
{
    return {arm.gripper.palm.transformed(tcp), arm.gripper.fingers[0].transformed(tcp),
            arm.gripper.fingers[1].transformed(tcp)};
}

}  // namespace

SceneSpec make_scene(std::vector<Box> boxes, const std::vector<std::pair<ObjectModelPtr, Pose>>& objects,
                     int target)
{
    SceneSpec s;
    s.boxes = std::move(boxes);
    for (const auto& b : s.boxes) {
        s.box_shapes.push_back(ConvexPoints::from_box(b));
    }
    for (const auto& [model, pose] : objects) {
        s.objects.push_back(SceneObject{model, pose, posed_hull(*model, pose)});
    }
    if (s.objects.empty()) {
        target = -1;  // boxes only
    } else if (target < 0 || target >= static_cast<int>(s.objects.size())) {
        throw FormatError("scene target index out of range");
    }
    s.target = target;
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
        const auto& oi = s.objects[i];
        double lo = 1e300;
        for (const auto& p : oi.world.points) {
            lo = std::min(lo, p.z());
        }
        if (lo < -kPenetrationTol) {
            throw FormatError("object " + std::to_string(i) + " (" + oi.model->name + ") penetrates the table");
        }
        const auto si = shrunk(oi.world, kPenetrationTol);
        for (std::size_t j = i + 1; j < s.objects.size(); ++j) {
            if (convex_distance(si, shrunk(s.objects[j].world, kPenetrationTol)) <= 0.0) {
                throw FormatError("objects " + std::to_string(i) + " and " + std::to_string(j) + " interpenetrate");
            }
        }
        for (std::size_t b = 0; b < s.box_shapes.size(); ++b) {
            if (convex_distance(si, shrunk(s.box_shapes[b], kPenetrationTol)) <= 0.0) {
                throw FormatError("object " + std::to_string(i) + " interpenetrates box " + std::to_string(b));
            }
        }
    }
    return s;
}

void set_object_pose(SceneSpec& scene, int index, const Pose& pose)
{
    auto& o = scene.objects.at(index);
    o.pose = pose;
    o.world = posed_hull(*o.model, pose);
}

void attach_target(SceneSpec& scene, const Pose& grasp)
{
    scene.attached = Attachment{scene.target, grasp.inverse() * scene.objects[scene.target].pose};
}

void detach(SceneSpec& scene) { scene.attached.reset(); }

Pose attached_object_pose(const SceneSpec& scene, const Pose& tcp)
{
    return tcp * scene.attached.value().tcp_to_object;
}

bool in_collision(const ArmModel& arm, const JointConfig& q, const SceneSpec& scene)
{
    return in_collision(arm, fk_frames(arm, q), scene);
}

bool in_collision(const ArmModel& arm, const ArmFrames& frames, const SceneSpec& scene)
{
    std::array<Capsule, kDof> links;
    for (int i = 0; i < kDof; ++i) {
        links[i] = arm.link_capsules[i].transformed(frames.joints[i]);
    }
    const auto grip = gripper_capsules(arm, frames.tcp);
    const int held = scene.attached ? scene.attached->object : -1;

    for (const auto& c : links) {
        if (capsule_table_clearance(c) < 0.0) {
            return true;
        }
    }
    for (const auto& c : grip) {
        if (capsule_table_clearance(c) < 0.0) {
            return true;
        }
    }
    for (const auto& box : scene.box_shapes) {
        for (const auto& c : links) {
            if (capsule_hits(c, box)) {
                return true;
            }
        }
        for (const auto& c : grip) {
            if (capsule_hits(c, box)) {
                return true;
            }
        }
    }
    for (int j = 0; j < static_cast<int>(scene.objects.size()); ++j) {
        if (j == held) {
            continue;
        }
        const auto& body = scene.objects[j].world;
        // The gripper group (link 6, palm, fingers) never tests the target:
        // it reaches around it at pick and place.
        const int nlinks = (j == scene.target) ? kDof - 1 : kDof;
        for (int i = 0; i < nlinks; ++i) {
            if (capsule_hits(links[i], body)) {
                return true;
            }
        }
        if (j != scene.target) {
            for (const auto& c : grip) {
                if (capsule_hits(c, body)) {
                    return true;
                }
            }
        }
    }
    for (const auto& [a, b] : arm.self_pairs) {
        if (b == kDof - 1) {
            if (capsule_capsule_distance(links[a], links[b]) < 0.0) {
                return true;
            }
            for (const auto& c : grip) {
                if (capsule_capsule_distance(links[a], c) < 0.0) {
                    return true;
                }
            }
        } else if (capsule_capsule_distance(links[a], links[b]) < 0.0) {
            return true;
        }
    }
    if (scene.attached) {
        const auto& obj = scene.objects[held];
        const ConvexPoints carried(transform_points(obj.model->hull.points, attached_object_pose(scene, frames.tcp)));
        for (const auto& p : carried.points) {
            if (p.z() < -kCarriedTableTol) {
                return true;
            }
        }
        for (const auto& box : scene.box_shapes) {
            if (bodies_hit(carried, box)) {
                return true;
            }
        }
        for (int j = 0; j < static_cast<int>(scene.objects.size()); ++j) {
            if (j != held && bodies_hit(carried, scene.objects[j].world)) {
                return true;
            }
        }
    }
    return false;
}

namespace {

// Gripper plus the wrist links rigidly behind it: link 6 always, link 5
// when it lies on the joint-6 axis (then its placement ignores q6).
std::vector<Capsule> grasp_body(const ArmModel& arm, const Pose& grasp)
{
    const auto grip = gripper_capsules(arm, grasp);
    std::vector<Capsule> out(grip.begin(), grip.end());
    const Pose j6 = grasp * arm.tcp.inverse();
    out.push_back(arm.link_capsules[kDof - 1].transformed(j6));
    const Pose j5_in_j6 = arm.offsets[kDof - 1].inverse();
    const Capsule l5 = arm.link_capsules[kDof - 2].transformed(j5_in_j6);
    auto on_axis = [](const Vec3& p) { return p.head<2>().norm() < 1e-12; };
    if (arm.axes[kDof - 1].cross(Vec3::UnitZ()).norm() < 1e-12 && on_axis(l5.a) && on_axis(l5.b)) {
        out.push_back(l5.transformed(j6));
    }
    return out;
}

}  // namespace

bool gripper_collision_free(const ArmModel& arm, const Pose& grasp, const SceneSpec& scene)
{
    const auto grip = grasp_body(arm, grasp);
    for (const auto& c : grip) {
        if (capsule_table_clearance(c) < 0.0) {
            return false;
        }
        for (const auto& box : scene.box_shapes) {
            if (capsule_hits(c, box)) {
                return false;
            }
        }
        for (int j = 0; j < static_cast<int>(scene.objects.size()); ++j) {
            if (j != scene.target && capsule_hits(c, scene.objects[j].world)) {
                return false;
            }
        }
    }
    return true;
}

SceneFile load_scene(const std::filesystem::path& path)
{
    auto kv = KeyValueFile::load(path);
    const auto dir = path.parent_path();
    SceneFile sf;
    sf.name = kv.get_or("name", path.stem().string());
    if (kv.has("arm")) {
        sf.arm_path = dir / kv.get("arm");
    }
    std::vector<Box> boxes;
    for (const auto* e : kv.all("box")) {
        auto v = parse_doubles(e->value);
        if (v.size() != 6) {
            throw FormatError(path.string() + ":" + std::to_string(e->line) + ": box needs cx cy cz hx hy hz");
        }
        boxes.push_back(Box{Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])});
    }
    std::vector<std::pair<ObjectModelPtr, Pose>> objects;
    for (const auto* e : kv.all("object")) {
        auto tok = split_ws(e->value);
        if (tok.size() != 8) {
            throw FormatError(path.string() + ":" + std::to_string(e->line) +
                              ": object needs <mesh> tx ty tz qw qx qy qz");
        }
        auto mesh_path = dir / std::string(tok[0]);
        std::string rest;
        for (std::size_t i = 1; i < tok.size(); ++i) {
            rest += std::string(tok[i]) + " ";
        }
        sf.mesh_paths.push_back(std::string(tok[0]));
        objects.emplace_back(load_object_model(mesh_path), parse_pose(rest));
    }
    if (objects.empty()) {
        throw FormatError(path.string() + ": scene has no objects");
    }
    const int target = static_cast<int>(parse_int(kv.get("target")));
    try {
        sf.scene = make_scene(std::move(boxes), objects, target);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    sf.goal = parse_pose(kv.get("goal"));
    return sf;
}

std::string to_text(const SceneFile& sf, const std::filesystem::path& scene_dir)
{
    std::ostringstream os;
    os << "# anyplace scene v1\n";
    os << "# box = cx cy cz hx hy hz; object = <mesh> tx ty tz qw qx qy qz; goal = target pose p_T\n";
    os << "name = " << sf.name << "\n";
    if (!sf.arm_path.empty()) {
        os << "arm = " << std::filesystem::relative(sf.arm_path, scene_dir).generic_string() << "\n";
    }
    for (const auto& b : sf.scene.boxes) {
        os << "box = " << format_double(b.center.x()) << ' ' << format_double(b.center.y()) << ' '
           << format_double(b.center.z()) << ' ' << format_double(b.half_extents.x()) << ' '
           << format_double(b.half_extents.y()) << ' ' << format_double(b.half_extents.z()) << "\n";
    }
    for (std::size_t i = 0; i < sf.scene.objects.size(); ++i) {
        os << "object = " << sf.mesh_paths.at(i).generic_string() << ' ' << format_pose(sf.scene.objects[i].pose)
           << "\n";
    }
    os << "target = " << sf.scene.target << "\n";
    os << "goal = " << format_pose(sf.goal) << "\n";
    return os.str();
}

}  // namespace anyplace
