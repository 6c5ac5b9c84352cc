#include "anyplace/assets.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "anyplace/planner.hpp"

namespace anyplace {

namespace {

using Vec2 = Eigen::Vector2d;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool inside_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c)
{
    return cross2(b - a, p - a) >= 0.0 && cross2(c - b, p - b) >= 0.0 && cross2(a - c, p - c) >= 0.0;
}

TriMesh recentered(std::vector<Vec3> v, std::vector<Triangle> t)
{
    Vec3 lo = v.front();
    Vec3 hi = v.front();
    for (const auto& p : v) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec3 c = 0.5 * (lo + hi);
    for (auto& p : v) {
        p -= c;
    }
    return make_mesh(std::move(v), std::move(t));
}

// Lays a prism built along z on its side: (x, y, z) -> (x, z, y).
TriMesh swap_yz(const TriMesh& m)
{
    std::vector<Vec3> v;
    for (const auto& p : m.vertices) {
        v.emplace_back(p.x(), p.z(), p.y());
    }
    std::vector<Triangle> t;
    for (const auto& f : m.triangles) {
        t.push_back({f[0], f[2], f[1]});
    }
    return recentered(std::move(v), std::move(t));
}

}  // namespace

std::vector<Triangle> ear_clip(const std::vector<Vec2>& polygon)
{
    const int n = static_cast<int>(polygon.size());
    if (n < 3) {
        throw std::invalid_argument("ear_clip needs at least 3 vertices");
    }
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) {
        idx[i] = i;
    }
    std::vector<Triangle> out;
    int guard = 0;
    while (idx.size() > 3) {
        const int m = static_cast<int>(idx.size());
        bool clipped = false;
        for (int i = 0; i < m; ++i) {
            const int ia = idx[(i + m - 1) % m];
            const int ib = idx[i];
            const int ic = idx[(i + 1) % m];
            const Vec2& a = polygon[ia];
            const Vec2& b = polygon[ib];
            const Vec2& c = polygon[ic];
            if (cross2(b - a, c - b) <= 1e-15) {
                continue;  // reflex or collinear
            }
            bool empty = true;
            for (int j : idx) {
                if (j != ia && j != ib && j != ic && inside_triangle(polygon[j], a, b, c)) {
                    empty = false;
                    break;
                }
            }
            if (!empty) {
                continue;
            }
            out.push_back({ia, ib, ic});
            idx.erase(idx.begin() + i);
            clipped = true;
            break;
        }
        if (!clipped || ++guard > 4 * n) {
            throw std::invalid_argument("ear_clip: polygon is not simple and counter-clockwise");
        }
    }
    out.push_back({idx[0], idx[1], idx[2]});
    return out;
}

TriMesh extrude_polygon(const std::vector<Vec2>& polygon, double height)
{
    const auto cap = ear_clip(polygon);
    const int n = static_cast<int>(polygon.size());
    std::vector<Vec3> v;
    for (const auto& p : polygon) {
        v.emplace_back(p.x(), p.y(), 0.0);
    }
    for (const auto& p : polygon) {
        v.emplace_back(p.x(), p.y(), height);
    }
    std::vector<Triangle> t;
    for (const auto& f : cap) {
        t.push_back({f[0], f[2], f[1]});
        t.push_back({f[0] + n, f[1] + n, f[2] + n});
    }
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        t.push_back({i, j, j + n});
        t.push_back({i, j + n, i + n});
    }
    return recentered(std::move(v), std::move(t));
}

TriMesh box_mesh(double x, double y, double z)
{
    return extrude_polygon({Vec2(0, 0), Vec2(x, 0), Vec2(x, y), Vec2(0, y)}, z);
}

std::vector<NamedMesh> generate_meshes(std::uint64_t seed)
{
    std::mt19937_64 rng(mix_seed(seed, 0x6d657368));
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto r3 = [](double v) { return std::round(v * 1000.0) / 1000.0; };
    std::vector<NamedMesh> out;
    const char* families[] = {"box", "slab", "bar", "wedge", "lshape", "tshape"};
    for (const char* fam : families) {
        const std::string f = fam;
        for (int i = 0; i < 6; ++i) {
            TriMesh m;
            if (f == "box") {
                m = box_mesh(r3(u(0.04, 0.06)), r3(u(0.04, 0.06)), r3(u(0.04, 0.06)));
            } else if (f == "slab") {
                m = box_mesh(r3(u(0.06, 0.08)), r3(u(0.045, 0.065)), r3(u(0.02, 0.03)));
            } else if (f == "bar") {
                m = box_mesh(r3(u(0.10, 0.14)), r3(u(0.03, 0.04)), r3(u(0.03, 0.04)));
            } else if (f == "wedge") {
                const double a = r3(u(0.05, 0.07));
                const double b = r3(u(0.035, 0.05));
                m = swap_yz(extrude_polygon({Vec2(0, 0), Vec2(a, 0), Vec2(0, b)}, r3(u(0.04, 0.06))));
            } else if (f == "lshape") {
                const double a = r3(u(0.06, 0.08));
                const double w = r3(u(0.025, 0.035));
                m = extrude_polygon({Vec2(0, 0), Vec2(a, 0), Vec2(a, w), Vec2(w, w), Vec2(w, a), Vec2(0, a)},
                                    r3(u(0.03, 0.045)));
            } else {
                const double a = r3(u(0.07, 0.09));
                const double w = r3(u(0.025, 0.035));
                const double s = r3(u(0.04, 0.06));
                const double h = 0.5 * (a - w);
                m = extrude_polygon({Vec2(0, 0), Vec2(a, 0), Vec2(a, w), Vec2(h + w, w), Vec2(h + w, w + s),
                                     Vec2(h, w + s), Vec2(h, w), Vec2(0, w)},
                                    r3(u(0.03, 0.045)));
            }
            char name[32];
            std::snprintf(name, sizeof(name), "%s_%02d", fam, i);
            out.push_back(NamedMesh{name, i % 3 == 2 ? "test" : "train", std::move(m)});
        }
    }
    return out;
}

namespace {

double footprint_radius(const ObjectModel& m)
{
    double r = 0.0;
    for (const auto& p : m.hull.points) {
        r = std::max(r, p.norm());
    }
    return r;
}

struct Disc {
    Vec2 c;
    double r;
};

bool clear_of(const std::vector<Disc>& discs, const Disc& d, double gap)
{
    for (const auto& o : discs) {
        if ((o.c - d.c).norm() < o.r + d.r + gap) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<GeneratedScene> generate_scenes(const ArmModel& arm,
                                            const std::vector<std::pair<ObjectModelPtr, std::filesystem::path>>& targets,
                                            const std::vector<std::pair<ObjectModelPtr, std::filesystem::path>>& distractors,
                                            std::uint64_t seed, const SceneGenOptions& opts,
                                            const std::function<void(const GeneratedScene&, int)>& progress)
{
    if (targets.empty() || distractors.empty()) {
        throw std::invalid_argument("generate_scenes needs target and distractor meshes");
    }
    std::vector<GeneratedScene> out;
    for (int s = 0; s < opts.scene_count; ++s) {
        const bool regrasp = s < opts.regrasp_scenes;
        const auto& [tmodel, tpath] = targets[s % targets.size()];
        const auto tobj = make_task_objects({tmodel}, arm).front();
        std::mt19937_64 rng(mix_seed(seed, 0x7363656e + s));
        auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
        bool accepted = false;
        for (int attempt = 1; attempt <= opts.max_attempts && !accepted; ++attempt) {
            const auto& st = tmodel->stable;
            const std::size_t f0 = std::uniform_int_distribution<std::size_t>(0, std::min<std::size_t>(st.size(), 3) - 1)(rng);
            std::size_t fT = f0;
            if (regrasp) {
                // opposite-ish support face: the most anti-parallel support normal
                double best = 2.0;
                for (std::size_t i = 0; i < st.size(); ++i) {
                    const double c = st[i].support_normal.dot(st[f0].support_normal);
                    if (c < best) {
                        best = c;
                        fT = i;
                    }
                }
            }
            auto place = [&](std::size_t face, double x, double y, double yaw) {
                return Pose::from_translation(Vec3(x, y, 0.0)) * Pose::from_axis_angle(Vec3::UnitZ(), yaw) *
                       st[face].pose;
            };
            const Pose p0 = place(f0, u(-0.12, -0.04), u(0.0, 0.12), u(-M_PI, M_PI));
            const Pose pT = place(fT, u(0.04, 0.12), u(0.0, 0.12), u(-M_PI, M_PI));
            const double tr = footprint_radius(*tmodel);
            std::vector<Disc> discs{{p0.translation().head<2>(), tr}, {pT.translation().head<2>(), tr}};
            std::vector<std::pair<ObjectModelPtr, Pose>> objs{{tmodel, p0}};
            std::vector<std::filesystem::path> paths{tpath};
            int tries = 0;
            while (static_cast<int>(objs.size()) < opts.distractors + 1 && tries++ < 500) {
                const auto& [dm, dp] = distractors[std::uniform_int_distribution<std::size_t>(0, distractors.size() - 1)(rng)];
                const std::size_t face = std::uniform_int_distribution<std::size_t>(0, std::min<std::size_t>(dm->stable.size(), 2) - 1)(rng);
                const Disc d{Vec2(u(-0.3, 0.3), u(-0.08, 0.25)), footprint_radius(*dm)};
                if (!clear_of(discs, d, 0.035)) {
                    continue;
                }
                discs.push_back(d);
                objs.emplace_back(dm, Pose::from_translation(Vec3(d.c.x(), d.c.y(), 0.0)) *
                                          Pose::from_axis_angle(Vec3::UnitZ(), u(-M_PI, M_PI)) * dm->stable[face].pose);
                paths.push_back(dp);
            }
            if (static_cast<int>(objs.size()) < opts.distractors + 1) {
                continue;
            }
            GeneratedScene g;
            g.file.name = "scene_" + std::to_string(s);
            g.file.scene = make_scene({}, objs, 0);
            g.file.goal = pT;
            g.file.mesh_paths = paths;
            g.needs_intermediate = regrasp;
            SolveTask task;
            task.arm = &arm;
            task.scene = g.file.scene;
            task.object = tobj;
            task.p_T = pT;
            task.name = g.file.name;
            SolveOptions direct = opts.check;
            direct.goal_only = true;
            direct.budget = 0.0;
            direct.stop_at_first = true;
            const bool direct_ok = solve(Method::Es, task, direct).success();
            if (regrasp) {
                if (direct_ok) {
                    continue;
                }
                SolveOptions full = opts.check;
                full.budget = 0.0;
                full.stop_at_first = true;
                if (!solve(Method::Es, task, full).success()) {
                    continue;
                }
            } else if (!direct_ok) {
                continue;
            }
            accepted = true;
            if (progress) {
                progress(g, attempt);
            }
            out.push_back(std::move(g));
        }
        if (!accepted) {
            throw std::runtime_error("could not generate scene " + std::to_string(s) + " within " +
                                     std::to_string(opts.max_attempts) + " attempts");
        }
    }
    return out;
}

}  // namespace anyplace
