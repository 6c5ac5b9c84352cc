#include "anyplace/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace anyplace {

namespace {

struct Facet {
    int a, b, c;
    Vec3 n;
    double d;
    bool alive = true;
};

Facet make_facet(const std::vector<Vec3>& p, int a, int b, int c)
{
    Facet f{a, b, c, Vec3::Zero(), 0.0};
    f.n = (p[b] - p[a]).cross(p[c] - p[a]).normalized();
    f.d = f.n.dot(p[a]);
    return f;
}

}  // namespace

Vec3 ConvexHull::support(const Vec3& dir) const
{
    double best = -std::numeric_limits<double>::infinity();
    Vec3 out = Vec3::Zero();
    for (const auto& p : points) {
        double s = p.dot(dir);
        if (s > best) {
            best = s;
            out = p;
        }
    }
    return out;
}

ConvexHull convex_hull(std::span<const Vec3> input, double merge_angle)
{
    if (input.size() < 4) {
        throw FormatError("convex hull needs at least 4 points");
    }
    Vec3 lo = input[0];
    Vec3 hi = input[0];
    for (const auto& p : input) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double scale = std::max((hi - lo).norm(), 1e-12);
    const double eps = 1e-9 * scale;

    std::vector<Vec3> pts;
    for (const auto& p : input) {
        bool dup = false;
        for (const auto& q : pts) {
            if ((p - q).norm() <= eps) {
                dup = true;
                break;
            }
        }
        if (!dup) {
            pts.push_back(p);
        }
    }
    const int n = static_cast<int>(pts.size());

    // Initial tetrahedron from extreme points.
    int i0 = 0;
    for (int i = 1; i < n; ++i) {
        if (pts[i].x() < pts[i0].x()) {
            i0 = i;
        }
    }
    int i1 = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = (pts[i] - pts[i0]).norm();
        if (d > best) {
            best = d;
            i1 = i;
        }
    }
    int i2 = -1;
    best = 0.0;
    const Vec3 axis = (pts[i1] - pts[i0]).normalized();
    for (int i = 0; i < n; ++i) {
        double d = (pts[i] - pts[i0]).cross(axis).norm();
        if (d > best) {
            best = d;
            i2 = i;
        }
    }
    if (i1 < 0 || i2 < 0 || best <= eps) {
        throw FormatError("convex hull input is degenerate (collinear points)");
    }
    const Vec3 pn = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
    int i3 = -1;
    best = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = std::abs(pn.dot(pts[i] - pts[i0]));
        if (d > best) {
            best = d;
            i3 = i;
        }
    }
    if (i3 < 0 || best <= eps) {
        throw FormatError("convex hull input is degenerate (coplanar points)");
    }

    const Vec3 inside = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
    std::vector<Facet> facets;
    auto add = [&](int a, int b, int c) {
        Facet f = make_facet(pts, a, b, c);
        if (f.n.dot(inside) - f.d > 0.0) {
            f = make_facet(pts, a, c, b);
        }
        facets.push_back(f);
    };
    add(i0, i1, i2);
    add(i0, i1, i3);
    add(i0, i2, i3);
    add(i1, i2, i3);

    for (int i = 0; i < n; ++i) {
        if (i == i0 || i == i1 || i == i2 || i == i3) {
            continue;
        }
        const Vec3& p = pts[i];
        std::set<std::pair<int, int>> visible_edges;
        bool any = false;
        for (auto& f : facets) {
            if (f.alive && f.n.dot(p) - f.d > eps) {
                f.alive = false;
                any = true;
                visible_edges.insert({f.a, f.b});
                visible_edges.insert({f.b, f.c});
                visible_edges.insert({f.c, f.a});
            }
        }
        if (!any) {
            continue;
        }
        for (const auto& [u, v] : visible_edges) {
            if (!visible_edges.count({v, u})) {
                facets.push_back(make_facet(pts, u, v, i));
            }
        }
        facets.erase(std::remove_if(facets.begin(), facets.end(), [](const Facet& f) { return !f.alive; }),
                     facets.end());
    }

    // Reindex to the vertices actually used.
    std::map<int, int> remap;
    ConvexHull hull;
    for (const auto& f : facets) {
        for (int k : {f.a, f.b, f.c}) {
            if (!remap.count(k)) {
                int id = static_cast<int>(hull.points.size());
                remap[k] = id;
                hull.points.push_back(pts[k]);
            }
        }
        hull.triangles.push_back({remap[f.a], remap[f.b], remap[f.c]});
    }
    hull.bbox_min = hull.points[0];
    hull.bbox_max = hull.points[0];
    for (const auto& p : hull.points) {
        hull.bbox_min = hull.bbox_min.cwiseMin(p);
        hull.bbox_max = hull.bbox_max.cwiseMax(p);
    }
    double vol6 = 0.0;
    for (const auto& t : hull.triangles) {
        vol6 += (hull.points[t[0]] - inside).dot((hull.points[t[1]] - inside).cross(hull.points[t[2]] - inside));
    }
    hull.volume = vol6 / 6.0;

    // Merge coplanar triangles into faces.
    const double cos_tol = std::cos(merge_angle);
    for (const auto& t : hull.triangles) {
        const Vec3& a = hull.points[t[0]];
        const Vec3& b = hull.points[t[1]];
        const Vec3& c = hull.points[t[2]];
        Vec3 cr = (b - a).cross(c - a);
        double area = 0.5 * cr.norm();
        Vec3 nrm = cr.normalized();
        HullFace* target = nullptr;
        for (auto& face : hull.faces) {
            if (face.normal.dot(nrm) >= cos_tol) {
                target = &face;
                break;
            }
        }
        if (!target) {
            hull.faces.emplace_back();
            target = &hull.faces.back();
            target->normal = nrm;
        }
        // running area-weighted normal
        target->normal = (target->normal * target->area + nrm * area);
        target->normal.normalize();
        target->center = (target->center * target->area + area * (a + b + c) / 3.0) / (target->area + area);
        target->area += area;
        target->triangles.push_back(t);
    }
    for (auto& face : hull.faces) {
        std::set<int> ids;
        for (const auto& t : face.triangles) {
            ids.insert(t.begin(), t.end());
        }
        face.offset = face.normal.dot(face.center);
        // Boundary of the face: 2D hull in the face frame, CCW around the
        // normal. Coplanar points interior to the face or on an edge are dropped.
        Vec3 u = (std::abs(face.normal.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(face.normal).normalized();
        Vec3 w = face.normal.cross(u);
        struct P2 {
            double x, y;
            int id;
        };
        std::vector<P2> q;
        for (int id : ids) {
            Vec3 d = hull.points[id] - face.center;
            q.push_back({d.dot(u), d.dot(w), id});
        }
        std::sort(q.begin(), q.end(), [](const P2& a, const P2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
        auto turn = [](const P2& o, const P2& a, const P2& b) {
            return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
        };
        const double ext = (hull.bbox_max - hull.bbox_min).norm();
        const double area_tol = 1e-12 * ext * ext;
        std::vector<P2> chain;
        for (int pass = 0; pass < 2; ++pass) {
            const std::size_t base = chain.size();
            for (const auto& p : q) {
                while (chain.size() >= base + 2 && turn(chain[chain.size() - 2], chain.back(), p) <= area_tol) {
                    chain.pop_back();
                }
                chain.push_back(p);
            }
            chain.pop_back();
            std::reverse(q.begin(), q.end());
        }
        for (const auto& p : chain) {
            face.polygon.push_back(p.id);
        }
    }
    return hull;
}

double polygon_solid_angle(std::span<const Vec3> polygon, const Vec3& apex)
{
    double total = 0.0;
    const Vec3 a = polygon[0] - apex;
    for (std::size_t i = 1; i + 1 < polygon.size(); ++i) {
        const Vec3 b = polygon[i] - apex;
        const Vec3 c = polygon[i + 1] - apex;
        const double la = a.norm();
        const double lb = b.norm();
        const double lc = c.norm();
        const double num = std::abs(a.dot(b.cross(c)));
        const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
        total += 2.0 * std::atan2(num, den);
    }
    return total;
}

bool projects_inside(const ConvexHull& hull, const HullFace& face, const Vec3& p, double margin)
{
    const Vec3 q = p - (face.normal.dot(p) - face.offset) * face.normal;
    const std::size_t k = face.polygon.size();
    for (std::size_t i = 0; i < k; ++i) {
        const Vec3& a = hull.points[face.polygon[i]];
        const Vec3& b = hull.points[face.polygon[(i + 1) % k]];
        // inward edge normal for a CCW polygon
        const Vec3 inward = face.normal.cross(b - a).normalized();
        if (inward.dot(q - a) <= margin) {
            return false;
        }
    }
    return true;
}

}  // namespace anyplace
