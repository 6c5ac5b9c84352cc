#include "anyplace/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anyplace/work.hpp"

namespace anyplace {

std::array<Vec3, 8> Box::corners() const
{
    std::array<Vec3, 8> out;
    for (int i = 0; i < 8; ++i) {
        Vec3 s((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
        out[i] = center + s.cwiseProduct(half_extents);
    }
    return out;
}

ConvexPoints::ConvexPoints(std::vector<Vec3> pts) : points(std::move(pts))
{
    Vec3 lo = points.front();
    Vec3 hi = points.front();
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    center = 0.5 * (lo + hi);
    bound_radius = 0.0;
    for (const auto& p : points) {
        bound_radius = std::max(bound_radius, (p - center).norm());
    }
}

ConvexPoints ConvexPoints::from_box(const Box& b)
{
    auto c = b.corners();
    return ConvexPoints(std::vector<Vec3>(c.begin(), c.end()));
}

namespace {

Vec3 support(std::span<const Vec3> pts, const Vec3& d)
{
    double best = -std::numeric_limits<double>::infinity();
    const Vec3* arg = &pts[0];
    for (const auto& p : pts) {
        double s = p.dot(d);
        if (s > best) {
            best = s;
            arg = &p;
        }
    }
    return *arg;
}

struct Simplex {
    std::array<Vec3, 4> p;
    int n = 0;
};

// Closest point to the origin on a triangle; keeps only the supporting
// vertices in s (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_triangle(const Vec3& a, const Vec3& b, const Vec3& c, Simplex& s)
{
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const Vec3 ap = -a;
    const double d1 = ab.dot(ap);
    const double d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) {
        s.p[0] = a;
        s.n = 1;
        return a;
    }
    const Vec3 bp = -b;
    const double d3 = ab.dot(bp);
    const double d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) {
        s.p[0] = b;
        s.n = 1;
        return b;
    }
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        s.p[0] = a;
        s.p[1] = b;
        s.n = 2;
        return a + v * ab;
    }
    const Vec3 cp = -c;
    const double d5 = ab.dot(cp);
    const double d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) {
        s.p[0] = c;
        s.n = 1;
        return c;
    }
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        s.p[0] = a;
        s.p[1] = c;
        s.n = 2;
        return a + w * ac;
    }
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        s.p[0] = b;
        s.p[1] = c;
        s.n = 2;
        return b + w * (c - b);
    }
    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom;
    const double w = vc * denom;
    s.p[0] = a;
    s.p[1] = b;
    s.p[2] = c;
    s.n = 3;
    return a + ab * v + ac * w;
}

Vec3 closest_segment(const Vec3& a, const Vec3& b, Simplex& s)
{
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? -a.dot(ab) / len2 : 0.0;
    if (t <= 0.0) {
        s.p[0] = a;
        s.n = 1;
        return a;
    }
    if (t >= 1.0) {
        s.p[0] = b;
        s.n = 1;
        return b;
    }
    s.p[0] = a;
    s.p[1] = b;
    s.n = 2;
    return a + t * ab;
}

// Origin and d on opposite sides of plane (a, b, c)? Degenerate planes count
// as separating so every face gets examined.
bool separates(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d)
{
    const Vec3 n = (b - a).cross(c - a);
    const double so = (-a).dot(n);
    const double sd = (d - a).dot(n);
    if (std::abs(sd) < 1e-18) {
        return true;
    }
    return so * sd < 0.0;
}

// Returns false when the origin is inside the tetrahedron.
bool closest_tetra(const Simplex& in, Simplex& out, Vec3& v)
{
    const Vec3& a = in.p[0];
    const Vec3& b = in.p[1];
    const Vec3& c = in.p[2];
    const Vec3& d = in.p[3];
    double best = std::numeric_limits<double>::infinity();
    bool outside = false;
    const std::array<std::array<const Vec3*, 4>, 4> faces = {{
        {&a, &b, &c, &d},
        {&a, &c, &d, &b},
        {&a, &d, &b, &c},
        {&b, &d, &c, &a},
    }};
    for (const auto& f : faces) {
        if (!separates(*f[0], *f[1], *f[2], *f[3])) {
            continue;
        }
        outside = true;
        Simplex s;
        Vec3 q = closest_triangle(*f[0], *f[1], *f[2], s);
        double dq = q.squaredNorm();
        if (dq < best) {
            best = dq;
            v = q;
            out = s;
        }
    }
    return outside;
}

}  // namespace

double gjk_distance(std::span<const Vec3> a, std::span<const Vec3> b)
{
    work::charge(work::Op::Narrowphase);
    Simplex s;
    Vec3 v = a[0] - b[0];
    s.p[0] = v;
    s.n = 1;
    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 64; ++iter) {
        const double vv = v.squaredNorm();
        if (vv < 1e-24) {
            return 0.0;
        }
        const Vec3 w = support(a, -v) - support(b, v);
        if (vv - v.dot(w) <= 1e-12 * std::max(vv, 1e-12)) {
            return std::sqrt(vv);
        }
        bool dup = false;
        for (int i = 0; i < s.n; ++i) {
            if ((s.p[i] - w).squaredNorm() < 1e-24) {
                dup = true;
            }
        }
        if (dup) {
            return std::sqrt(vv);
        }
        s.p[s.n++] = w;
        Simplex r;
        switch (s.n) {
        case 2:
            v = closest_segment(s.p[0], s.p[1], r);
            break;
        case 3:
            v = closest_triangle(s.p[0], s.p[1], s.p[2], r);
            break;
        default:
            if (!closest_tetra(s, r, v)) {
                return 0.0;
            }
            break;
        }
        s = r;
        const double nv = v.squaredNorm();
        if (nv >= prev) {
            // no progress: numerical floor reached
            return std::sqrt(std::min(nv, prev));
        }
        prev = nv;
    }
    return v.norm();
}

double segment_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2)
{
    // Ericson 5.1.9
    const Vec3 d1 = q1 - p1;
    const Vec3 d2 = q2 - p2;
    const Vec3 r = p1 - p2;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    double s = 0.0;
    double t = 0.0;
    constexpr double eps = 1e-18;
    if (a <= eps && e <= eps) {
        return r.norm();
    }
    if (a <= eps) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= eps) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > eps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p1 + d1 * s) - (p2 + d2 * t)).norm();
}

double capsule_distance(const Capsule& c, const ConvexPoints& body)
{
    const std::array<Vec3, 2> seg = {c.a, c.b};
    return gjk_distance(seg, body.points) - c.radius;
}

double capsule_capsule_distance(const Capsule& x, const Capsule& y)
{
    return segment_segment_distance(x.a, x.b, y.a, y.b) - x.radius - y.radius;
}

double convex_distance(const ConvexPoints& x, const ConvexPoints& y)
{
    return gjk_distance(x.points, y.points);
}

double capsule_table_clearance(const Capsule& c)
{
    return std::min(c.a.z(), c.b.z()) - c.radius;
}

}  // namespace anyplace
