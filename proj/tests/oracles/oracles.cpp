#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace oracle {

bool Report::pass() const { return std::abs(system - oracle) <= tolerance; }

std::string Report::str() const
{
    std::ostringstream os;
    os.precision(10);
    os << "[oracle " << name << "] " << instance << ": oracle=" << oracle << " system=" << system
       << " tol=" << tolerance << (pass() ? " ok" : " MISMATCH");
    return os.str();
}

M3 quat_matrix(double w, double x, double y, double z)
{
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n;
    x /= n;
    y /= n;
    z /= n;
    M3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

M4 rigid(const M3& r, const V3& t)
{
    M4 m = M4::Identity();
    m.topLeftCorner<3, 3>() = r;
    m.topRightCorner<3, 1>() = t;
    return m;
}

M4 rigid_inverse(const M4& m)
{
    const M3 rt = m.topLeftCorner<3, 3>().transpose();
    return rigid(rt, -rt * m.topRightCorner<3, 1>());
}

M4 retarget(const M4& g_i, const M4& p_i, const M4& p_j) { return p_j * rigid_inverse(p_i) * g_i; }

std::vector<Plane> hull_planes(const std::vector<V3>& pts, double tol)
{
    const int n = static_cast<int>(pts.size());
    std::vector<Plane> out;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            for (int k = j + 1; k < n; ++k) {
                V3 nrm = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
                if (nrm.norm() < 1e-12) {
                    continue;
                }
                nrm.normalize();
                double d = nrm.dot(pts[i]);
                int above = 0;
                int below = 0;
                for (const auto& p : pts) {
                    const double s = nrm.dot(p) - d;
                    above += s > tol;
                    below += s < -tol;
                }
                if (above > 0 && below > 0) {
                    continue;
                }
                if (above > 0) {
                    nrm = -nrm;
                    d = -d;
                }
                bool dup = false;
                for (const auto& pl : out) {
                    if ((pl.normal - nrm).norm() < 1e-7 && std::abs(pl.offset - d) < 1e-7) {
                        dup = true;
                        break;
                    }
                }
                if (dup) {
                    continue;
                }
                Plane pl{nrm, d, {}};
                for (int m = 0; m < n; ++m) {
                    if (std::abs(nrm.dot(pts[m]) - d) <= tol) {
                        pl.on_plane.push_back(m);
                    }
                }
                out.push_back(std::move(pl));
            }
        }
    }
    return out;
}

namespace {

// Counter-clockwise (about the plane normal) convex polygon of the plane's
// points, in 2-D plane coordinates.
std::vector<Eigen::Vector2d> face_polygon(const std::vector<V3>& pts, const Plane& plane, V3& u, V3& v)
{
    u = plane.normal.unitOrthogonal();
    v = plane.normal.cross(u);
    std::vector<Eigen::Vector2d> q;
    for (int i : plane.on_plane) {
        q.emplace_back(pts[i].dot(u), pts[i].dot(v));
    }
    std::sort(q.begin(), q.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
    };
    std::vector<Eigen::Vector2d> h(2 * q.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], q[i]) <= 1e-15) {
            --k;
        }
        h[k++] = q[i];
    }
    for (std::size_t i = q.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], q[i]) <= 1e-15) {
            --k;
        }
        h[k++] = q[i];
    }
    h.resize(k - 1);
    return h;
}

}  // namespace

bool projects_inside(const std::vector<V3>& pts, const Plane& plane, const V3& centroid)
{
    V3 u, v;
    const auto poly = face_polygon(pts, plane, u, v);
    const Eigen::Vector2d c(centroid.dot(u), centroid.dot(v));
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Eigen::Vector2d e = poly[(i + 1) % poly.size()] - poly[i];
        const Eigen::Vector2d w = c - poly[i];
        if ((e.x() * w.y() - e.y() * w.x()) / e.norm() <= 1e-9) {
            return false;
        }
    }
    return true;
}

double hull_volume(const std::vector<V3>& pts, const std::vector<Plane>& planes)
{
    V3 inner = V3::Zero();
    int cnt = 0;
    for (const auto& pl : planes) {
        for (int i : pl.on_plane) {
            inner += pts[i];
            ++cnt;
        }
    }
    inner /= cnt;
    double vol = 0.0;
    for (const auto& pl : planes) {
        V3 u, v;
        const auto poly = face_polygon(pts, pl, u, v);
        auto lift = [&](const Eigen::Vector2d& p) { return V3(p.x() * u + p.y() * v + pl.offset * pl.normal); };
        for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
            const V3 a = lift(poly[0]) - inner;
            const V3 b = lift(poly[i]) - inner;
            const V3 c = lift(poly[i + 1]) - inner;
            vol += std::abs(a.dot(b.cross(c))) / 6.0;
        }
    }
    return vol;
}

std::vector<FaceProbability> stability_mc(const std::vector<V3>& pts, const V3& centroid, long long samples,
                                          std::uint64_t seed)
{
    const auto planes = hull_planes(pts);
    std::vector<long long> hits(planes.size(), 0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (long long s = 0; s < samples; ++s) {
        const V3 d = V3(g(rng), g(rng), g(rng)).normalized();
        double best = INFINITY;
        std::size_t face = 0;
        for (std::size_t f = 0; f < planes.size(); ++f) {
            const double nd = planes[f].normal.dot(d);
            if (nd <= 0.0) {
                continue;
            }
            const double t = (planes[f].offset - planes[f].normal.dot(centroid)) / nd;
            if (t < best) {
                best = t;
                face = f;
            }
        }
        ++hits[face];
    }
    long long stable_hits = 0;
    std::vector<bool> stable(planes.size());
    for (std::size_t f = 0; f < planes.size(); ++f) {
        stable[f] = projects_inside(pts, planes[f], centroid);
        if (stable[f]) {
            stable_hits += hits[f];
        }
    }
    std::vector<FaceProbability> out;
    for (std::size_t f = 0; f < planes.size(); ++f) {
        if (!stable[f]) {
            continue;
        }
        const double p = static_cast<double>(hits[f]) / stable_hits;
        out.push_back({planes[f].normal, p, std::sqrt(p * (1 - p) / stable_hits)});
    }
    return out;
}

double forward(const DenseNet& net, const Eigen::VectorXd& x)
{
    Eigen::VectorXd a = x;
    for (std::size_t l = 0; l < net.w.size(); ++l) {
        Eigen::VectorXd z = net.w[l] * a + net.b[l];
        if (l + 1 < net.w.size()) {
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                z(i) = z(i) > 0.0 ? z(i) : 0.0;
            }
        }
        a = z;
    }
    return a(0);
}

double mse(const DenseNet& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double e = forward(net, x.row(i).transpose()) - y(i);
        s += e * e;
    }
    return s / x.rows();
}

std::vector<double> fd_gradient(const DenseNet& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double h)
{
    DenseNet n = net;
    std::vector<double> g;
    auto probe = [&](double& p) {
        const double keep = p;
        p = keep + h;
        const double up = mse(n, x, y);
        p = keep - h;
        const double down = mse(n, x, y);
        p = keep;
        g.push_back((up - down) / (2 * h));
    };
    for (std::size_t l = 0; l < n.w.size(); ++l) {
        for (Eigen::Index r = 0; r < n.w[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < n.w[l].cols(); ++c) {
                probe(n.w[l](r, c));
            }
        }
        for (Eigen::Index r = 0; r < n.b[l].size(); ++r) {
            probe(n.b[l](r));
        }
    }
    return g;
}

std::optional<std::size_t> argmin_sum(const std::vector<std::vector<double>>& rows, const std::vector<bool>& valid)
{
    std::optional<std::size_t> best;
    double best_v = INFINITY;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!valid[i]) {
            continue;
        }
        double s = 0.0;
        for (double v : rows[i]) {
            s += v;
        }
        if (!best || s < best_v) {
            best = i;
            best_v = s;
        }
    }
    return best;
}

double point_box_distance(const V3& p, const V3& center, const V3& half)
{
    const V3 d = (p - center).cwiseAbs() - half;
    const V3 outside = d.cwiseMax(0.0);
    const double inside = std::min(d.maxCoeff(), 0.0);
    return outside.norm() + inside;
}

double segment_box_distance(const V3& a, const V3& b, const V3& center, const V3& half)
{
    auto f = [&](double t) { return point_box_distance(a + t * (b - a), center, half); };
    double lo = 0.0;
    double hi = 1.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double m1 = hi - phi * (hi - lo);
        const double m2 = lo + phi * (hi - lo);
        if (f(m1) < f(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    return std::min({f(0.5 * (lo + hi)), f(0.0), f(1.0)});
}

}  // namespace oracle
