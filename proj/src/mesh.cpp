#include "anyplace/mesh.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace anyplace {

namespace {

void fan(std::vector<Triangle>& out, const std::vector<int>& poly)
{
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        out.push_back({poly[0], poly[i], poly[i + 1]});
    }
}

}  // namespace

TriMesh make_mesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
{
    if (vertices.size() < 4 || triangles.size() < 4) {
        throw FormatError("mesh is not watertight: needs at least 4 vertices and 4 triangles");
    }
    const int nv = static_cast<int>(vertices.size());
    std::map<std::pair<int, int>, int> edges;
    for (std::size_t f = 0; f < triangles.size(); ++f) {
        const auto& t = triangles[f];
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= nv) {
                throw FormatError("triangle " + std::to_string(f) + " has out-of-range vertex index");
            }
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw FormatError("triangle " + std::to_string(f) + " is degenerate (repeated vertex)");
        }
        for (int k = 0; k < 3; ++k) {
            int a = t[k];
            int b = t[(k + 1) % 3];
            ++edges[{std::min(a, b), std::max(a, b)}];
        }
    }
    for (const auto& [e, count] : edges) {
        if (count != 2) {
            throw FormatError("mesh is not watertight: edge (" + std::to_string(e.first) + "," +
                              std::to_string(e.second) + ") is shared by " + std::to_string(count) +
                              " triangles (expected 2)");
        }
    }

    // Signed tetrahedra against the origin; the sign cancels for either
    // consistent winding.
    double vol6 = 0.0;
    Vec3 acc = Vec3::Zero();
    for (const auto& t : triangles) {
        const Vec3& a = vertices[t[0]];
        const Vec3& b = vertices[t[1]];
        const Vec3& c = vertices[t[2]];
        double v = a.dot(b.cross(c));
        vol6 += v;
        acc += v * (a + b + c);
    }
    if (std::abs(vol6) < 1e-15) {
        throw FormatError("mesh encloses zero volume");
    }
    TriMesh m;
    m.centroid = acc / (4.0 * vol6);
    m.volume = std::abs(vol6) / 6.0;
    m.vertices = std::move(vertices);
    m.triangles = std::move(triangles);
    return m;
}

TriMesh parse_obj(std::string_view text, const std::string& source)
{
    std::vector<Vec3> verts;
    std::vector<Triangle> tris;
    int lineno = 0;
    for (auto raw : split(text, '\n')) {
        ++lineno;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto tok = split_ws(line);
        try {
            if (tok[0] == "v") {
                if (tok.size() < 4) {
                    throw FormatError("vertex needs 3 coordinates");
                }
                verts.emplace_back(parse_double(tok[1]), parse_double(tok[2]), parse_double(tok[3]));
            } else if (tok[0] == "f") {
                std::vector<int> poly;
                for (std::size_t i = 1; i < tok.size(); ++i) {
                    auto idx = tok[i].substr(0, tok[i].find('/'));
                    long long k = parse_int(idx);
                    if (k < 0) {
                        k = static_cast<long long>(verts.size()) + k + 1;
                    }
                    poly.push_back(static_cast<int>(k - 1));
                }
                if (poly.size() < 3) {
                    throw FormatError("face needs at least 3 vertices");
                }
                fan(tris, poly);
            }
        } catch (const FormatError& e) {
            throw FormatError(source + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    try {
        return make_mesh(std::move(verts), std::move(tris));
    } catch (const FormatError& e) {
        throw FormatError(source + ": " + e.what());
    }
}

TriMesh parse_off(std::string_view text, const std::string& source)
{
    std::vector<std::string_view> tokens;
    for (auto raw : split(text, '\n')) {
        auto line = trim(raw);
        auto hash = line.find('#');
        if (hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        for (auto t : split_ws(line)) {
            tokens.push_back(t);
        }
    }
    std::size_t pos = 0;
    auto next = [&]() -> std::string_view {
        if (pos >= tokens.size()) {
            throw FormatError(source + ": unexpected end of OFF data");
        }
        return tokens[pos++];
    };
    if (next() != "OFF") {
        throw FormatError(source + ": missing OFF header");
    }
    const auto nv = parse_int(next());
    const auto nf = parse_int(next());
    next();  // edge count, unused
    std::vector<Vec3> verts;
    for (long long i = 0; i < nv; ++i) {
        double x = parse_double(next());
        double y = parse_double(next());
        double z = parse_double(next());
        verts.emplace_back(x, y, z);
    }
    std::vector<Triangle> tris;
    for (long long f = 0; f < nf; ++f) {
        const auto k = parse_int(next());
        std::vector<int> poly;
        for (long long i = 0; i < k; ++i) {
            poly.push_back(static_cast<int>(parse_int(next())));
        }
        if (poly.size() < 3) {
            throw FormatError(source + ": face " + std::to_string(f) + " has fewer than 3 vertices");
        }
        fan(tris, poly);
    }
    try {
        return make_mesh(std::move(verts), std::move(tris));
    } catch (const FormatError& e) {
        throw FormatError(source + ": " + e.what());
    }
}

TriMesh load_mesh(const std::filesystem::path& path)
{
    auto text = read_file(path);
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".off") {
        return parse_off(text, path.string());
    }
    return parse_obj(text, path.string());
}

std::string to_obj(const TriMesh& mesh, std::string_view comment)
{
    std::ostringstream os;
    if (!comment.empty()) {
        os << "# " << comment << "\n";
    }
    for (const auto& v : mesh.vertices) {
        os << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z())
           << "\n";
    }
    for (const auto& t : mesh.triangles) {
        os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << "\n";
    }
    return os.str();
}

std::vector<Vec3> transform_points(std::span<const Vec3> pts, const Pose& pose)
{
    std::vector<Vec3> out;
    out.reserve(pts.size());
    const Mat3 r = pose.rotation_matrix();
    for (const auto& p : pts) {
        out.push_back(r * p + pose.translation());
    }
    return out;
}

}  // namespace anyplace
