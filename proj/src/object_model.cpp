#include "anyplace/object_model.hpp"

namespace anyplace {

ObjectModelPtr make_object_model(TriMesh mesh, std::string name, std::filesystem::path source)
{
    auto m = std::make_shared<ObjectModel>();
    m->name = std::move(name);
    m->source = std::move(source);
    m->hull = convex_hull(mesh.vertices);
    m->stable = stable_poses(m->hull, mesh.centroid);
    m->descriptor.extents = m->hull.bbox_max - m->hull.bbox_min;
    m->descriptor.volume = m->hull.volume;
    m->descriptor.centroid_offset = mesh.centroid - 0.5 * (m->hull.bbox_max + m->hull.bbox_min);
    m->mesh = std::move(mesh);
    return m;
}

ObjectModelPtr load_object_model(const std::filesystem::path& path)
{
    return make_object_model(load_mesh(path), path.stem().string(), path);
}

}  // namespace anyplace
