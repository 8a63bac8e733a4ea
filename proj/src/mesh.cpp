// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace surfflow {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

struct HalfEdgeRef {
    int face;
    int corner_from; // face traverses corners[corner_from] -> corners[corner_from + 1]
};

/// Flips faces so that every edge is traversed once in each direction.
void orient_faces(std::vector<std::array<int, 3>>& faces, int num_vertices)
{
    if (faces.empty()) throw MeshError("mesh has no faces");
    for (const auto& f : faces) {
        for (int v : f) {
            if (v < 0 || v >= num_vertices) throw MeshError("face references missing vertex");
        }
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) throw MeshError("face with repeated vertex");
    }

    std::map<EdgeKey, std::vector<HalfEdgeRef>> incidence;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
        for (int k = 0; k < 3; ++k) {
            incidence[key(faces[f][k], faces[f][(k + 1) % 3])].push_back({f, k});
        }
    }
    for (const auto& [edge, refs] : incidence) {
        if (refs.size() == 1) {
            throw MeshError("mesh is not closed: boundary edge (" + std::to_string(edge.first) + ", " +
                            std::to_string(edge.second) + ")");
        }
        if (refs.size() > 2) {
            throw MeshError("non-manifold edge (" + std::to_string(edge.first) + ", " +
                            std::to_string(edge.second) + ")");
        }
    }

    const int nf = static_cast<int>(faces.size());
    std::vector<int> flip(nf, -1); // -1 unvisited, 0 keep, 1 flip
    auto directed_from = [&](int f, int k, bool flipped) {
        // Start vertex of the traversal of local edge (k, k+1) after an optional flip.
        return flipped ? faces[f][(k + 1) % 3] : faces[f][k];
    };

    std::deque<int> queue{0};
    flip[0] = 0;
    int visited = 1;
    while (!queue.empty()) {
        const int f = queue.front();
        queue.pop_front();
        for (int k = 0; k < 3; ++k) {
            const auto& refs = incidence[key(faces[f][k], faces[f][(k + 1) % 3])];
            const HalfEdgeRef other = refs[0].face == f && refs[0].corner_from == k ? refs[1] : refs[0];
            const int start_here = directed_from(f, k, flip[f] == 1);
            // The neighbour must traverse the shared edge starting at the other vertex.
            const bool needs_flip = faces[other.face][other.corner_from] == start_here;
            if (flip[other.face] == -1) {
                flip[other.face] = needs_flip ? 1 : 0;
                ++visited;
                queue.push_back(other.face);
            } else if ((flip[other.face] == 1) != needs_flip) {
                throw MeshError("inconsistent orientation not repairable by face flips (non-orientable surface)");
            }
        }
    }
    if (visited != nf) throw MeshError("mesh is not connected");
    for (int f = 0; f < nf; ++f) {
        if (flip[f] == 1) std::swap(faces[f][1], faces[f][2]);
    }
}

} // namespace

TriangleMesh::TriangleMesh(Eigen::MatrixXd positions, std::vector<std::array<int, 3>> faces, SurfaceModel model)
    : model_(model)
    , positions_(std::move(positions))
    , faces_(std::move(faces))
{
    orient_faces(faces_, num_vertices());
    build_topology();
    std::vector<double> lengths(edges_.size());
    for (size_t e = 0; e < edges_.size(); ++e) {
        lengths[e] = (positions_.row(edges_[e][1]) - positions_.row(edges_[e][0])).norm();
    }
    build_geometry(lengths);
}

TriangleMesh TriangleMesh::flat_torus(Eigen::MatrixX2d chart, std::vector<std::array<int, 3>> faces)
{
    TriangleMesh mesh;
    mesh.model_ = SurfaceModel::flat_torus;
    const double r = 1.0 / (2.0 * std::numbers::pi);
    mesh.positions_.resize(chart.rows(), 4);
    for (Eigen::Index v = 0; v < chart.rows(); ++v) {
        const double a = 2.0 * std::numbers::pi * chart(v, 0);
        const double b = 2.0 * std::numbers::pi * chart(v, 1);
        mesh.positions_.row(v) << r * std::cos(a), r * std::sin(a), r * std::cos(b), r * std::sin(b);
    }
    mesh.faces_ = std::move(faces);
    mesh.chart_ = std::move(chart);
    orient_faces(mesh.faces_, mesh.num_vertices());
    mesh.build_topology();
    std::vector<double> lengths(mesh.edges_.size());
    for (size_t e = 0; e < mesh.edges_.size(); ++e) {
        Eigen::Vector2d d = mesh.chart_->row(mesh.edges_[e][1]) - mesh.chart_->row(mesh.edges_[e][0]);
        d = d.array() - d.array().round();
        lengths[e] = d.norm();
    }
    mesh.build_geometry(lengths);
    return mesh;
}

void TriangleMesh::build_topology()
{
    std::map<EdgeKey, int> index;
    face_edges_.resize(faces_.size());
    face_edge_signs_.resize(faces_.size());
    for (int f = 0; f < num_faces(); ++f) {
        for (int k = 0; k < 3; ++k) {
            const int a = faces_[f][(k + 1) % 3];
            const int b = faces_[f][(k + 2) % 3];
            auto [it, inserted] = index.try_emplace(key(a, b), static_cast<int>(edges_.size()));
            if (inserted) {
                edges_.push_back({std::min(a, b), std::max(a, b)});
                edge_faces_.push_back({-1, -1});
            }
            const int e = it->second;
            face_edges_[f][k] = e;
            face_edge_signs_[f][k] = a < b ? 1 : -1;
            edge_faces_[e][a < b ? 0 : 1] = f;
        }
    }

    std::vector<std::vector<std::array<int, 2>>> incident(num_vertices());
    for (int f = 0; f < num_faces(); ++f) {
        for (int k = 0; k < 3; ++k) incident[faces_[f][k]].push_back({f, k});
    }
    vertex_corners_.assign(num_vertices(), {});
    for (int v = 0; v < num_vertices(); ++v) {
        if (incident[v].empty()) throw MeshError("unreferenced vertex " + std::to_string(v));
        std::array<int, 2> c = incident[v].front();
        do {
            vertex_corners_[v].push_back(c);
            const int g = face_neighbor(c[0], (c[1] + 1) % 3);
            const auto& gf = faces_[g];
            const int k = gf[0] == v ? 0 : (gf[1] == v ? 1 : 2);
            c = {g, k};
            if (vertex_corners_[v].size() > incident[v].size()) break;
        } while (c != incident[v].front());
        if (vertex_corners_[v].size() != incident[v].size()) {
            throw MeshError("non-manifold vertex " + std::to_string(v));
        }
    }
}

void TriangleMesh::build_geometry(const std::vector<double>& lengths)
{
    edge_lengths_ = lengths;
    const int nf = num_faces();
    face_areas_.resize(nf);
    corner_angles_.resize(nf);
    corner_areas_.resize(nf);
    layouts_.resize(nf);
    vertex_areas_ = Eigen::VectorXd::Zero(num_vertices());
    cotan_weights_ = Eigen::VectorXd::Zero(num_edges());
    total_area_ = 0.0;

    for (int f = 0; f < nf; ++f) {
        std::array<double, 3> l{};
        for (int k = 0; k < 3; ++k) l[k] = edge_lengths_[face_edges_[f][k]];
        // Corner 0 at the origin, corner 1 at distance l[2], corner 2 at distance l[1].
        const double x = (l[2] * l[2] + l[1] * l[1] - l[0] * l[0]) / (2.0 * l[2]);
        const double y2 = l[1] * l[1] - x * x;
        if (!(y2 > 0.0)) throw MeshError("degenerate triangle (zero area) at face " + std::to_string(f));
        const double y = std::sqrt(y2);
        layouts_[f] = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(l[2], 0.0), Eigen::Vector2d(x, y)};
        const double area = 0.5 * l[2] * y;
        face_areas_[f] = area;
        total_area_ += area;

        std::array<double, 3> cot{};
        for (int k = 0; k < 3; ++k) {
            const Eigen::Vector2d a = layouts_[f][(k + 1) % 3] - layouts_[f][k];
            const Eigen::Vector2d b = layouts_[f][(k + 2) % 3] - layouts_[f][k];
            const double cross = a.x() * b.y() - a.y() * b.x();
            corner_angles_[f][k] = std::atan2(cross, a.dot(b));
            cot[k] = a.dot(b) / cross;
            cotan_weights_[face_edges_[f][k]] += 0.5 * cot[k];
        }

        const auto obtuse = std::find_if(corner_angles_[f].begin(), corner_angles_[f].end(),
                                         [](double a) { return a > 0.5 * std::numbers::pi; });
        for (int k = 0; k < 3; ++k) {
            const int v = faces_[f][k];
            if (obtuse != corner_angles_[f].end()) {
                const bool is_obtuse = (obtuse - corner_angles_[f].begin()) == k;
                corner_areas_[f][k] = is_obtuse ? area / 2.0 : area / 4.0;
            } else {
                // Voronoi share: edges k-(k+1) and k-(k+2) are opposite corners k+2 and k+1.
                const double lk1 = l[(k + 2) % 3];
                const double lk2 = l[(k + 1) % 3];
                corner_areas_[f][k] = (lk1 * lk1 * cot[(k + 2) % 3] + lk2 * lk2 * cot[(k + 1) % 3]) / 8.0;
            }
            vertex_areas_[v] += corner_areas_[f][k];
        }
    }
    mean_edge_length_ = 0.0;
    for (double len : edge_lengths_) mean_edge_length_ += len;
    mean_edge_length_ /= static_cast<double>(edge_lengths_.size());
}

int TriangleMesh::face_neighbor(int f, int k) const
{
    const auto& ef = edge_faces_[face_edges_[f][k]];
    return ef[0] == f ? ef[1] : ef[0];
}

std::array<Eigen::Vector2d, 3> TriangleMesh::unwrapped_chart(int f) const
{
    std::array<Eigen::Vector2d, 3> uv;
    uv[0] = chart_->row(faces_[f][0]).transpose();
    for (int k = 1; k < 3; ++k) {
        Eigen::Vector2d d = chart_->row(faces_[f][k]).transpose() - uv[0];
        d = d.array() - d.array().round();
        uv[k] = uv[0] + d;
    }
    return uv;
}

std::string TriangleMesh::report() const
{
    double min_angle = std::numbers::pi;
    double max_angle = 0.0;
    for (const auto& a : corner_angles_) {
        min_angle = std::min({min_angle, a[0], a[1], a[2]});
        max_angle = std::max({max_angle, a[0], a[1], a[2]});
    }
    std::ostringstream out;
    out << "vertices " << num_vertices() << "\n"
        << "edges " << num_edges() << "\n"
        << "faces " << num_faces() << "\n"
        << "euler_characteristic " << euler_characteristic() << "\n"
        << "genus " << genus() << "\n"
        << "total_area " << total_area_ << "\n"
        << "mean_edge_length " << mean_edge_length_ << "\n"
        << "min_angle_deg " << min_angle * 180.0 / std::numbers::pi << "\n"
        << "max_angle_deg " << max_angle * 180.0 / std::numbers::pi << "\n"
        << "closed yes\noriented yes\n";
    return out.str();
}

namespace {

std::string strip_comment(const std::string& line)
{
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

TriangleMesh read_off(std::istream& in)
{
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(strip_comment(line));
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
    }
    size_t pos = 0;
    auto next = [&]() -> const std::string& {
        if (pos >= tokens.size()) throw MeshError("OFF: unexpected end of file");
        return tokens[pos++];
    };
    if (next() != "OFF") throw MeshError("OFF: missing header");
    const int nv = std::stoi(next());
    const int nf = std::stoi(next());
    next(); // edge count, unused
    Eigen::MatrixXd positions(nv, 3);
    for (int v = 0; v < nv; ++v) {
        for (int c = 0; c < 3; ++c) positions(v, c) = std::stod(next());
    }
    std::vector<std::array<int, 3>> faces(nf);
    for (int f = 0; f < nf; ++f) {
        if (std::stoi(next()) != 3) throw MeshError("OFF: non-triangular face " + std::to_string(f));
        for (int c = 0; c < 3; ++c) faces[f][c] = std::stoi(next());
    }
    return TriangleMesh(std::move(positions), std::move(faces));
}

TriangleMesh read_obj(std::istream& in)
{
    std::vector<Eigen::Vector3d> verts;
    std::vector<std::array<int, 3>> faces;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(strip_comment(line));
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Eigen::Vector3d p;
            if (!(ls >> p.x() >> p.y() >> p.z())) throw MeshError("OBJ: bad vertex at line " + std::to_string(lineno));
            verts.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                int i = std::stoi(tok.substr(0, tok.find('/')));
                i = i < 0 ? static_cast<int>(verts.size()) + i : i - 1;
                idx.push_back(i);
            }
            if (idx.size() != 3) throw MeshError("OBJ: non-triangular face at line " + std::to_string(lineno));
            faces.push_back({idx[0], idx[1], idx[2]});
        }
    }
    Eigen::MatrixXd positions(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t v = 0; v < verts.size(); ++v) positions.row(static_cast<Eigen::Index>(v)) = verts[v].transpose();
    return TriangleMesh(std::move(positions), std::move(faces));
}

} // namespace

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format)
{
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file " + path.string());
    return format == MeshFormat::off ? read_off(in) : read_obj(in);
}

TriangleMesh load_mesh(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".off") return load_mesh(path, MeshFormat::off);
    if (ext == ".obj") return load_mesh(path, MeshFormat::obj);
    throw MeshError("unknown mesh extension '" + ext + "'");
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    out.precision(17);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        out << "v";
        for (int c = 0; c < 3; ++c) out << ' ' << (c < mesh.ambient_dim() ? mesh.positions()(v, c) : 0.0);
        out << '\n';
    }
    for (const auto& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

TriangleMesh make_flat_torus(int n)
{
    if (n < 4 || (n & (n - 1)) != 0) throw MeshError("flat_torus: n must be a power of two >= 4");
    Eigen::MatrixX2d chart(n * n, 2);
    auto id = [n](int i, int j) { return ((i + n) % n) + n * ((j + n) % n); };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) chart.row(id(i, j)) << static_cast<double>(i) / n, static_cast<double>(j) / n;
    }
    std::vector<std::array<int, 3>> faces;
    faces.reserve(2 * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return TriangleMesh::flat_torus(std::move(chart), std::move(faces));
}

TriangleMesh make_icosphere(int level)
{
    if (level < 0 || level > 7) throw MeshError("icosphere: level must be in [0, 7]");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> verts = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : verts) v.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
        {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<EdgeKey, int> midpoint;
        auto mid = [&](int a, int b) {
            auto [it, inserted] = midpoint.try_emplace(key(a, b), static_cast<int>(verts.size()));
            if (inserted) verts.push_back((verts[a] + verts[b]).normalized());
            return it->second;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int a = mid(f[0], f[1]);
            const int b = mid(f[1], f[2]);
            const int c = mid(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        faces = std::move(next);
    }
    Eigen::MatrixXd positions(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t v = 0; v < verts.size(); ++v) positions.row(static_cast<Eigen::Index>(v)) = verts[v].transpose();
    return TriangleMesh(std::move(positions), std::move(faces), SurfaceModel::unit_sphere);
}

} // namespace surfflow
