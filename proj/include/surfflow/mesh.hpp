// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace surfflow {

/// Raised for any mesh that is not a closed, oriented, connected 2-manifold.
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact surface the triangulation approximates, when the generator knows it.
/// Loaded files are always `polyhedral`.
enum class SurfaceModel { polyhedral, unit_sphere, flat_torus };

/// Closed oriented triangle mesh with intrinsic metric data.
///
/// Vertices carry an embedding into R^m (m = 3, or m = 4 for the flat torus,
/// which uses the isometric Clifford embedding). All metric quantities are
/// derived from intrinsic edge lengths, so the flat torus is exactly flat even
/// though its embedding is not in R^3.
///
/// Edge e is oriented from `edges[e][0]` to `edges[e][1]` with the smaller
/// vertex index first. Face f lists its corners counter-clockwise; local edge k
/// of a face is the edge opposite corner k, i.e. from corner k+1 to corner k+2.
class TriangleMesh {
public:
    TriangleMesh(Eigen::MatrixXd positions, std::vector<std::array<int, 3>> faces,
                 SurfaceModel model = SurfaceModel::polyhedral);

    /// Flat-torus constructor: `chart` holds per-vertex coordinates in [0,1)^2;
    /// edge lengths come from the periodic flat metric.
    static TriangleMesh flat_torus(Eigen::MatrixX2d chart, std::vector<std::array<int, 3>> faces);

    int num_vertices() const { return static_cast<int>(positions_.rows()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }
    int genus() const { return (2 - euler_characteristic()) / 2; }
    int ambient_dim() const { return static_cast<int>(positions_.cols()); }

    SurfaceModel model() const { return model_; }
    const Eigen::MatrixXd& positions() const { return positions_; }
    const std::vector<std::array<int, 3>>& faces() const { return faces_; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }

    /// Local edge k of face f and whether the face traverses it along its stored orientation.
    int face_edge(int f, int k) const { return face_edges_[f][k]; }
    int face_edge_sign(int f, int k) const { return face_edge_signs_[f][k]; }
    /// Faces adjacent to edge e: [0] traverses it positively, [1] negatively.
    const std::array<int, 2>& edge_faces(int e) const { return edge_faces_[e]; }
    /// Face across local edge k of face f.
    int face_neighbor(int f, int k) const;

    double edge_length(int e) const { return edge_lengths_[e]; }
    double face_area(int f) const { return face_areas_[f]; }
    double total_area() const { return total_area_; }
    double mean_edge_length() const { return mean_edge_length_; }
    /// Interior angle at corner k of face f.
    double corner_angle(int f, int k) const { return corner_angles_[f][k]; }
    /// Share of face f's area assigned to its corner k; sums to the vertex area.
    double corner_area(int f, int k) const { return corner_areas_[f][k]; }
    /// Lumped (mixed Voronoi) vertex area.
    const Eigen::VectorXd& vertex_areas() const { return vertex_areas_; }
    /// Circumcentric dual/primal length ratio: (cot a + cot b) / 2.
    const Eigen::VectorXd& cotan_weights() const { return cotan_weights_; }

    /// Intrinsic planar layout of face f: corner 0 at the origin, corner 1 on the
    /// positive x axis, corner 2 in the upper half plane. This is the per-face frame.
    const std::array<Eigen::Vector2d, 3>& face_layout(int f) const { return layouts_[f]; }

    /// Per-vertex flat-torus chart coordinates; present only for `flat_torus`.
    const std::optional<Eigen::MatrixX2d>& chart() const { return chart_; }
    /// Chart coordinates of the corners of face f, unwrapped to be contiguous.
    std::array<Eigen::Vector2d, 3> unwrapped_chart(int f) const;

    /// Faces around vertex v in counter-clockwise order, as (face, local corner).
    const std::vector<std::array<int, 2>>& vertex_corners(int v) const { return vertex_corners_[v]; }

    /// Plain-text validity report (counts, genus, area, angle extremes).
    std::string report() const;

private:
    TriangleMesh() = default;
    void build_topology();
    void build_geometry(const std::vector<double>& lengths);

    SurfaceModel model_ = SurfaceModel::polyhedral;
    Eigen::MatrixXd positions_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 3>> face_edges_;
    std::vector<std::array<int, 3>> face_edge_signs_;
    std::vector<std::array<int, 2>> edge_faces_;
    std::vector<std::vector<std::array<int, 2>>> vertex_corners_;
    std::optional<Eigen::MatrixX2d> chart_;

    std::vector<double> edge_lengths_;
    std::vector<double> face_areas_;
    std::vector<std::array<double, 3>> corner_angles_;
    std::vector<std::array<double, 3>> corner_areas_;
    std::vector<std::array<Eigen::Vector2d, 3>> layouts_;
    Eigen::VectorXd vertex_areas_;
    Eigen::VectorXd cotan_weights_;
    double total_area_ = 0.0;
    double mean_edge_length_ = 0.0;
};

enum class MeshFormat { off, obj };

/// Reads an ASCII OFF or OBJ triangle mesh. Faces are re-oriented by flips when
/// that yields a consistent orientation; otherwise a MeshError is thrown.
TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriangleMesh load_mesh(const std::filesystem::path& path);

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

/// n x n vertex grid on [0,1)^2, each cell split along its (i,j)-(i+1,j+1) diagonal.
TriangleMesh make_flat_torus(int n);
/// Subdivided icosahedron projected to the unit sphere; level <= 7.
TriangleMesh make_icosphere(int level);

} // namespace surfflow
