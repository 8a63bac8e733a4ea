// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "surfflow/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace surfflow {

/// A point on the mesh: face id plus barycentric coordinates of its corners.
struct SurfacePoint {
    int face = 0;
    Eigen::Vector3d bary = Eigen::Vector3d(1.0, 0.0, 0.0);
};

/// Vertex v as a point of its first incident face.
SurfacePoint vertex_point(const TriangleMesh& mesh, int v);

/// Point coordinates used for location and distances: chart (x, y, 0) wrapped
/// to [0,1)^2 on the flat torus, the point on the flat face in R^3 otherwise.
Eigen::Vector3d point_coordinates(const TriangleMesh& mesh, const SurfacePoint& p);
Eigen::Vector3d vertex_coordinates(const TriangleMesh& mesh, int v);

/// Distance on the surface model: periodic flat distance on the torus, great
/// circle distance of the radial projections on the unit sphere, chord length
/// on polyhedral meshes.
double surface_distance(const TriangleMesh& mesh, const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// b - a as a short vector (periodic wrap on the torus).
Eigen::Vector3d coordinate_difference(const TriangleMesh& mesh, const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// Isometric embedding used for vector-valued constructions: the Clifford torus
/// in R^4 for the flat torus, R^3 otherwise.
int embedding_dimension(const TriangleMesh& mesh);
/// Embedding of a point given in point coordinates (sphere points are projected radially).
Eigen::VectorXd embed(const TriangleMesh& mesh, const Eigen::Vector3d& coordinates);
/// Pushes a tangent vector given in point coordinates at `coordinates` into the embedding.
Eigen::VectorXd embed_vector(const TriangleMesh& mesh, const Eigen::Vector3d& coordinates, const Eigen::Vector3d& v);

Eigen::Vector2d rotate(const Eigen::Vector2d& v, double angle);

struct WalkResult {
    SurfacePoint end;
    /// Angle taking the start face frame to the end face frame along the path.
    double rotation = 0.0;
    int crossings = 0;
};

/// Moves p along the straight line (in the unfolded faces) with the given
/// displacement, expressed in the frame of p's face. Crossing an edge unfolds
/// the neighbour face about the shared edge.
WalkResult walk(const TriangleMesh& mesh, const SurfacePoint& p, const Eigen::Vector2d& displacement);

/// Uniform-grid lookup of the triangle containing a point. Triangles are given
/// by corner coordinates in the convention of point_coordinates (torus corners
/// unwrapped). Sphere queries use the radial projection, polyhedral queries
/// the closest point.
class TriangleLocator {
public:
    struct Hit {
        int triangle = -1;
        /// Clamped and renormalized barycentric coordinates.
        Eigen::Vector3d bary = Eigen::Vector3d(1.0, 0.0, 0.0);
        /// Smallest raw barycentric coordinate; negative when the point is outside.
        double inside = -1.0;
    };

    TriangleLocator(SurfaceModel model, std::vector<std::array<Eigen::Vector3d, 3>> triangles);

    Hit locate(const Eigen::Vector3d& p) const;
    int size() const { return static_cast<int>(triangles_.size()); }

private:
    Hit test(int t, const Eigen::Vector3d& p) const;
    Hit scan(const std::vector<int>& candidates, const Eigen::Vector3d& p, bool& any) const;
    long cell_index(const Eigen::Vector3i& c) const;

    SurfaceModel model_;
    std::vector<std::array<Eigen::Vector3d, 3>> triangles_;
    Eigen::Vector3d origin_ = Eigen::Vector3d::Zero();
    double cell_ = 1.0;
    Eigen::Vector3i cells_ = Eigen::Vector3i::Ones();
    std::vector<std::vector<int>> grid_;
};

/// Resampling of vertex values at surface points: barycentric, or a cubic
/// Bezier triangle built from vertex values and vertex gradients. Gradients
/// come from a quadratic least-squares fit on the 1-ring (2-ring below valence 6).
class VertexInterpolator {
public:
    explicit VertexInterpolator(const TriangleMesh& mesh);

    const TriangleMesh& mesh() const { return *mesh_; }
    /// Tangent vectors in point coordinates (V x 3).
    Eigen::MatrixXd gradients(const Eigen::VectorXd& values) const;
    double linear(const Eigen::VectorXd& values, const SurfacePoint& p) const;
    double cubic(const Eigen::VectorXd& values, const Eigen::MatrixXd& gradients, const SurfacePoint& p) const;
    /// Columns of the face frame in point coordinates (3 x 2).
    const Eigen::MatrixXd& frame(int f) const { return frames_[f]; }

private:
    const TriangleMesh* mesh_;
    std::vector<Eigen::MatrixXd> frames_;
    std::vector<Eigen::MatrixXd> fit_;
    std::vector<std::vector<int>> ring_;
};

/// Locator over the faces of the mesh itself.
TriangleLocator face_locator(const TriangleMesh& mesh);
SurfacePoint locate_point(const TriangleLocator& faces, const Eigen::Vector3d& p);

} // namespace surfflow
