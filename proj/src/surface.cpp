// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/surface.hpp"

#include <Eigen/Geometry>

namespace surfflow {

int ambient_dimension(const TriangleMesh& mesh) { return mesh.model() == SurfaceModel::flat_torus ? 2 : 3; }

Eigen::MatrixXd ambient_positions(const TriangleMesh& mesh)
{
    if (mesh.model() == SurfaceModel::flat_torus) return *mesh.chart();
    return mesh.positions();
}

Eigen::MatrixXd face_frame(const TriangleMesh& mesh, int f)
{
    if (mesh.model() == SurfaceModel::flat_torus) {
        const auto c = mesh.unwrapped_chart(f);
        const Eigen::Vector2d e1 = (c[1] - c[0]).normalized();
        Eigen::MatrixXd frame(2, 2);
        frame.col(0) = e1;
        frame.col(1) = Eigen::Vector2d(-e1.y(), e1.x());
        return frame;
    }
    const auto& tri = mesh.faces()[f];
    const Eigen::Vector3d p0 = mesh.positions().row(tri[0]).head<3>();
    const Eigen::Vector3d p1 = mesh.positions().row(tri[1]).head<3>();
    const Eigen::Vector3d p2 = mesh.positions().row(tri[2]).head<3>();
    const Eigen::Vector3d e1 = (p1 - p0).normalized();
    const Eigen::Vector3d n = (p1 - p0).cross(p2 - p0).normalized();
    Eigen::MatrixXd frame(3, 2);
    frame.col(0) = e1;
    frame.col(1) = n.cross(e1);
    return frame;
}

Eigen::MatrixXd to_ambient(const TriangleMesh& mesh, const TangentField& field)
{
    Eigen::MatrixXd out(mesh.num_faces(), ambient_dimension(mesh));
    for (int f = 0; f < mesh.num_faces(); ++f)
        out.row(f) = (face_frame(mesh, f) * field.vectors.row(f).transpose()).transpose();
    return out;
}

TangentField from_ambient(const TriangleMesh& mesh, const Eigen::MatrixXd& vectors)
{
    TangentField out{Eigen::MatrixX2d(mesh.num_faces(), 2)};
    for (int f = 0; f < mesh.num_faces(); ++f)
        out.vectors.row(f) = (face_frame(mesh, f).transpose() * vectors.row(f).transpose()).transpose();
    return out;
}

Eigen::MatrixXd vertex_normals(const TriangleMesh& mesh)
{
    const int dim = ambient_dimension(mesh);
    Eigen::MatrixXd normals = Eigen::MatrixXd::Zero(mesh.num_vertices(), dim);
    if (dim == 2) return normals;
    if (mesh.model() == SurfaceModel::unit_sphere) {
        for (int v = 0; v < mesh.num_vertices(); ++v) normals.row(v) = mesh.positions().row(v).normalized();
        return normals;
    }
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Eigen::MatrixXd frame = face_frame(mesh, f);
        const Eigen::Vector3d n = Eigen::Vector3d(frame.col(0)).cross(Eigen::Vector3d(frame.col(1)));
        for (int k = 0; k < 3; ++k) normals.row(mesh.faces()[f][k]) += mesh.corner_area(f, k) * n.transpose();
    }
    for (int v = 0; v < mesh.num_vertices(); ++v) normals.row(v).normalize();
    return normals;
}

Eigen::MatrixXd tangent_projector(const TriangleMesh& mesh, int v)
{
    const int dim = ambient_dimension(mesh);
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(dim, dim);
    if (dim == 2) return P;
    Eigen::Vector3d n;
    if (mesh.model() == SurfaceModel::unit_sphere) {
        n = mesh.positions().row(v).head<3>().normalized();
    } else {
        n.setZero();
        for (const auto& [f, k] : mesh.vertex_corners(v)) {
            const Eigen::MatrixXd frame = face_frame(mesh, f);
            n += mesh.corner_area(f, k) * Eigen::Vector3d(frame.col(0)).cross(Eigen::Vector3d(frame.col(1)));
        }
        n.normalize();
    }
    return P - n * n.transpose();
}

Eigen::MatrixXd vertex_vectors(const TriangleMesh& mesh, const TangentField& field)
{
    const Eigen::MatrixXd face_vectors = to_ambient(mesh, field);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(mesh.num_vertices(), face_vectors.cols());
    for (int f = 0; f < mesh.num_faces(); ++f)
        for (int k = 0; k < 3; ++k) out.row(mesh.faces()[f][k]) += mesh.corner_area(f, k) * face_vectors.row(f);
    const Eigen::VectorXd& area = mesh.vertex_areas();
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        out.row(v) /= area[v];
        if (face_vectors.cols() == 3) out.row(v) = (tangent_projector(mesh, v) * out.row(v).transpose()).transpose();
    }
    return out;
}

Eigen::VectorXd face_to_vertex(const TriangleMesh& mesh, const Eigen::VectorXd& face_values)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (int f = 0; f < mesh.num_faces(); ++f)
        for (int k = 0; k < 3; ++k) out[mesh.faces()[f][k]] += mesh.corner_area(f, k) * face_values[f];
    return out.cwiseQuotient(mesh.vertex_areas());
}

} // namespace surfflow
