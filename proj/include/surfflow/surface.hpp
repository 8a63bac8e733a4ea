// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "surfflow/dec.hpp"

#include <array>
#include <vector>

namespace surfflow {

/// Coordinates in which tangent vectors are compared and points are moved:
/// the [0,1)^2 chart for the flat torus (dimension 2), R^3 positions otherwise.
int ambient_dimension(const TriangleMesh& mesh);
Eigen::MatrixXd ambient_positions(const TriangleMesh& mesh);

/// Columns are the ambient images of the face-frame axes e1, e2.
Eigen::MatrixXd face_frame(const TriangleMesh& mesh, int f);

/// Per-face vectors in ambient coordinates (F x ambient_dimension).
Eigen::MatrixXd to_ambient(const TriangleMesh& mesh, const TangentField& field);
/// Per-face projection of ambient vectors onto the face frames.
TangentField from_ambient(const TriangleMesh& mesh, const Eigen::MatrixXd& vectors);

/// Unit normal per vertex (mass-weighted face normals); zero rows for the torus chart.
Eigen::MatrixXd vertex_normals(const TriangleMesh& mesh);
/// Projector onto the tangent plane at each vertex, in ambient coordinates.
Eigen::MatrixXd tangent_projector(const TriangleMesh& mesh, int v);

/// Mass-weighted average of face vectors at each vertex, projected to the vertex
/// tangent plane (V x ambient_dimension).
Eigen::MatrixXd vertex_vectors(const TriangleMesh& mesh, const TangentField& field);

/// Vertex values of a scalar per face, averaged with the corner areas.
Eigen::VectorXd face_to_vertex(const TriangleMesh& mesh, const Eigen::VectorXd& face_values);

} // namespace surfflow
