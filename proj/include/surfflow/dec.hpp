// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "surfflow/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>

namespace surfflow {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class Grid { primal, dual };

/// Discrete k-form. Primal k-cochains live on vertices / edges / faces; dual
/// k-cochains live on the dual cells of faces / edges / vertices respectively.
template <int Degree, Grid Where = Grid::primal>
struct Cochain {
    static_assert(Degree >= 0 && Degree <= 2);
    static constexpr int degree = Degree;
    static constexpr Grid grid = Where;
    Eigen::VectorXd values;
};

using Cochain0 = Cochain<0>;
using Cochain1 = Cochain<1>;
using Cochain2 = Cochain<2>;

/// Number of cells carrying a primal k-cochain.
int primal_cell_count(const TriangleMesh& mesh, int degree);

/// Per-face tangent vectors in the face frame of TriangleMesh::face_layout.
struct TangentField {
    Eigen::MatrixX2d vectors;
};

/// Discrete exterior calculus on a TriangleMesh.
///
/// Conventions: d* is the mass adjoint of d; on 1-forms that equals -*d*
/// with ** = (-1)^{k(2-k)}. Laplacians are positive semidefinite
/// (Delta_0 = d*d, Delta_1 = dd* + d*d). Diagonal Hodge stars are circumcentric;
/// edges with a vanishing cotangent weight (right triangles on grids) have a
/// zero *1 entry whose inverse is taken as zero.
class Dec {
public:
    explicit Dec(const TriangleMesh& mesh);

    const TriangleMesh& mesh() const { return *mesh_; }
    const SparseMatrix& d0() const { return d0_; }
    const SparseMatrix& d1() const { return d1_; }
    /// Cotangent stiffness d0^T *1 d0.
    const SparseMatrix& stiffness() const { return stiffness_; }
    const Eigen::VectorXd& star0() const { return star0_; }
    const Eigen::VectorXd& star1() const { return star1_; }
    const Eigen::VectorXd& star2() const { return star2_; }
    const Eigen::VectorXd& star1_inverse() const { return star1_inv_; }

    Cochain1 d(const Cochain0& f) const;
    Cochain2 d(const Cochain1& a) const;

    Cochain<2, Grid::dual> star(const Cochain0& c) const;
    Cochain<1, Grid::dual> star(const Cochain1& c) const;
    Cochain<0, Grid::dual> star(const Cochain2& c) const;
    Cochain2 star(const Cochain<0, Grid::dual>& c) const;
    Cochain1 star(const Cochain<1, Grid::dual>& c) const;
    Cochain0 star(const Cochain<2, Grid::dual>& c) const;

    Cochain0 codifferential(const Cochain1& a) const;
    Cochain1 codifferential(const Cochain2& b) const;

    Cochain0 laplace_beltrami(const Cochain0& f) const;
    Cochain1 hodge_laplacian_1(const Cochain1& a) const;

    double inner(const Cochain0& a, const Cochain0& b) const;
    double inner(const Cochain1& a, const Cochain1& b) const;
    double inner(const Cochain2& a, const Cochain2& b) const;
    double norm(const Cochain0& a) const { return std::sqrt(inner(a, a)); }
    double norm(const Cochain1& a) const { return std::sqrt(inner(a, a)); }

    /// Whitney interpolation of a 1-cochain, averaged over each face.
    TangentField sharp(const Cochain1& a) const;
    /// Edge integral of the per-face vector, averaged over the two faces of the edge.
    Cochain1 flat(const TangentField& t) const;

    /// Area-weighted average of face values onto vertices; preserves the integral.
    Eigen::VectorXd face_to_vertex(const Eigen::VectorXd& face_values) const;
    /// Curl *d of a 1-form: *2 d1 on faces, transferred to vertices.
    Cochain0 scalar_curl(const Cochain1& a) const;

    /// Mean value with respect to the vertex mass.
    double mean(const Cochain0& f) const;

private:
    const TriangleMesh* mesh_;
    SparseMatrix d0_;
    SparseMatrix d1_;
    SparseMatrix stiffness_;
    Eigen::VectorXd star0_;
    Eigen::VectorXd star1_;
    Eigen::VectorXd star2_;
    Eigen::VectorXd star1_inv_;
};

/// +90 degree rotation in every face frame (outward orientation).
TangentField rotate_J(const TangentField& t);

} // namespace surfflow
