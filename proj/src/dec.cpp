// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/dec.hpp"

#include "surfflow/surface.hpp"

#include <vector>

namespace surfflow {

int primal_cell_count(const TriangleMesh& mesh, int degree)
{
    switch (degree) {
    case 0: return mesh.num_vertices();
    case 1: return mesh.num_edges();
    default: return mesh.num_faces();
    }
}

Dec::Dec(const TriangleMesh& mesh)
    : mesh_(&mesh)
{
    const int nv = mesh.num_vertices();
    const int ne = mesh.num_edges();
    const int nf = mesh.num_faces();

    std::vector<Eigen::Triplet<double>> t0;
    t0.reserve(2 * ne);
    for (int e = 0; e < ne; ++e) {
        t0.emplace_back(e, mesh.edges()[e][0], -1.0);
        t0.emplace_back(e, mesh.edges()[e][1], 1.0);
    }
    d0_.resize(ne, nv);
    d0_.setFromTriplets(t0.begin(), t0.end());

    std::vector<Eigen::Triplet<double>> t1;
    t1.reserve(3 * nf);
    for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) t1.emplace_back(f, mesh.face_edge(f, k), mesh.face_edge_sign(f, k));
    }
    d1_.resize(nf, ne);
    d1_.setFromTriplets(t1.begin(), t1.end());

    star0_ = mesh.vertex_areas();
    star1_ = mesh.cotan_weights();
    star2_.resize(nf);
    for (int f = 0; f < nf; ++f) star2_[f] = 1.0 / mesh.face_area(f);

    const double cutoff = 1e-12 * star1_.cwiseAbs().maxCoeff();
    for (double& w : star1_) {
        if (std::abs(w) <= cutoff) w = 0.0;
    }
    star1_inv_ = star1_.unaryExpr([cutoff](double w) { return std::abs(w) > cutoff ? 1.0 / w : 0.0; });

    stiffness_ = SparseMatrix(d0_.transpose() * star1_.asDiagonal() * d0_);
}

Cochain1 Dec::d(const Cochain0& f) const { return {d0_ * f.values}; }
Cochain2 Dec::d(const Cochain1& a) const { return {d1_ * a.values}; }

Cochain<2, Grid::dual> Dec::star(const Cochain0& c) const { return {c.values.cwiseProduct(star0_)}; }
Cochain<1, Grid::dual> Dec::star(const Cochain1& c) const { return {c.values.cwiseProduct(star1_)}; }
Cochain<0, Grid::dual> Dec::star(const Cochain2& c) const { return {c.values.cwiseProduct(star2_)}; }
Cochain2 Dec::star(const Cochain<0, Grid::dual>& c) const { return {c.values.cwiseQuotient(star2_)}; }
Cochain1 Dec::star(const Cochain<1, Grid::dual>& c) const { return {-c.values.cwiseProduct(star1_inv_)}; }
Cochain0 Dec::star(const Cochain<2, Grid::dual>& c) const { return {c.values.cwiseQuotient(star0_)}; }

Cochain0 Dec::codifferential(const Cochain1& a) const
{
    return {(d0_.transpose() * a.values.cwiseProduct(star1_)).cwiseQuotient(star0_)};
}

Cochain1 Dec::codifferential(const Cochain2& b) const
{
    return {(d1_.transpose() * b.values.cwiseProduct(star2_)).cwiseProduct(star1_inv_)};
}

Cochain0 Dec::laplace_beltrami(const Cochain0& f) const { return codifferential(d(f)); }

Cochain1 Dec::hodge_laplacian_1(const Cochain1& a) const
{
    return {d(codifferential(a)).values + codifferential(d(a)).values};
}

double Dec::inner(const Cochain0& a, const Cochain0& b) const { return a.values.dot(star0_.cwiseProduct(b.values)); }
double Dec::inner(const Cochain1& a, const Cochain1& b) const { return a.values.dot(star1_.cwiseProduct(b.values)); }
double Dec::inner(const Cochain2& a, const Cochain2& b) const { return a.values.dot(star2_.cwiseProduct(b.values)); }

TangentField Dec::sharp(const Cochain1& a) const
{
    const TriangleMesh& m = *mesh_;
    TangentField out{Eigen::MatrixX2d::Zero(m.num_faces(), 2)};
    for (int f = 0; f < m.num_faces(); ++f) {
        const auto& p = m.face_layout(f);
        const double two_area = 2.0 * m.face_area(f);
        std::array<Eigen::Vector2d, 3> grad;
        for (int i = 0; i < 3; ++i) {
            const Eigen::Vector2d opp = p[(i + 2) % 3] - p[(i + 1) % 3];
            grad[i] = Eigen::Vector2d(-opp.y(), opp.x()) / two_area;
        }
        Eigen::Vector2d g = Eigen::Vector2d::Zero();
        for (int k = 0; k < 3; ++k) {
            const double value = m.face_edge_sign(f, k) * a.values[m.face_edge(f, k)];
            g += value * (grad[(k + 2) % 3] - grad[(k + 1) % 3]) / 3.0;
        }
        out.vectors.row(f) = g.transpose();
    }
    return out;
}

Cochain1 Dec::flat(const TangentField& t) const
{
    const TriangleMesh& m = *mesh_;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(m.num_edges());
    for (int f = 0; f < m.num_faces(); ++f) {
        const auto& p = m.face_layout(f);
        const Eigen::Vector2d v = t.vectors.row(f).transpose();
        for (int k = 0; k < 3; ++k) {
            const Eigen::Vector2d edge = p[(k + 2) % 3] - p[(k + 1) % 3];
            sum[m.face_edge(f, k)] += 0.5 * m.face_edge_sign(f, k) * v.dot(edge);
        }
    }
    return {sum};
}

Eigen::VectorXd Dec::face_to_vertex(const Eigen::VectorXd& face_values) const
{
    return surfflow::face_to_vertex(*mesh_, face_values);
}

Cochain0 Dec::scalar_curl(const Cochain1& a) const
{
    return {face_to_vertex((d1_ * a.values).cwiseProduct(star2_))};
}

double Dec::mean(const Cochain0& f) const { return f.values.dot(star0_) / star0_.sum(); }

TangentField rotate_J(const TangentField& t)
{
    TangentField out{Eigen::MatrixX2d(t.vectors.rows(), 2)};
    out.vectors.col(0) = -t.vectors.col(1);
    out.vectors.col(1) = t.vectors.col(0);
    return out;
}

} // namespace surfflow
