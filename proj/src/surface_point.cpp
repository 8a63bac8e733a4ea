// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/surface_point.hpp"

#include "surfflow/surface.hpp"

#include <Eigen/Geometry>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace surfflow {

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

Eigen::Vector3d clamp_bary(Eigen::Vector3d b)
{
    b = b.cwiseMax(0.0);
    const double s = b.sum();
    if (s <= 0.0) return Eigen::Vector3d(1.0, 0.0, 0.0);
    return b / s;
}

/// Barycentric coordinates of the point of triangle (a, b, c) closest to p,
/// following the region tests of Ericson, Real-Time Collision Detection 5.1.5.
Eigen::Vector3d closest_bary(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                             const Eigen::Vector3d& c)
{
    const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return {1, 0, 0};
    const Eigen::Vector3d bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return {0, 1, 0};
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) {
        const double v = d1 / (d1 - d3);
        return {1 - v, v, 0};
    }
    const Eigen::Vector3d cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return {0, 0, 1};
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) {
        const double w = d2 / (d2 - d6);
        return {1 - w, 0, w};
    }
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return {0, 1 - w, w};
    }
    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return {1 - v - w, v, w};
}

} // namespace

SurfacePoint vertex_point(const TriangleMesh& mesh, int v)
{
    const auto& corner = mesh.vertex_corners(v).front();
    SurfacePoint p;
    p.face = corner[0];
    p.bary.setZero();
    p.bary[corner[1]] = 1.0;
    return p;
}

Eigen::Vector3d point_coordinates(const TriangleMesh& mesh, const SurfacePoint& p)
{
    if (mesh.model() == SurfaceModel::flat_torus) {
        const auto c = mesh.unwrapped_chart(p.face);
        Eigen::Vector2d x = p.bary[0] * c[0] + p.bary[1] * c[1] + p.bary[2] * c[2];
        x = x.array() - x.array().floor();
        return {x.x() >= 1.0 ? 0.0 : x.x(), x.y() >= 1.0 ? 0.0 : x.y(), 0.0};
    }
    const auto& tri = mesh.faces()[p.face];
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    for (int k = 0; k < 3; ++k) x += p.bary[k] * mesh.positions().row(tri[k]).head<3>().transpose();
    return x;
}

Eigen::Vector3d vertex_coordinates(const TriangleMesh& mesh, int v)
{
    if (mesh.model() == SurfaceModel::flat_torus) return {(*mesh.chart())(v, 0), (*mesh.chart())(v, 1), 0.0};
    return mesh.positions().row(v).head<3>().transpose();
}

Eigen::Vector3d coordinate_difference(const TriangleMesh& mesh, const Eigen::Vector3d& a, const Eigen::Vector3d& b)
{
    Eigen::Vector3d d = b - a;
    if (mesh.model() == SurfaceModel::flat_torus) d.head<2>() = d.head<2>().array() - d.head<2>().array().round();
    return d;
}

double surface_distance(const TriangleMesh& mesh, const Eigen::Vector3d& a, const Eigen::Vector3d& b)
{
    if (mesh.model() == SurfaceModel::unit_sphere) {
        const Eigen::Vector3d u = a.normalized(), w = b.normalized();
        return std::atan2(u.cross(w).norm(), u.dot(w));
    }
    return coordinate_difference(mesh, a, b).norm();
}

int embedding_dimension(const TriangleMesh& mesh) { return mesh.model() == SurfaceModel::flat_torus ? 4 : 3; }

Eigen::VectorXd embed(const TriangleMesh& mesh, const Eigen::Vector3d& coordinates)
{
    switch (mesh.model()) {
    case SurfaceModel::flat_torus: {
        const double r = 0.5 / std::numbers::pi;
        const double a = 2.0 * std::numbers::pi * coordinates.x(), b = 2.0 * std::numbers::pi * coordinates.y();
        Eigen::VectorXd x(4);
        x << r * std::cos(a), r * std::sin(a), r * std::cos(b), r * std::sin(b);
        return x;
    }
    case SurfaceModel::unit_sphere:
        return coordinates.normalized();
    case SurfaceModel::polyhedral:
        break;
    }
    return coordinates;
}

Eigen::VectorXd embed_vector(const TriangleMesh& mesh, const Eigen::Vector3d& coordinates, const Eigen::Vector3d& v)
{
    if (mesh.model() != SurfaceModel::flat_torus) return v;
    const double a = 2.0 * std::numbers::pi * coordinates.x(), b = 2.0 * std::numbers::pi * coordinates.y();
    Eigen::VectorXd out(4);
    out << -std::sin(a) * v.x(), std::cos(a) * v.x(), -std::sin(b) * v.y(), std::cos(b) * v.y();
    return out;
}

Eigen::Vector2d rotate(const Eigen::Vector2d& v, double angle)
{
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

WalkResult walk(const TriangleMesh& mesh, const SurfacePoint& p, const Eigen::Vector2d& displacement)
{
    WalkResult out;
    int f = p.face;
    Eigen::Vector3d b = p.bary;
    Eigen::Vector2d d = displacement;
    const int max_crossings = 64 + 4 * mesh.num_faces();
    while (true) {
        const auto& L = mesh.face_layout(f);
        const double twice_area = cross2(L[1] - L[0], L[2] - L[0]);
        Eigen::Vector3d db;
        for (int k = 0; k < 3; ++k) db[k] = cross2(L[(k + 2) % 3] - L[(k + 1) % 3], d) / twice_area;
        const double tiny = 1e-14 * db.cwiseAbs().maxCoeff();
        double t_exit = 1.0;
        int exit = -1;
        for (int k = 0; k < 3; ++k) {
            if (db[k] >= -tiny) continue;
            const double t = std::max(0.0, b[k]) / -db[k];
            if (t < t_exit) {
                t_exit = t;
                exit = k;
            }
        }
        if (exit < 0) {
            b += db;
            break;
        }
        b += t_exit * db;
        b[exit] = 0.0;
        d *= 1.0 - t_exit;
        if (++out.crossings > max_crossings) throw std::runtime_error("walk: too many edge crossings");

        const int g = mesh.face_neighbor(f, exit);
        const int k1 = (exit + 1) % 3, k2 = (exit + 2) % 3;
        const int va = mesh.faces()[f][k1], vb = mesh.faces()[f][k2];
        int ia = -1, ib = -1;
        for (int k = 0; k < 3; ++k) {
            if (mesh.faces()[g][k] == va) ia = k;
            if (mesh.faces()[g][k] == vb) ib = k;
        }
        const auto& G = mesh.face_layout(g);
        const Eigen::Vector2d ef = L[k2] - L[k1];
        const Eigen::Vector2d eg = G[ib] - G[ia];
        const double angle = std::atan2(cross2(ef, eg), ef.dot(eg));
        d = rotate(d, angle);
        out.rotation += angle;
        Eigen::Vector3d nb = Eigen::Vector3d::Zero();
        nb[ia] = b[k1];
        nb[ib] = b[k2];
        b = nb;
        f = g;
    }
    out.end.face = f;
    out.end.bary = clamp_bary(b);
    return out;
}

TriangleLocator::TriangleLocator(SurfaceModel model, std::vector<std::array<Eigen::Vector3d, 3>> triangles)
    : model_(model)
    , triangles_(std::move(triangles))
{
    if (triangles_.empty()) throw std::invalid_argument("TriangleLocator: no triangles");
    double extent = 0.0;
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector3d hi = -lo;
    for (const auto& t : triangles_) {
        Eigen::Vector3d tlo = t[0].cwiseMin(t[1]).cwiseMin(t[2]);
        Eigen::Vector3d thi = t[0].cwiseMax(t[1]).cwiseMax(t[2]);
        extent = std::max(extent, (thi - tlo).maxCoeff());
        lo = lo.cwiseMin(tlo);
        hi = hi.cwiseMax(thi);
    }
    const bool periodic = model_ == SurfaceModel::flat_torus;
    if (periodic) {
        const int n = std::clamp(static_cast<int>(std::floor(1.0 / std::max(extent, 1e-12))), 1, 4096);
        cells_ = Eigen::Vector3i(n, n, 1);
        cell_ = 1.0 / n;
        origin_.setZero();
    } else {
        cell_ = std::max(extent, 1e-12);
        const double margin = cell_;
        origin_ = lo.array() - margin;
        for (int a = 0; a < 3; ++a)
            cells_[a] = std::clamp(static_cast<int>(std::ceil((hi[a] - lo[a] + 2 * margin) / cell_)), 1, 256);
    }
    grid_.assign(static_cast<std::size_t>(cells_.prod()), {});

    const double pad = periodic ? 1e-9 : 0.5 * cell_;
    for (int t = 0; t < size(); ++t) {
        const auto& tri = triangles_[t];
        const Eigen::Vector3d tlo = tri[0].cwiseMin(tri[1]).cwiseMin(tri[2]).array() - pad;
        const Eigen::Vector3d thi = tri[0].cwiseMax(tri[1]).cwiseMax(tri[2]).array() + pad;
        Eigen::Vector3i c0, c1;
        for (int a = 0; a < 3; ++a) {
            c0[a] = static_cast<int>(std::floor((tlo[a] - origin_[a]) / cell_));
            c1[a] = static_cast<int>(std::floor((thi[a] - origin_[a]) / cell_));
            if (periodic && a == 2) c0[a] = c1[a] = 0;
        }
        for (int i = c0.x(); i <= c1.x(); ++i)
            for (int j = c0.y(); j <= c1.y(); ++j)
                for (int k = c0.z(); k <= c1.z(); ++k) {
                    const long idx = cell_index({i, j, k});
                    if (grid_[idx].empty() || grid_[idx].back() != t) grid_[idx].push_back(t);
                }
    }
}

long TriangleLocator::cell_index(const Eigen::Vector3i& c) const
{
    Eigen::Vector3i w;
    for (int a = 0; a < 3; ++a) {
        if (model_ == SurfaceModel::flat_torus) {
            w[a] = ((c[a] % cells_[a]) + cells_[a]) % cells_[a];
        } else {
            w[a] = std::clamp(c[a], 0, cells_[a] - 1);
        }
    }
    return w.x() + static_cast<long>(cells_.x()) * (w.y() + static_cast<long>(cells_.y()) * w.z());
}

TriangleLocator::Hit TriangleLocator::test(int t, const Eigen::Vector3d& p) const
{
    const auto& A = triangles_[t];
    Hit hit;
    hit.triangle = t;
    Eigen::Vector3d raw;
    switch (model_) {
    case SurfaceModel::flat_torus: {
        Eigen::Vector2d d = (p - A[0]).head<2>();
        d = d.array() - d.array().round();
        const Eigen::Vector2d x = A[0].head<2>() + d;
        const double area = cross2((A[1] - A[0]).head<2>(), (A[2] - A[0]).head<2>());
        for (int k = 0; k < 3; ++k)
            raw[k] = cross2((A[(k + 1) % 3]).head<2>() - x, (A[(k + 2) % 3]).head<2>() - x) / area;
        hit.inside = raw.minCoeff();
        break;
    }
    case SurfaceModel::unit_sphere: {
        for (int k = 0; k < 3; ++k) raw[k] = p.dot(A[(k + 1) % 3].cross(A[(k + 2) % 3]));
        const double s = raw.sum();
        if (!(s > 0.0)) {
            hit.inside = -std::numeric_limits<double>::infinity();
            return hit;
        }
        raw /= s;
        hit.inside = raw.minCoeff();
        break;
    }
    case SurfaceModel::polyhedral: {
        raw = closest_bary(p, A[0], A[1], A[2]);
        const Eigen::Vector3d q = raw[0] * A[0] + raw[1] * A[1] + raw[2] * A[2];
        hit.inside = -(q - p).norm();
        break;
    }
    }
    hit.bary = clamp_bary(raw);
    return hit;
}

TriangleLocator::Hit TriangleLocator::scan(const std::vector<int>& candidates, const Eigen::Vector3d& p,
                                           bool& any) const
{
    Hit best;
    best.inside = -std::numeric_limits<double>::infinity();
    any = false;
    for (int t : candidates) {
        const Hit h = test(t, p);
        if (!any || h.inside > best.inside) {
            best = h;
            any = true;
        }
    }
    return best;
}

TriangleLocator::Hit TriangleLocator::locate(const Eigen::Vector3d& p) const
{
    Eigen::Vector3d q = p;
    if (model_ == SurfaceModel::unit_sphere) q = p.normalized();
    if (model_ == SurfaceModel::flat_torus) q.head<2>() = q.head<2>().array() - q.head<2>().array().floor();
    Eigen::Vector3i c;
    for (int a = 0; a < 3; ++a) c[a] = static_cast<int>(std::floor((q[a] - origin_[a]) / cell_));
    if (model_ == SurfaceModel::flat_torus) c.z() = 0;
    bool any = false;
    Hit best = scan(grid_[cell_index(c)], q, any);
    const double accept = model_ == SurfaceModel::polyhedral ? -0.5 * cell_ : -1e-9;
    if (any && best.inside >= accept) return best;

    std::vector<int> all(triangles_.size());
    for (int t = 0; t < size(); ++t) all[t] = t;
    return scan(all, q, any);
}

TriangleLocator face_locator(const TriangleMesh& mesh)
{
    std::vector<std::array<Eigen::Vector3d, 3>> tris(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (mesh.model() == SurfaceModel::flat_torus) {
            const auto c = mesh.unwrapped_chart(f);
            for (int k = 0; k < 3; ++k) tris[f][k] = Eigen::Vector3d(c[k].x(), c[k].y(), 0.0);
        } else {
            for (int k = 0; k < 3; ++k) tris[f][k] = mesh.positions().row(mesh.faces()[f][k]).head<3>().transpose();
        }
    }
    return TriangleLocator(mesh.model(), std::move(tris));
}

SurfacePoint locate_point(const TriangleLocator& faces, const Eigen::Vector3d& p)
{
    const auto hit = faces.locate(p);
    return {hit.triangle, hit.bary};
}

VertexInterpolator::VertexInterpolator(const TriangleMesh& mesh)
    : mesh_(&mesh)
{
    const int nf = mesh.num_faces(), nv = mesh.num_vertices();
    frames_.resize(nf);
    for (int f = 0; f < nf; ++f) {
        const Eigen::MatrixXd frame = face_frame(mesh, f);
        frames_[f] = Eigen::MatrixXd::Zero(3, 2);
        frames_[f].topRows(frame.rows()) = frame;
    }
    const Eigen::MatrixXd normals = vertex_normals(mesh);
    fit_.resize(nv);
    ring_.resize(nv);
    const double h = mesh.mean_edge_length();
    for (int v = 0; v < nv; ++v) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(3, 2);
        if (mesh.model() == SurfaceModel::flat_torus) {
            T(0, 0) = T(1, 1) = 1.0;
        } else {
            const Eigen::Vector3d n = normals.row(v).transpose();
            const Eigen::Vector3d t1 = n.unitOrthogonal();
            T.col(0) = t1;
            T.col(1) = n.cross(t1);
        }
        std::set<int> ring;
        for (const auto& [f, k] : mesh.vertex_corners(v)) {
            ring.insert(mesh.faces()[f][(k + 1) % 3]);
            ring.insert(mesh.faces()[f][(k + 2) % 3]);
        }
        if (ring.size() < 6) {
            const std::set<int> first = ring;
            for (int w : first)
                for (const auto& [f, k] : mesh.vertex_corners(w))
                    for (int j = 0; j < 3; ++j)
                        if (mesh.faces()[f][j] != v) ring.insert(mesh.faces()[f][j]);
        }
        ring_[v].assign(ring.begin(), ring.end());
        const int n = static_cast<int>(ring_[v].size());
        Eigen::MatrixXd A(n, 5);
        const Eigen::Vector3d pv = vertex_coordinates(mesh, v);
        for (int i = 0; i < n; ++i) {
            const Eigen::Vector3d d = coordinate_difference(mesh, pv, vertex_coordinates(mesh, ring_[v][i]));
            const double x = d.dot(T.col(0)) / h, y = d.dot(T.col(1)) / h;
            A.row(i) << x, y, 0.5 * x * x, x * y, 0.5 * y * y;
        }
        const Eigen::MatrixXd pinv = A.completeOrthogonalDecomposition().pseudoInverse();
        fit_[v] = T * pinv.topRows(2) / h;
    }
}

Eigen::MatrixXd VertexInterpolator::gradients(const Eigen::VectorXd& values) const
{
    const int nv = mesh_->num_vertices();
    Eigen::MatrixXd g(nv, 3);
    for (int v = 0; v < nv; ++v) {
        Eigen::VectorXd diff(ring_[v].size());
        for (std::size_t i = 0; i < ring_[v].size(); ++i) diff[i] = values[ring_[v][i]] - values[v];
        g.row(v) = (fit_[v] * diff).transpose();
    }
    return g;
}

double VertexInterpolator::linear(const Eigen::VectorXd& values, const SurfacePoint& p) const
{
    const auto& tri = mesh_->faces()[p.face];
    return p.bary[0] * values[tri[0]] + p.bary[1] * values[tri[1]] + p.bary[2] * values[tri[2]];
}

double VertexInterpolator::cubic(const Eigen::VectorXd& values, const Eigen::MatrixXd& gradients,
                                 const SurfacePoint& p) const
{
    const auto& tri = mesh_->faces()[p.face];
    const Eigen::Vector3d& u = p.bary;
    const auto& L = mesh_->face_layout(p.face);
    const std::array<double, 3> f{values[tri[0]], values[tri[1]], values[tri[2]]};
    std::array<Eigen::Vector2d, 3> g;
    for (int k = 0; k < 3; ++k) g[k] = frames_[p.face].transpose() * gradients.row(tri[k]).transpose();
    double c[3][3];
    double edge_sum = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            c[i][j] = f[i] + g[i].dot(L[j] - L[i]) / 3.0;
            edge_sum += c[i][j];
        }
    const double E = edge_sum / 6.0;
    const double V = (f[0] + f[1] + f[2]) / 3.0;
    const double center = E + 0.5 * (E - V);
    double out = 6.0 * center * u[0] * u[1] * u[2];
    for (int i = 0; i < 3; ++i) {
        out += f[i] * u[i] * u[i] * u[i];
        for (int j = 0; j < 3; ++j)
            if (i != j) out += 3.0 * c[i][j] * u[i] * u[i] * u[j];
    }
    return out;
}

} // namespace surfflow
