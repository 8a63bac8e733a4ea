// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/microglobal.hpp"

#include "surfflow/surface.hpp"

#include <Eigen/Geometry>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace surfflow {

namespace {

Eigen::Vector3d face_normal(const TriangleMesh& mesh, int f)
{
    const Eigen::MatrixXd frame = face_frame(mesh, f);
    return Eigen::Vector3d(frame.col(0)).cross(Eigen::Vector3d(frame.col(1)));
}

Eigen::Vector3d vertex_normal(const TriangleMesh& mesh, int v)
{
    if (mesh.model() == SurfaceModel::unit_sphere) return mesh.positions().row(v).head<3>().transpose().normalized();
    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    for (const auto& [f, k] : mesh.vertex_corners(v)) n += mesh.corner_area(f, k) * face_normal(mesh, f);
    return n.normalized();
}

Eigen::MatrixXd basis_from_normal(const Eigen::Vector3d& n)
{
    Eigen::MatrixXd T(3, 2);
    const Eigen::Vector3d t1 = n.unitOrthogonal();
    T.col(0) = t1;
    T.col(1) = n.cross(t1);
    return T;
}

/// Tangent basis in embedding coordinates at a surface point.
Eigen::MatrixXd point_tangent_basis(const TriangleMesh& mesh, const SurfacePoint& p)
{
    const Eigen::Vector3d c = point_coordinates(mesh, p);
    switch (mesh.model()) {
    case SurfaceModel::flat_torus: {
        Eigen::MatrixXd T(embedding_dimension(mesh), 2);
        T.col(0) = embed_vector(mesh, c, Eigen::Vector3d::UnitX());
        T.col(1) = embed_vector(mesh, c, Eigen::Vector3d::UnitY());
        return T;
    }
    case SurfaceModel::unit_sphere:
        return basis_from_normal(c.normalized());
    default:
        return basis_from_normal(face_normal(mesh, p.face));
    }
}

Eigen::MatrixXd vertex_embedding(const TriangleMesh& mesh)
{
    const int nv = mesh.num_vertices();
    Eigen::MatrixXd X(nv, embedding_dimension(mesh));
    for (int v = 0; v < nv; ++v) X.row(v) = embed(mesh, vertex_coordinates(mesh, v)).transpose();
    return X;
}

Eigen::MatrixXd map_embedding(const TriangleMesh& mesh, const FlowMap& phi)
{
    Eigen::MatrixXd X(phi.size(), embedding_dimension(mesh));
    for (int v = 0; v < phi.size(); ++v) X.row(v) = embed(mesh, point_coordinates(mesh, phi.image[v])).transpose();
    return X;
}

double l2(const Eigen::VectorXd& mass, const Eigen::VectorXd& f) { return std::sqrt(f.cwiseAbs2().dot(mass)); }

} // namespace

Eigen::MatrixXd embedded_tangent_basis(const TriangleMesh& mesh, int v)
{
    if (mesh.model() == SurfaceModel::flat_torus) return point_tangent_basis(mesh, vertex_point(mesh, v));
    return basis_from_normal(vertex_normal(mesh, v));
}

Eigen::MatrixXd embedded_projector(const TriangleMesh& mesh, int v)
{
    const Eigen::MatrixXd T = embedded_tangent_basis(mesh, v);
    return T * T.transpose();
}

Eigen::Vector3d to_point_vector(const TriangleMesh& mesh, int v, const Eigen::VectorXd& w)
{
    if (mesh.model() != SurfaceModel::flat_torus) return w.head<3>();
    const Eigen::Vector2d t = embedded_tangent_basis(mesh, v).transpose() * w;
    return {t.x(), t.y(), 0.0};
}

Cochain1 vertex_field_flat(const TriangleMesh& mesh, const Eigen::MatrixXd& U)
{
    Cochain1 out{Eigen::VectorXd(mesh.num_edges())};
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto [a, b] = mesh.edges()[e];
        const Eigen::Vector3d d = coordinate_difference(mesh, vertex_coordinates(mesh, a), vertex_coordinates(mesh, b));
        out.values[e] = 0.5 * (U.row(a) + U.row(b)).dot(d);
    }
    return out;
}

Eigen::MatrixXd rotate_vertex_field(const TriangleMesh& mesh, const Eigen::MatrixXd& U)
{
    Eigen::MatrixXd out(U.rows(), 3);
    for (int v = 0; v < U.rows(); ++v) {
        const Eigen::Vector3d u = U.row(v).transpose();
        if (mesh.model() == SurfaceModel::flat_torus)
            out.row(v) << -u.y(), u.x(), 0.0;
        else
            out.row(v) = vertex_normal(mesh, v).cross(u).transpose();
    }
    return out;
}

EmbeddedFlow embed_flow(const TriangleMesh& mesh, const FlowMap& phi, const FlowMap& inverse)
{
    const int nv = mesh.num_vertices();
    if (phi.size() != nv || inverse.size() != nv) throw ProbeError("embed_flow: flow maps and mesh disagree");
    const Eigen::MatrixXd X = vertex_embedding(mesh);
    EmbeddedFlow out;
    out.Phi = map_embedding(mesh, phi);
    out.Psi = map_embedding(mesh, inverse);
    out.DPhi.resize(nv);
    out.DPsi.resize(nv);
    const int m = static_cast<int>(X.cols());
    for (int v = 0; v < nv; ++v) {
        std::set<int> ring;
        for (const auto& [f, k] : mesh.vertex_corners(v)) {
            ring.insert(mesh.faces()[f][(k + 1) % 3]);
            ring.insert(mesh.faces()[f][(k + 2) % 3]);
        }
        if (ring.size() < 3) {
            std::ostringstream msg;
            msg << "embed_flow: vertex " << v << " has a degenerate 1-ring";
            throw ProbeError(msg.str());
        }
        const int n = static_cast<int>(ring.size());
        Eigen::MatrixXd D(n, m), Y1(n, m), Y2(n, m);
        int i = 0;
        for (int w : ring) {
            D.row(i) = X.row(w) - X.row(v);
            Y1.row(i) = out.Phi.row(w) - out.Phi.row(v);
            Y2.row(i) = out.Psi.row(w) - out.Psi.row(v);
            ++i;
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(D.rows(), D.cols());
        cod.setThreshold(1e-8);
        cod.compute(D);
        const Eigen::MatrixXd P = embedded_projector(mesh, v);
        out.DPhi[v] = cod.solve(Y1).transpose() * P;
        out.DPsi[v] = cod.solve(Y2).transpose() * P;
    }
    out.DPsiAtImage.resize(nv);
    for (int v = 0; v < nv; ++v) out.DPsiAtImage[v] = interpolate_jacobian(mesh, out.DPsi, phi.image[v]);
    return out;
}

Eigen::MatrixXd interpolate_jacobian(const TriangleMesh& mesh, const std::vector<Eigen::MatrixXd>& J,
                                     const SurfacePoint& p)
{
    const auto& tri = mesh.faces()[p.face];
    return p.bary[0] * J[tri[0]] + p.bary[1] * J[tri[1]] + p.bary[2] * J[tri[2]];
}

WQuantity compute_W(const Paracalculus& para, const EmbeddedFlow& flow, double time)
{
    const int m = static_cast<int>(flow.Phi.cols());
    const int nv = static_cast<int>(flow.Phi.rows());
    std::vector<std::vector<Cochain0>> A(m, std::vector<Cochain0>(m));
    std::vector<Cochain0> V(m);
    for (int i = 0; i < m; ++i) {
        V[i].values = flow.Phi.col(i);
        for (int j = 0; j < m; ++j) {
            A[i][j].values.resize(nv);
            for (int v = 0; v < nv; ++v) A[i][j].values[v] = flow.DPsiAtImage[v](i, j);
        }
    }
    const std::vector<Cochain0> W = para.vector_paraproduct(A, V);
    WQuantity out;
    out.time = time;
    out.W.resize(nv, m);
    for (int i = 0; i < m; ++i) out.W.col(i) = W[i].values;
    return out;
}

Eigen::MatrixXd compute_U(const TriangleMesh& mesh, const WQuantity& before, const WQuantity& at,
                          const WQuantity& after)
{
    const double delta = at.time - before.time;
    if (!(delta >= 1e-8)) throw ProbeError("compute_U: time step below 1e-8");
    if (std::abs((after.time - at.time) - delta) > 1e-9 * delta) throw ProbeError("compute_U: samples are not centered");
    const Eigen::MatrixXd dW = (after.W - before.W) / (after.time - before.time);
    Eigen::MatrixXd U(dW.rows(), 3);
    for (int v = 0; v < dW.rows(); ++v)
        U.row(v) = to_point_vector(mesh, v, embedded_projector(mesh, v) * dW.row(v).transpose()).transpose();
    return U;
}

namespace {

DivSmoothness compare_decay(const Eigen::VectorXd& mass, const Eigen::VectorXd& div, const Eigen::VectorXd& curl,
                            const SpectralBasis& basis, int first, int last, double threshold, double div_scale)
{
    DivSmoothness out;
    const double curl_scale = l2(mass, curl);
    if (curl_scale <= kDivCurlNoiseFloor * div_scale) {
        out.exact_zero_curl = true;
        out.gap = -std::numeric_limits<double>::infinity();
        out.divergence = sobolev_slope(Cochain0{div}, basis, first, last);
        return out;
    }
    out.curl = sobolev_slope(Cochain0{curl}, basis, first, last);
    if (div_scale <= kDivCurlNoiseFloor * curl_scale) {
        out.exact_zero_divergence = true;
        out.gap = std::numeric_limits<double>::infinity();
        out.pass = true;
        return out;
    }
    out.divergence = sobolev_slope(Cochain0{div}, basis, first, last);
    out.gap = out.divergence.slope - out.curl.slope;
    out.pass = !out.divergence.degenerate && !out.curl.degenerate && out.gap >= threshold;
    return out;
}

} // namespace

DivSmoothness check_div_smoothness(const Dec& dec, const Cochain1& u_flat, const SpectralBasis& basis, int first,
                                   int last, double threshold)
{
    const Eigen::VectorXd div = dec.codifferential(u_flat).values;
    const Eigen::VectorXd curl = dec.scalar_curl(u_flat).values;
    return compare_decay(dec.star0(), div, curl, basis, first, last, threshold, l2(dec.star0(), div));
}

DivSmoothness check_div_smoothness(const HodgeSolver& hodge, const DivFreeVelocity& v, const SpectralBasis& basis,
                                   int first, int last, double threshold)
{
    const Dec& dec = hodge.dec();
    const Eigen::VectorXd face_div = hodge.divergence(v).values;
    const Eigen::VectorXd div = dec.face_to_vertex(face_div);
    const Eigen::VectorXd curl = hodge.curl(v).values;
    return compare_decay(dec.star0(), div, curl, basis, first, last, threshold, l2(dec.star0(), div));
}

Eigen::Vector2cd symbol_biot_savart(const Eigen::Vector2d& xi)
{
    const double n2 = xi.squaredNorm();
    if (!(n2 > 0.0)) throw ProbeError("symbol_biot_savart: zero covector");
    const Eigen::Vector2d Jxi(-xi.y(), xi.x());
    const std::complex<double> c(0.0, -1.0 / (2.0 * std::numbers::pi * n2));
    return Eigen::Vector2cd(c * Jxi.x(), c * Jxi.y());
}

namespace {

Eigen::Matrix2d inverse_adjoint(const Eigen::Matrix2d& A)
{
    const double det = A.determinant();
    if (!(std::abs(det) > 1e-14 * A.squaredNorm())) throw ProbeError("symbol_main: singular tangent map");
    return A.inverse().transpose();
}

} // namespace

double symbol_main(const Eigen::Vector2d& xi, const Eigen::Matrix2d& dphi)
{
    if (!(xi.squaredNorm() > 0.0)) throw ProbeError("symbol_main: zero covector");
    const Eigen::Matrix2d B = inverse_adjoint(dphi);
    Eigen::Matrix2d J;
    J << 0.0, -1.0, 1.0, 0.0;
    const Eigen::Vector2d Bxi = B * xi;
    return (B * J * xi).dot(J * Bxi) / Bxi.squaredNorm();
}

double symbol_main_pushforward(const Eigen::Vector2d& xi, const Eigen::Matrix2d& dphi)
{
    if (!(xi.squaredNorm() > 0.0)) throw ProbeError("symbol_main: zero covector");
    const Eigen::Matrix2d B = inverse_adjoint(dphi);
    return xi.squaredNorm() / (dphi.determinant() * (B * xi).squaredNorm());
}

std::vector<Eigen::Matrix2d> face_jacobians(const TriangleMesh& mesh, const FlowMap& phi)
{
    if (phi.size() != mesh.num_vertices()) throw ProbeError("face_jacobians: flow map and mesh disagree");
    std::vector<Eigen::Matrix2d> out(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& tri = mesh.faces()[f];
        const auto& L = mesh.face_layout(f);
        Eigen::Matrix2d E;
        E.col(0) = L[1] - L[0];
        E.col(1) = L[2] - L[0];
        std::array<Eigen::Vector3d, 3> q;
        for (int k = 0; k < 3; ++k) q[k] = point_coordinates(mesh, phi.image[tri[k]]);
        Eigen::Matrix2d image;
        if (mesh.model() == SurfaceModel::flat_torus) {
            image.col(0) = coordinate_difference(mesh, q[0], q[1]).head<2>();
            image.col(1) = coordinate_difference(mesh, q[0], q[2]).head<2>();
        } else {
            Eigen::Vector3d n;
            if (mesh.model() == SurfaceModel::unit_sphere) {
                for (auto& x : q) x.normalize();
                n = (q[0] + q[1] + q[2]).normalized();
            } else {
                n = face_normal(mesh, phi.image[tri[0]].face);
            }
            const Eigen::MatrixXd T = basis_from_normal(n);
            image.col(0) = T.transpose() * (q[1] - q[0]);
            image.col(1) = T.transpose() * (q[2] - q[0]);
        }
        out[f] = image * E.inverse();
    }
    return out;
}

EllipticityCertificate ellipticity_certificate(const TriangleMesh& mesh, const FlowMap& phi, int samples,
                                               std::uint64_t seed)
{
    if (samples < 1) throw ProbeError("ellipticity_certificate: need at least one sample");
    const std::vector<Eigen::Matrix2d> J = face_jacobians(mesh, phi);
    std::vector<int> folded;
    EllipticityCertificate cert;
    cert.conditioning_bound = std::numeric_limits<double>::infinity();
    for (int f = 0; f < static_cast<int>(J.size()); ++f) {
        if (!(J[f].determinant() > 0.0)) {
            folded.push_back(f);
            continue;
        }
        const Eigen::Vector2d s = Eigen::JacobiSVD<Eigen::Matrix2d>(J[f]).singularValues();
        cert.conditioning_bound = std::min(cert.conditioning_bound, s[1] / s[0]);
    }
    if (!folded.empty()) {
        std::ostringstream msg;
        msg << "ellipticity_certificate: " << folded.size() << " faces are not orientation preserving";
        throw FoldOverError(msg.str(), folded);
    }
    std::mt19937_64 rng(seed);
    cert.samples = samples;
    cert.histogram.assign(32, 0);
    cert.min_symbol = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const int f = static_cast<int>(rng() % static_cast<std::uint64_t>(mesh.num_faces()));
        const double angle = 2.0 * std::numbers::pi * std::ldexp(static_cast<double>(rng() >> 11), -53);
        const Eigen::Vector2d xi(std::cos(angle), std::sin(angle));
        const double s = symbol_main(xi, J[f]);
        if (s < cert.min_symbol) {
            cert.min_symbol = s;
            cert.min_face = f;
            cert.min_covector = xi;
        }
        const double slot = std::floor((std::log2(std::max(s, 1e-300)) + 8.0) * 2.0);
        cert.histogram[static_cast<int>(std::clamp(slot, 0.0, 31.0))] += 1;
    }
    cert.pass = cert.min_symbol > 0.0;
    return cert;
}

void write_symbol_histogram_csv(std::ostream& out, const EllipticityCertificate& cert)
{
    out << "log2_lower,log2_upper,count\n";
    char buf[96];
    for (int b = 0; b < static_cast<int>(cert.histogram.size()); ++b) {
        std::snprintf(buf, sizeof buf, "%.1f,%.1f,%d\n", -8.0 + 0.5 * b, -7.5 + 0.5 * b, cert.histogram[b]);
        out << buf;
    }
}

namespace {

/// Vertex velocity of a flux in embedding coordinates, one field per component.
std::vector<Cochain0> embedded_velocity(const HodgeSolver& hodge, const DivFreeVelocity& v)
{
    const Dec& dec = hodge.dec();
    const TriangleMesh& mesh = dec.mesh();
    const Eigen::MatrixXd vv = vertex_vectors(mesh, hodge.velocity(v));
    const int m = embedding_dimension(mesh), nv = mesh.num_vertices();
    std::vector<Cochain0> out(m, Cochain0{Eigen::VectorXd(nv)});
    for (int x = 0; x < nv; ++x) {
        Eigen::Vector3d u = Eigen::Vector3d::Zero();
        u.head(vv.cols()) = vv.row(x).transpose();
        const Eigen::VectorXd w = embed_vector(mesh, vertex_coordinates(mesh, x), u);
        for (int i = 0; i < m; ++i) out[i].values[x] = w[i];
    }
    return out;
}

} // namespace

BTildeOperator::BTildeOperator(const HodgeSolver& hodge, const Paracalculus& para, const Cochain0& background,
                               double t, const EulerConfig& config)
    : hodge_(&hodge)
    , para_(&para)
{
    const TriangleMesh& mesh = hodge.dec().mesh();
    if (t < 0.0) throw ProbeError("B~: time must be nonnegative");
    xi_ = FlowMap::identity(mesh);
    xi_inverse_ = xi_;
    if (t > 0.0) {
        const EulerSolver solver(hodge, config);
        const EulerRun run = solver.run(background, CohomologyClass::zero(hodge.cohomology_dimension()), t);
        xi_ = run.final_state().forward;
        xi_inverse_ = run.final_state().inverse;
    }
    const EmbeddedFlow e = embed_flow(mesh, xi_, xi_inverse_);
    const int m = embedding_dimension(mesh), nv = mesh.num_vertices();
    dxi_inverse_.assign(m, std::vector<Cochain0>(m, Cochain0{Eigen::VectorXd(nv)}));
    for (int v = 0; v < nv; ++v)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) dxi_inverse_[i][j].values[v] = e.DPsiAtImage[v](i, j);
}

Cochain0 BTildeOperator::apply(const Cochain0& omega) const
{
    const Dec& dec = hodge_->dec();
    const TriangleMesh& mesh = dec.mesh();
    const double scale = omega.values.cwiseAbs().maxCoeff();
    if (std::abs(dec.mean(omega)) > 1e-8 * std::max(scale, 1e-300)) throw ProbeError("B~: vorticity must have zero mean");
    if (scale == 0.0) return omega;

    Cochain0 a = para_->paracomposition(dec, xi_inverse_, omega).result;
    a.values.array() -= dec.mean(a);
    const DivFreeVelocity v = hodge_->biot_savart(a, CohomologyClass::zero(hodge_->cohomology_dimension()));
    const std::vector<Cochain0> components = embedded_velocity(*hodge_, v);
    std::vector<Cochain0> b;
    for (const auto& k : para_->paracompositions(dec, xi_, components)) b.push_back(k.result);
    const std::vector<Cochain0> c = para_->vector_paraproduct(dxi_inverse_, b);

    const int m = static_cast<int>(c.size()), nv = mesh.num_vertices();
    Eigen::MatrixXd U(nv, 3);
    for (int x = 0; x < nv; ++x) {
        Eigen::VectorXd w(m);
        for (int i = 0; i < m; ++i) w[i] = c[i].values[x];
        U.row(x) = to_point_vector(mesh, x, embedded_projector(mesh, x) * w).transpose();
    }
    return dec.scalar_curl(vertex_field_flat(mesh, U));
}

JacobianSpectrum dexp_jacobian(const HodgeSolver& hodge, const SpectralBasis& basis, const DivFreeVelocity& v,
                               int modes, const DexpConfig& config)
{
    if (!(config.epsilon >= 1e-4 && config.epsilon <= 1e-2)) throw ProbeError("dexp_jacobian: epsilon outside [1e-4, 1e-2]");
    if (modes < 1 || modes >= basis.size()) {
        std::ostringstream msg;
        msg << "dexp_jacobian: " << modes << " modes requested, basis offers " << basis.size() - 1;
        throw ProbeError(msg.str());
    }
    const Dec& dec = hodge.dec();
    const TriangleMesh& mesh = dec.mesh();
    const int nv = mesh.num_vertices(), m = embedding_dimension(mesh);
    const CohomologyClass zero = CohomologyClass::zero(hodge.cohomology_dimension());
    const EulerSolver solver(hodge, config.euler);

    const FlowMap base = solver.exp_map(v);
    if (!folded_faces(mesh, base).empty()) throw FoldOverError("dexp_jacobian: base flow folds over", folded_faces(mesh, base));
    const Eigen::MatrixXd base_embedded = map_embedding(mesh, base);
    std::vector<Eigen::MatrixXd> tangent(nv);
    for (int x = 0; x < nv; ++x) tangent[x] = point_tangent_basis(mesh, base.image[x]);

    // directions S(u_k) and their tangential coordinates at the base image points
    std::vector<DivFreeVelocity> directions;
    Eigen::MatrixXd G(2 * nv, modes);
    const Eigen::VectorXd weight = dec.star0().cwiseSqrt();
    for (int k = 0; k < modes; ++k) {
        const Cochain0 u{basis.eigenvectors.col(k + 1)};
        directions.push_back(hodge.biot_savart(u, zero));
        const std::vector<Cochain0> w = embedded_velocity(hodge, directions.back());
        for (int x = 0; x < nv; ++x) {
            const SurfacePoint& p = base.image[x];
            const auto& tri = mesh.faces()[p.face];
            Eigen::VectorXd at = Eigen::VectorXd::Zero(m);
            for (int c = 0; c < 3; ++c)
                for (int i = 0; i < m; ++i) at[i] += p.bary[c] * w[i].values[tri[c]];
            G.block(2 * x, k, 2, 1) = weight[x] * tangent[x].transpose() * at;
        }
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(G);

    JacobianSpectrum out;
    out.matrix.resize(modes, modes);
    for (int k = 0; k < modes; ++k) {
        DivFreeVelocity moved = v;
        moved.flux.values += config.epsilon * directions[k].flux.values;
        moved.stream.values += config.epsilon * directions[k].stream.values;
        const FlowMap image = solver.exp_map(moved);
        const std::vector<int> folded = folded_faces(mesh, image);
        if (!folded.empty()) throw FoldOverError("dexp_jacobian: perturbed flow folds over", folded);
        const Eigen::MatrixXd moved_embedded = map_embedding(mesh, image);
        Eigen::VectorXd rhs(2 * nv);
        for (int x = 0; x < nv; ++x)
            rhs.segment<2>(2 * x) = weight[x] * tangent[x].transpose() *
                                    (moved_embedded.row(x) - base_embedded.row(x)).transpose() / config.epsilon;
        out.matrix.col(k) = qr.solve(rhs);
    }
    out.singular_values = Eigen::JacobiSVD<Eigen::MatrixXd>(out.matrix).singularValues();
    out.thresholds = config.thresholds;
    for (double tau : config.thresholds) {
        int rank = 0;
        for (int i = 0; i < out.size(); ++i)
            if (out.singular_values[i] > tau * out.singular_values[0]) ++rank;
        out.rank.push_back(rank);
        out.kernel.push_back(out.size() - rank);
        out.cokernel.push_back(static_cast<int>(out.matrix.rows()) - rank);
    }
    return out;
}

void write_spectrum_csv(std::ostream& out, const JacobianSpectrum& spectrum)
{
    out << "index,singular_value\n";
    char buf[64];
    for (int i = 0; i < spectrum.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%d,%.10e\n", i, spectrum.singular_values[i]);
        out << buf;
    }
}

} // namespace surfflow
