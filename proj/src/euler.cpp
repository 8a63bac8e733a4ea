// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/euler.hpp"

#include "surfflow/surface.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace surfflow {

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Image corners of face f under phi in point coordinates; torus corners are
/// unwrapped around the first one.
std::array<Eigen::Vector3d, 3> image_triangle(const TriangleMesh& mesh, const Eigen::MatrixXd& coords, int f)
{
    const auto& tri = mesh.faces()[f];
    std::array<Eigen::Vector3d, 3> A;
    A[0] = coords.row(tri[0]).transpose();
    for (int k = 1; k < 3; ++k) A[k] = A[0] + coordinate_difference(mesh, A[0], coords.row(tri[k]).transpose());
    return A;
}

/// Triangle area, negative when it faces away from `reference`.
double signed_area(const std::array<Eigen::Vector3d, 3>& A, const Eigen::Vector3d& reference)
{
    const Eigen::Vector3d n = (A[1] - A[0]).cross(A[2] - A[0]);
    return n.dot(reference) > 0.0 ? 0.5 * n.norm() : -0.5 * n.norm();
}

Eigen::MatrixXd pad3(const Eigen::MatrixXd& m)
{
    if (m.cols() == 3) return m;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), 3);
    out.leftCols(m.cols()) = m;
    return out;
}

std::string format_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10e", x);
    return buf;
}

} // namespace

FlowMap FlowMap::identity(const TriangleMesh& mesh)
{
    FlowMap phi;
    phi.image.reserve(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) phi.image.push_back(vertex_point(mesh, v));
    return phi;
}

Eigen::MatrixXd map_coordinates(const TriangleMesh& mesh, const FlowMap& phi)
{
    Eigen::MatrixXd out(phi.size(), 3);
    for (int v = 0; v < phi.size(); ++v) out.row(v) = point_coordinates(mesh, phi.image[v]).transpose();
    return out;
}

double max_vertex_error(const TriangleMesh& mesh, const FlowMap& phi,
                        const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& expected)
{
    double worst = 0.0;
    for (int v = 0; v < phi.size(); ++v) {
        const Eigen::Vector3d want = expected(vertex_coordinates(mesh, v));
        worst = std::max(worst, surface_distance(mesh, point_coordinates(mesh, phi.image[v]), want));
    }
    return worst;
}

Eigen::VectorXd pushforward_area_ratios(const TriangleMesh& mesh, const FlowMap& phi)
{
    const Eigen::MatrixXd coords = map_coordinates(mesh, phi);
    Eigen::VectorXd ratio(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        auto A = image_triangle(mesh, coords, f);
        double area = 0.0;
        switch (mesh.model()) {
        case SurfaceModel::flat_torus:
            area = 0.5 * cross2((A[1] - A[0]).head<2>(), (A[2] - A[0]).head<2>());
            break;
        case SurfaceModel::unit_sphere: {
            for (auto& a : A) a.normalize();
            const Eigen::Vector3d n = (A[0] + A[1] + A[2]).normalized();
            area = signed_area(A, n);
            break;
        }
        case SurfaceModel::polyhedral: {
            const Eigen::MatrixXd frame = face_frame(mesh, phi.image[mesh.faces()[f][0]].face);
            const Eigen::Vector3d n = Eigen::Vector3d(frame.col(0)).cross(Eigen::Vector3d(frame.col(1)));
            area = signed_area(A, n);
            break;
        }
        }
        ratio[f] = area / mesh.face_area(f);
    }
    return ratio;
}

double pushforward_area_error(const TriangleMesh& mesh, const FlowMap& phi)
{
    return (pushforward_area_ratios(mesh, phi).array() - 1.0).abs().maxCoeff();
}

std::vector<int> folded_faces(const TriangleMesh& mesh, const FlowMap& phi)
{
    const Eigen::VectorXd ratio = pushforward_area_ratios(mesh, phi);
    std::vector<int> out;
    for (int f = 0; f < ratio.size(); ++f)
        if (!(ratio[f] > 1e-12)) out.push_back(f);
    return out;
}

SurfacePoint evaluate_map(const TriangleMesh& mesh, const TriangleLocator& faces, const FlowMap& phi,
                          const Eigen::MatrixXd& image_coordinates, const SurfacePoint& p)
{
    for (int k = 0; k < 3; ++k)
        if (p.bary[k] == 1.0) return phi.image[mesh.faces()[p.face][k]];
    const auto A = image_triangle(mesh, image_coordinates, p.face);
    const Eigen::Vector3d x = p.bary[0] * A[0] + p.bary[1] * A[1] + p.bary[2] * A[2];
    return locate_point(faces, x);
}

FlowMap compose_maps(const TriangleMesh& mesh, const FlowMap& phi, const FlowMap& psi)
{
    const TriangleLocator faces = face_locator(mesh);
    const Eigen::MatrixXd coords = map_coordinates(mesh, phi);
    FlowMap out;
    out.time = phi.time + psi.time;
    out.image.reserve(psi.size());
    for (const SurfacePoint& p : psi.image) out.image.push_back(evaluate_map(mesh, faces, phi, coords, p));
    return out;
}

FlowMap invert_flow_map(const TriangleMesh& mesh, const FlowMap& phi)
{
    const std::vector<int> folded = folded_faces(mesh, phi);
    if (!folded.empty()) {
        std::ostringstream msg;
        msg << "flow map folds over " << folded.size() << " face(s):";
        for (std::size_t i = 0; i < std::min<std::size_t>(folded.size(), 20); ++i) msg << ' ' << folded[i];
        if (folded.size() > 20) msg << " ...";
        throw FoldOverError(msg.str(), folded);
    }
    const Eigen::MatrixXd coords = map_coordinates(mesh, phi);
    std::vector<std::array<Eigen::Vector3d, 3>> tris(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) tris[f] = image_triangle(mesh, coords, f);
    const TriangleLocator images(mesh.model(), std::move(tris));
    FlowMap out;
    out.time = -phi.time;
    out.image.reserve(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const auto hit = images.locate(vertex_coordinates(mesh, v));
        out.image.push_back({hit.triangle, hit.bary});
    }
    return out;
}

EulerSolver::EulerSolver(const HodgeSolver& hodge, EulerConfig config)
    : hodge_(&hodge)
    , config_(config)
    , locator_(face_locator(hodge.dec().mesh()))
    , interpolator_(hodge.dec().mesh())
{
    if (!(config_.dt > 0.0)) throw FlowError("dt must be positive");
    const TriangleMesh& m = mesh();
    frames_.resize(m.num_faces());
    for (int f = 0; f < m.num_faces(); ++f) frames_[f] = pad3(face_frame(m, f).transpose()).transpose();
}

Eigen::MatrixXd EulerSolver::vertex_velocity(const Eigen::VectorXd& flux) const
{
    const TangentField faces = rotate_J(hodge_->dec().sharp(Cochain1{flux}));
    return pad3(vertex_vectors(mesh(), faces));
}

double EulerSolver::cfl_number(const Eigen::MatrixXd& vertex_velocity, double dt) const
{
    const double speed = vertex_velocity.rows() ? vertex_velocity.rowwise().norm().maxCoeff() : 0.0;
    return speed * dt / mesh().mean_edge_length();
}

Eigen::Vector2d EulerSolver::face_velocity(const Eigen::MatrixXd& vertex_velocity, const SurfacePoint& p) const
{
    const auto& tri = mesh().faces()[p.face];
    Eigen::Vector3d u = Eigen::Vector3d::Zero();
    for (int k = 0; k < 3; ++k) u += p.bary[k] * vertex_velocity.row(tri[k]).transpose();
    return frames_[p.face].transpose() * u;
}

SurfacePoint EulerSolver::trace(const Eigen::MatrixXd& vertex_velocity, const SurfacePoint& p, double dt) const
{
    const TriangleMesh& m = mesh();
    const Eigen::Vector2d k1 = face_velocity(vertex_velocity, p);
    const WalkResult w1 = walk(m, p, 0.5 * dt * k1);
    const Eigen::Vector2d k2 = rotate(face_velocity(vertex_velocity, w1.end), -w1.rotation);
    const WalkResult w2 = walk(m, p, 0.5 * dt * k2);
    const Eigen::Vector2d k3 = rotate(face_velocity(vertex_velocity, w2.end), -w2.rotation);
    const WalkResult w3 = walk(m, p, dt * k3);
    const Eigen::Vector2d k4 = rotate(face_velocity(vertex_velocity, w3.end), -w3.rotation);
    return walk(m, p, dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).end;
}

Eigen::MatrixXd EulerSolver::vertex_gradients(const Eigen::VectorXd& values) const
{
    if (config_.interpolation == Interpolation::linear) return {};
    return interpolator_.gradients(values);
}

double EulerSolver::sample(const Eigen::VectorXd& values, const Eigen::MatrixXd& gradients,
                           const SurfacePoint& p) const
{
    if (gradients.size() == 0) return interpolator_.linear(values, p);
    return interpolator_.cubic(values, gradients, p);
}

FlowState EulerSolver::initial_state(const Cochain0& omega, const CohomologyClass& cls) const
{
    FlowState s;
    s.omega = omega;
    s.cls = cls;
    s.forward = FlowMap::identity(mesh());
    s.inverse = s.forward;
    s.velocity = hodge_->biot_savart(omega, cls);
    return s;
}

FlowState EulerSolver::advect_step(const FlowState& state, double dt, std::vector<std::string>* warnings) const
{
    if (!(dt > 0.0)) throw FlowError("advect_step: dt must be positive");
    const TriangleMesh& m = mesh();
    const Eigen::VectorXd& flux = state.velocity.flux.values;
    const Eigen::VectorXd mid = state.previous_flux.size() ? Eigen::VectorXd(1.5 * flux - 0.5 * state.previous_flux)
                                                           : flux;
    const Eigen::MatrixXd vel = vertex_velocity(mid);
    const double cfl = cfl_number(vel, dt);
    if (cfl > config_.cfl_limit) {
        std::ostringstream msg;
        msg << "CFL number " << cfl << " exceeds the limit " << config_.cfl_limit << " at t=" << state.time;
        throw FlowError(msg.str());
    }
    if (cfl > config_.cfl_warn && warnings) {
        std::ostringstream msg;
        msg << "CFL number " << cfl << " above " << config_.cfl_warn << " at t=" << state.time;
        warnings->push_back(msg.str());
    }

    const Eigen::MatrixXd grads = vertex_gradients(state.omega.values);
    const Eigen::MatrixXd inverse_coords = map_coordinates(m, state.inverse);
    FlowState next;
    next.omega.values.resize(m.num_vertices());
    next.inverse.image.resize(m.num_vertices());
    next.forward.image.resize(m.num_vertices());
    for (int v = 0; v < m.num_vertices(); ++v) {
        const SurfacePoint departure = trace(vel, vertex_point(m, v), -dt);
        next.omega.values[v] = sample(state.omega.values, grads, departure);
        next.inverse.image[v] = evaluate_map(m, locator_, state.inverse, inverse_coords, departure);
        next.forward.image[v] = trace(vel, state.forward.image[v], dt);
    }
    next.omega.values.array() -= hodge_->dec().mean(next.omega);
    next.time = state.time + dt;
    next.forward.time = next.time;
    next.inverse.time = -next.time;
    next.cls = state.cls;
    next.velocity = hodge_->biot_savart(next.omega, next.cls);
    next.previous_flux = flux;
    return next;
}

Diagnostics EulerSolver::diagnose(const FlowState& state) const
{
    const Dec& dec = hodge_->dec();
    const Eigen::VectorXd& w = state.omega.values;
    const Eigen::VectorXd& mass = dec.star0();
    Diagnostics d;
    d.time = state.time;
    d.energy = hodge_->kinetic_energy(state.velocity);
    d.enstrophy = 0.5 * w.cwiseAbs2().dot(mass);
    d.casimir3 = w.array().cube().matrix().dot(mass);
    d.casimir4 = w.array().square().square().matrix().dot(mass);
    d.omega_min = w.minCoeff();
    d.omega_max = w.maxCoeff();
    d.mean_omega = dec.mean(state.omega);
    d.divergence_residual = hodge_->divergence(state.velocity).values.cwiseAbs().maxCoeff();
    d.area_error = pushforward_area_error(mesh(), state.forward);
    d.cfl = cfl_number(vertex_velocity(state.velocity.flux.values), config_.dt);
    return d;
}

EulerRun EulerSolver::run(const Cochain0& omega0, const CohomologyClass& cls, double T) const
{
    if (!(T >= 0.0)) throw FlowError("run: T must be nonnegative");
    const int steps = T > 0.0 ? static_cast<int>(std::ceil(T / config_.dt - 1e-9)) : 0;
    const double dt = steps > 0 ? T / steps : 0.0;
    EulerRun out;
    FlowState state = initial_state(omega0, cls);
    out.diagnostics.push_back(diagnose(state));
    out.trajectory.push_back(state);
    for (int n = 1; n <= steps; ++n) {
        state = advect_step(state, dt, &out.warnings);
        if (n == steps) state.time = T;
        out.diagnostics.push_back(diagnose(state));
        if (n == steps || (config_.snapshot_every > 0 && n % config_.snapshot_every == 0))
            out.trajectory.push_back(state);
    }
    return out;
}

FlowMap EulerSolver::exp_map(const DivFreeVelocity& v) const
{
    const Cochain0 omega = hodge_->curl(v);
    Cochain0 centered = omega;
    centered.values.array() -= hodge_->dec().mean(omega);
    return run(centered, v.cls, 1.0).final_state().forward;
}

FlowMap exp_map(const HodgeSolver& hodge, const DivFreeVelocity& v, const EulerConfig& config)
{
    return EulerSolver(hodge, config).exp_map(v);
}

EulerRun run_euler(const HodgeSolver& hodge, const Cochain0& omega0, const CohomologyClass& cls, double T,
                   const EulerConfig& config)
{
    return EulerSolver(hodge, config).run(omega0, cls, T);
}

void write_diagnostics_csv(std::ostream& out, const std::vector<Diagnostics>& rows)
{
    out << "t,energy,enstrophy,casimir3,casimir4,omega_min,omega_max,mean_omega,divergence_residual,area_error,cfl\n";
    for (const Diagnostics& d : rows) {
        const double values[] = {d.time,      d.energy,    d.enstrophy,  d.casimir3,
                                 d.casimir4,  d.omega_min, d.omega_max,  d.mean_omega,
                                 d.divergence_residual,    d.area_error, d.cfl};
        for (std::size_t i = 0; i < std::size(values); ++i) out << (i ? "," : "") << format_number(values[i]);
        out << '\n';
    }
}

void write_vtk(std::ostream& out, const TriangleMesh& mesh, const Eigen::VectorXd& omega,
               const Eigen::MatrixXd& face_velocity, const std::string& title)
{
    const int nv = mesh.num_vertices(), nf = mesh.num_faces();
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << nv << " double\n";
    for (int v = 0; v < nv; ++v) {
        const Eigen::Vector3d p = vertex_coordinates(mesh, v);
        out << format_number(p.x()) << ' ' << format_number(p.y()) << ' ' << format_number(p.z()) << '\n';
    }
    out << "POLYGONS " << nf << ' ' << 4 * nf << '\n';
    for (const auto& t : mesh.faces()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "POINT_DATA " << nv << "\nSCALARS omega double 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < nv; ++v) out << format_number(omega[v]) << '\n';
    const Eigen::MatrixXd vel = pad3(face_velocity);
    out << "CELL_DATA " << nf << "\nVECTORS velocity double\n";
    for (int f = 0; f < nf; ++f)
        out << format_number(vel(f, 0)) << ' ' << format_number(vel(f, 1)) << ' ' << format_number(vel(f, 2)) << '\n';
}

} // namespace surfflow
