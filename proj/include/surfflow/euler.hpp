// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "surfflow/hodge.hpp"
#include "surfflow/surface_point.hpp"

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace surfflow {

class FlowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a flow map reverses the orientation of some face images.
class FoldOverError : public FlowError {
public:
    FoldOverError(const std::string& what, std::vector<int> faces)
        : FlowError(what)
        , faces(std::move(faces))
    {
    }
    std::vector<int> faces;
};

/// Discrete diffeomorphism: the image of every vertex as a point on the mesh.
struct FlowMap {
    std::vector<SurfacePoint> image;
    double time = 0.0;

    static FlowMap identity(const TriangleMesh& mesh);
    int size() const { return static_cast<int>(image.size()); }
};

/// Image coordinates of every vertex (V x 3, see point_coordinates).
Eigen::MatrixXd map_coordinates(const TriangleMesh& mesh, const FlowMap& phi);

/// Largest surface distance between phi(v) and expected(v) over the vertices.
double max_vertex_error(const TriangleMesh& mesh, const FlowMap& phi,
                        const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& expected);

/// Per-face area of the image triangle over the face area.
Eigen::VectorXd pushforward_area_ratios(const TriangleMesh& mesh, const FlowMap& phi);
double pushforward_area_error(const TriangleMesh& mesh, const FlowMap& phi);
/// Faces whose image triangle is degenerate or orientation reversing.
std::vector<int> folded_faces(const TriangleMesh& mesh, const FlowMap& phi);

/// phi evaluated at a point, by interpolating the images of the face corners.
SurfacePoint evaluate_map(const TriangleMesh& mesh, const TriangleLocator& faces, const FlowMap& phi,
                          const Eigen::MatrixXd& image_coordinates, const SurfacePoint& p);
/// (phi o psi)(v) = phi(psi(v)).
FlowMap compose_maps(const TriangleMesh& mesh, const FlowMap& phi, const FlowMap& psi);
/// Locates every vertex inside the image triangles of phi; throws FoldOverError
/// when phi reverses some face.
FlowMap invert_flow_map(const TriangleMesh& mesh, const FlowMap& phi);

enum class Interpolation { linear, cubic };

struct EulerConfig {
    double dt = 1.0 / 128.0;
    /// Resampling of the transported vorticity at the departure points.
    Interpolation interpolation = Interpolation::cubic;
    double cfl_warn = 0.5;
    double cfl_limit = 1.0;
    /// Keep every k-th state in the trajectory (0: first and last only).
    int snapshot_every = 0;
};

struct FlowState {
    Cochain0 omega;
    double time = 0.0;
    CohomologyClass cls;
    FlowMap forward;
    FlowMap inverse;
    DivFreeVelocity velocity;
    /// Flux of the previous step, for the midpoint extrapolation; empty at start.
    Eigen::VectorXd previous_flux;
};

struct Diagnostics {
    double time = 0.0;
    double energy = 0.0;
    double enstrophy = 0.0;
    double casimir3 = 0.0;
    double casimir4 = 0.0;
    double omega_min = 0.0;
    double omega_max = 0.0;
    double mean_omega = 0.0;
    double divergence_residual = 0.0;
    double area_error = 0.0;
    double cfl = 0.0;
};

struct EulerRun {
    std::vector<FlowState> trajectory;
    std::vector<Diagnostics> diagnostics;
    std::vector<std::string> warnings;

    const FlowState& final_state() const { return trajectory.back(); }
};

/// Semi-Lagrangian vorticity transport on a fixed mesh. Holds the Poisson
/// factorization (through the HodgeSolver) and the point locator.
class EulerSolver {
public:
    explicit EulerSolver(const HodgeSolver& hodge, EulerConfig config = {});

    const HodgeSolver& hodge() const { return *hodge_; }
    const TriangleMesh& mesh() const { return hodge_->dec().mesh(); }
    const EulerConfig& config() const { return config_; }
    const TriangleLocator& locator() const { return locator_; }

    FlowState initial_state(const Cochain0& omega, const CohomologyClass& cls) const;
    /// One step; appends CFL warnings to `warnings` when given.
    FlowState advect_step(const FlowState& state, double dt, std::vector<std::string>* warnings = nullptr) const;
    Diagnostics diagnose(const FlowState& state) const;
    EulerRun run(const Cochain0& omega0, const CohomologyClass& cls, double T) const;
    /// Time-one forward map of the flow started from v.
    FlowMap exp_map(const DivFreeVelocity& v) const;

    /// Vertex velocity vectors of a flux (V x 3 coordinates).
    Eigen::MatrixXd vertex_velocity(const Eigen::VectorXd& flux) const;
    double cfl_number(const Eigen::MatrixXd& vertex_velocity, double dt) const;
    /// RK4 trace of p over time dt (negative for a backtrace) in a frozen vertex velocity field.
    SurfacePoint trace(const Eigen::MatrixXd& vertex_velocity, const SurfacePoint& p, double dt) const;
    /// Vertex values resampled at a surface point.
    double sample(const Eigen::VectorXd& values, const Eigen::MatrixXd& gradients, const SurfacePoint& p) const;
    /// Vertex gradients (V x 3) from a local quadratic fit; empty for linear interpolation.
    Eigen::MatrixXd vertex_gradients(const Eigen::VectorXd& values) const;

private:
    Eigen::Vector2d face_velocity(const Eigen::MatrixXd& vertex_velocity, const SurfacePoint& p) const;

    const HodgeSolver* hodge_;
    EulerConfig config_;
    TriangleLocator locator_;
    std::vector<Eigen::MatrixXd> frames_;
    VertexInterpolator interpolator_;
};

FlowMap exp_map(const HodgeSolver& hodge, const DivFreeVelocity& v, const EulerConfig& config = {});
EulerRun run_euler(const HodgeSolver& hodge, const Cochain0& omega0, const CohomologyClass& cls, double T,
                   const EulerConfig& config = {});

/// One CSV row per diagnostics record, with a header line.
void write_diagnostics_csv(std::ostream& out, const std::vector<Diagnostics>& rows);
/// Legacy ASCII VTK polydata: omega as point scalars, velocity as cell vectors.
void write_vtk(std::ostream& out, const TriangleMesh& mesh, const Eigen::VectorXd& omega,
               const Eigen::MatrixXd& face_velocity, const std::string& title);

} // namespace surfflow
