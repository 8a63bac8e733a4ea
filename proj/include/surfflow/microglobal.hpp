// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "surfflow/euler.hpp"
#include "surfflow/paracalculus.hpp"

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace surfflow {

class ProbeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Orthonormal tangent basis at a vertex in embedding coordinates (m x 2);
/// the second column is J of the first.
Eigen::MatrixXd embedded_tangent_basis(const TriangleMesh& mesh, int v);
/// Tangential projector at a vertex in embedding coordinates (m x m).
Eigen::MatrixXd embedded_projector(const TriangleMesh& mesh, int v);
/// Embedded tangent vector at vertex v expressed in point coordinates.
Eigen::Vector3d to_point_vector(const TriangleMesh& mesh, int v, const Eigen::VectorXd& w);

/// Midpoint-rule edge integrals of a vertex vector field (V x 3 point coordinates).
Cochain1 vertex_field_flat(const TriangleMesh& mesh, const Eigen::MatrixXd& U);
/// Per-vertex rotation by +90 degrees in the tangent plane.
Eigen::MatrixXd rotate_vertex_field(const TriangleMesh& mesh, const Eigen::MatrixXd& U);

struct EmbeddedFlow {
    /// Embedded images of the vertices under phi and phi^-1 (V x m).
    Eigen::MatrixXd Phi;
    Eigen::MatrixXd Psi;
    /// Tangential Jacobians per vertex (m x m), zero on the normal space.
    std::vector<Eigen::MatrixXd> DPhi;
    std::vector<Eigen::MatrixXd> DPsi;
    /// D Psi at the image phi(x): the inverse of D Phi(x) up to discretization.
    std::vector<Eigen::MatrixXd> DPsiAtImage;
};

/// Least-squares Jacobian over the 1-ring: embedded differences of the images
/// are fitted against embedded differences of the vertices, then restricted to
/// the tangent plane.
EmbeddedFlow embed_flow(const TriangleMesh& mesh, const FlowMap& phi, const FlowMap& inverse);
/// Barycentric interpolation of per-vertex matrices at a surface point.
Eigen::MatrixXd interpolate_jacobian(const TriangleMesh& mesh, const std::vector<Eigen::MatrixXd>& J,
                                     const SurfacePoint& p);

struct WQuantity {
    double time = 0.0;
    /// Pi_{(D Psi) o phi} Phi per vertex (V x m).
    Eigen::MatrixXd W;
};

WQuantity compute_W(const Paracalculus& para, const EmbeddedFlow& flow, double time);
/// Centered time difference of W, projected onto the tangent planes; vertex
/// vectors in point coordinates (V x 3).
Eigen::MatrixXd compute_U(const TriangleMesh& mesh, const WQuantity& before, const WQuantity& at,
                          const WQuantity& after);

/// Relative L2 size below which a divergence or curl counts as zero; the
/// midpoint flat of an exact gradient carries a curl near 1e-3 of its divergence.
inline constexpr double kDivCurlNoiseFloor = 1e-2;

struct DivSmoothness {
    RegularitySlope divergence;
    RegularitySlope curl;
    /// slope(div) - slope(curl); +inf when the divergence is below the noise
    /// floor relative to the curl, -inf when the curl is.
    double gap = 0.0;
    bool exact_zero_divergence = false;
    bool exact_zero_curl = false;
    bool pass = false;
};

/// Compares the decay of d* U-flat with that of *d U-flat on the slope window.
DivSmoothness check_div_smoothness(const Dec& dec, const Cochain1& u_flat, const SpectralBasis& basis, int first,
                                   int last, double threshold = 0.3);
/// Same comparison on the flux form of a divergence-free velocity.
DivSmoothness check_div_smoothness(const HodgeSolver& hodge, const DivFreeVelocity& v, const SpectralBasis& basis,
                                   int first, int last, double threshold = 0.3);

/// Principal symbol of Biot-Savart, -(i / 2 pi) J xi / |xi|^2, in face-frame
/// coordinates; returned as the imaginary coefficients.
Eigen::Vector2cd symbol_biot_savart(const Eigen::Vector2d& xi);

/// Principal symbol of [MAIN] for the tangent map A = d phi:
/// <(A*)^-1 J xi, J (A*)^-1 xi> / |(A*)^-1 xi|^2.
double symbol_main(const Eigen::Vector2d& xi, const Eigen::Matrix2d& dphi);
/// Same value from the pushed-forward metric: |xi|^2 / (det A |(A*)^-1 xi|^2).
double symbol_main_pushforward(const Eigen::Vector2d& xi, const Eigen::Matrix2d& dphi);

/// Per-face tangent maps of a flow map from the face frame to a frame of the
/// image triangle, oriented by the surface normal.
std::vector<Eigen::Matrix2d> face_jacobians(const TriangleMesh& mesh, const FlowMap& phi);

struct EllipticityCertificate {
    int samples = 0;
    double min_symbol = 0.0;
    int min_face = -1;
    Eigen::Vector2d min_covector = Eigen::Vector2d::Zero();
    /// min over faces of sigma_min(d phi) / sigma_max(d phi), the exact lower
    /// bound of the symbol over unit covectors.
    double conditioning_bound = 0.0;
    /// Counts over log2(symbol) in [-8, 8), 32 bins, clamped.
    std::vector<int> histogram;
    bool pass = false;
};

/// Samples faces and unit covectors from a seeded generator. Throws
/// FoldOverError when a face Jacobian is not orientation preserving.
EllipticityCertificate ellipticity_certificate(const TriangleMesh& mesh, const FlowMap& phi, int samples,
                                               std::uint64_t seed);

void write_symbol_histogram_csv(std::ostream& out, const EllipticityCertificate& cert);

/// B~(omega) = *d[(Pi_{d Xi^-1} o K_Xi o S o K_{Xi^-1})(omega)]-sharp for the
/// flow Xi of a background vorticity up to time t.
class BTildeOperator {
public:
    BTildeOperator(const HodgeSolver& hodge, const Paracalculus& para, const Cochain0& background, double t,
                   const EulerConfig& config = {});

    Cochain0 apply(const Cochain0& omega) const;
    const FlowMap& flow() const { return xi_; }
    const FlowMap& inverse() const { return xi_inverse_; }

private:
    const HodgeSolver* hodge_;
    const Paracalculus* para_;
    FlowMap xi_;
    FlowMap xi_inverse_;
    std::vector<std::vector<Cochain0>> dxi_inverse_;
};

struct JacobianSpectrum {
    Eigen::MatrixXd matrix;
    /// Descending.
    Eigen::VectorXd singular_values;
    std::vector<double> thresholds;
    /// Per threshold: number of singular values above threshold * sigma_max.
    std::vector<int> rank;
    std::vector<int> kernel;
    std::vector<int> cokernel;
    int size() const { return static_cast<int>(singular_values.size()); }
};

struct DexpConfig {
    double epsilon = 1e-3;
    std::vector<double> thresholds{1e-2, 1e-3};
    EulerConfig euler;
};

/// Finite-difference Jacobian of Exp at v on the span of S(u_1) .. S(u_M).
/// Column k holds the least-squares coordinates, against the vertex velocities
/// of S(u_j) at the base image points, of (Exp(v + eps w_k) - Exp(v)) / eps.
JacobianSpectrum dexp_jacobian(const HodgeSolver& hodge, const SpectralBasis& basis, const DivFreeVelocity& v,
                               int modes, const DexpConfig& config = {});

void write_spectrum_csv(std::ostream& out, const JacobianSpectrum& spectrum);

} // namespace surfflow
